mod common;

use g2flow::forms::{dim_forms, KForm, Matrix7, Metric7, Vector7};
use g2flow::liecoframe::CoframeAlgebra;
use proptest::prelude::*;
use rand::Rng;

fn form(k: usize) -> impl Strategy<Value = KForm> {
    prop::collection::vec(-2.0f64..2.0, dim_forms(k))
        .prop_map(move |c| KForm::from_coeffs(k, c).unwrap())
}

fn degrees() -> impl Strategy<Value = (usize, usize)> {
    (0usize..=7).prop_flat_map(|k| (Just(k), 0usize..=7 - k))
}

fn spd() -> impl Strategy<Value = Matrix7> {
    prop::collection::vec(-1.0f64..1.0, 49).prop_map(|v| {
        let a = Matrix7::from_column_slice(&v);
        a * a.transpose() + Matrix7::identity() * 0.5
    })
}

fn sign(k: usize, l: usize) -> f64 {
    if (k * l).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(((k, l), seed) in (degrees(), any::<u64>())) {
        let mut r = common::rng(seed);
        let a = KForm::from_coeffs(k, (0..dim_forms(k)).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let b = KForm::from_coeffs(l, (0..dim_forms(l)).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scaled(sign(k, l));
        prop_assert!(ab.dist(&ba) < 1e-12);
    }

    #[test]
    fn wedge_is_associative(a in form(2), b in form(2), c in form(3)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(left.dist(&right) < 1e-11);
    }

    #[test]
    fn interior_is_an_antiderivation(a in form(2), b in form(3), v in prop::array::uniform7(-1.0f64..1.0)) {
        let v = Vector7::from_column_slice(&v);
        let lhs = a.wedge(&b).unwrap().interior(&v).unwrap();
        let rhs = a.interior(&v).unwrap().wedge(&b).unwrap()
            + a.wedge(&b.interior(&v).unwrap()).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn interior_squares_to_zero(a in form(4), v in prop::array::uniform7(-1.0f64..1.0)) {
        let v = Vector7::from_column_slice(&v);
        prop_assert!(a.interior(&v).unwrap().interior(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn star_pairs_to_inner_product(g in spd(), k in 0usize..=7, seed in any::<u64>()) {
        let m = Metric7::new(g, 1.0).unwrap();
        let mut r = common::rng(seed);
        let mut rand_form = || KForm::from_coeffs(k, (0..dim_forms(k)).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let (a, b) = (rand_form(), rand_form());
        let lhs = a.wedge(&m.star(&b)).unwrap();
        let rhs = m.volume_form().scaled(m.inner(&a, &b).unwrap());
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + rhs.max_abs()));
        // in odd dimension ∗∗ = id on every degree
        prop_assert!(m.star(&m.star(&a)).dist(&a) < 1e-9 * (1.0 + a.max_abs()));
        let n1 = m.inner(&a, &a).unwrap();
        let n2 = m.inner(&m.star(&a), &m.star(&a)).unwrap();
        prop_assert!((n1 - n2).abs() < 1e-9 * (1.0 + n1));
    }

    #[test]
    fn pullback_respects_wedge_and_composition(a in form(2), b in form(3), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let p = common::random_basis_change(&mut r);
        let q = common::random_basis_change(&mut r);
        let lhs = a.wedge(&b).unwrap().pullback(&p);
        let rhs = a.pullback(&p).wedge(&b.pullback(&p)).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-10);
        // (e^i ↦ Σ p_ij e^j) then q composes to p·q
        let two_step = a.pullback(&p).pullback(&q);
        prop_assert!(two_step.dist(&a.pullback(&(p * q))) < 1e-10);
    }
}

#[test]
fn jacobi_holds_exactly_when_d_squares_to_zero() {
    let mut r = common::rng(7);
    let mut broken = 0;
    for n in 0..100 {
        let s = common::random_closed_structure(&mut r);
        let mut lie = s.lie().unwrap().clone();
        let valid = n % 2 == 0;
        if !valid {
            let (i, j) = (r.gen_range(1..=7), r.gen_range(1..=7));
            let (i, j) = if i == j { (i, i % 7 + 1) } else { (i, j) };
            let k = r.gen_range(1..=7);
            lie.add_bracket(i, j, k, r.gen_range(0.5..1.5));
        }
        let jac = lie.jacobi_residual().3;
        let d2 = {
            // build d directly from the constants, bypassing the Jacobi check
            let d1 = (1..=7)
                .map(|k| {
                    let mut f = KForm::zero(2);
                    for i in 1..=7 {
                        for j in i + 1..=7 {
                            f += &KForm::monomial(
                                &[i, j],
                                -lie.structure_constant(i - 1, j - 1, k - 1),
                            )
                            .unwrap();
                        }
                    }
                    f
                })
                .collect();
            CoframeAlgebra::from_differentials(d1)
                .unwrap()
                .d_squared_residual()
        };
        let scale = lie.max_abs().powi(2).max(1.0);
        if valid {
            assert!(
                jac < 1e-11 * scale && d2 < 1e-11 * scale,
                "valid #{n}: {jac} {d2}"
            );
        } else {
            assert_eq!(
                jac > 1e-6,
                d2 > 1e-6,
                "perturbed #{n}: jacobi {jac}, d² {d2}"
            );
            broken += usize::from(jac > 1e-6);
        }
    }
    // a random extra bracket almost always breaks Jacobi
    assert!(
        broken >= 40,
        "only {broken} of 50 perturbations broke Jacobi"
    );
}
