mod common;

use g2flow::catalog;
use g2flow::forms::{Matrix7, Vector7};
use g2flow::soliton::{detect, verify_selfsimilar, SolitonKind};
use g2flow::{Error, Tolerances};
use rand::Rng;

#[test]
fn htype_soliton_constant_and_derivation() {
    let tol = Tolerances::default();
    for a in [0.25, 0.4, 0.5, 0.75, 1.0, 1.5, 3.0] {
        let s = catalog::htype_family(a).unwrap().structure;
        let t = s.torsion().unwrap();
        let cert = detect(&s, &t, &tol).unwrap();
        common::assert_close(cert.c, catalog::htype_c(a), 1e-10, "c");
        common::assert_close(cert.lambda, -3.0 * cert.c, 1e-15, "λ");
        let want =
            Matrix7::from_diagonal(&Vector7::from_column_slice(&catalog::htype_derivation(a)));
        let sym = s.metric().symmetric_part(&cert.d);
        assert!(
            (sym - want).amax() < 1e-9,
            "a={a}: D off by {}",
            (sym - want).amax()
        );
        let kind = match a {
            x if x < 1.0 => SolitonKind::Shrinking,
            1.0 => SolitonKind::Steady,
            _ => SolitonKind::Expanding,
        };
        assert_eq!(cert.kind, kind, "a={a}");
        assert!(cert.algebraic, "a={a}");
        assert!(verify_selfsimilar(&s, &t, &cert).residual < 1e-9, "a={a}");
    }
}

#[test]
fn triple_family_has_exactly_three_soliton_points() {
    let tol = Tolerances::default();
    let h = 1.5f64.sqrt();
    let special = [
        ((1.0, 1.0, 1.0), SolitonKind::Steady, 0.0),
        ((h, h, 0.0), SolitonKind::Expanding, -2.0),
        ((3f64.sqrt(), 0.0, 0.0), SolitonKind::Expanding, -8.0),
    ];
    for ((a, b, c), kind, cval) in special {
        let s = catalog::triple_family(a, b, c).unwrap().structure;
        let t = s.torsion().unwrap();
        let cert = detect(&s, &t, &tol).unwrap();
        assert_eq!(cert.kind, kind, "({a},{b},{c})");
        common::assert_close(cert.c, cval, 1e-9, "c");
        assert!(verify_selfsimilar(&s, &t, &cert).residual < 1e-9);
    }
    // away from the three points the least-squares residual stays large
    let mut r = common::rng(11);
    let mut smallest = f64::INFINITY;
    for _ in 0..100 {
        let (a, b, c) = catalog::normalize_triple(
            r.gen_range(0.0..1.0),
            r.gen_range(0.0..1.0),
            r.gen_range(0.0..1.0),
        );
        let near = special
            .iter()
            .any(|((x, y, z), _, _)| (a - x).abs() + (b - y).abs() + (c - z).abs() < 0.05);
        if near {
            continue;
        }
        let s = catalog::triple_family(a, b, c).unwrap().structure;
        let cert = detect(&s, &s.torsion().unwrap(), &tol).unwrap();
        assert_eq!(cert.kind, SolitonKind::None, "({a},{b},{c})");
        smallest = smallest.min(cert.residual);
    }
    assert!(smallest > 1e-4, "smallest residual {smallest}");
}

#[test]
fn soliton_detection_is_basis_independent() {
    let tol = Tolerances::default();
    let mut r = common::rng(3);
    for a in [0.25, 1.0, 2.0] {
        let lie = catalog::htype_lie(a);
        let s = catalog::htype_family(a).unwrap().structure;
        let s2 = common::in_new_basis(&lie, &s, &common::random_basis_change(&mut r));
        let cert = detect(&s2, &s2.torsion().unwrap(), &tol).unwrap();
        common::assert_close(cert.c, catalog::htype_c(a), 1e-8, "c in a new basis");
        assert!(verify_selfsimilar(&s2, &s2.torsion().unwrap(), &cert).residual < 1e-8);
    }
}

#[test]
fn bryant_solvable_is_a_steady_soliton() {
    let s = catalog::bryant_solvable().unwrap().structure;
    let cert = detect(&s, &s.torsion().unwrap(), &Tolerances::default()).unwrap();
    assert_eq!(cert.kind, SolitonKind::Steady);
}

#[test]
fn mu_b_is_expanding_and_mu_a_zero_is_parallel() {
    let tol = Tolerances::default();
    let s = catalog::mu_b(1.0).unwrap().structure;
    let cert = detect(&s, &s.torsion().unwrap(), &tol).unwrap();
    assert_eq!(cert.kind, SolitonKind::Expanding);
    let s = catalog::mu_a(0.0).unwrap().structure;
    let cert = detect(&s, &s.torsion().unwrap(), &tol).unwrap();
    assert_eq!(cert.kind, SolitonKind::Parallel);
}

#[test]
fn detection_needs_a_lie_algebra() {
    let s = catalog::bryant_homogeneous().unwrap().structure;
    let t = s.torsion().unwrap();
    assert!(matches!(
        detect(&s, &t, &Tolerances::default()),
        Err(Error::NoLieAlgebra)
    ));
}

#[test]
fn certificate_serializes_with_flat_derivation() {
    let s = catalog::htype_family(0.25).unwrap().structure;
    let cert = detect(&s, &s.torsion().unwrap(), &Tolerances::default()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&cert).unwrap();
    assert_eq!(v["kind"], "shrinking");
    assert_eq!(v["D"].as_array().unwrap().len(), 49);
    assert!((v["c"].as_f64().unwrap() - 1.5).abs() < 1e-10);
    for key in ["lambda", "residual", "algebraic"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
