#![allow(dead_code)]

use g2flow::catalog;
use g2flow::forms::{phi_canonical, Matrix7};
use g2flow::{G2Structure, LieAlgebra7};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Realification `[[B,-C],[C,B]]` of a random traceless complex 3×3 matrix.
pub fn random_sl3c(r: &mut impl Rng) -> [[f64; 6]; 6] {
    let mut b = [[0.0; 3]; 3];
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = r.gen_range(-1.0..1.0);
            c[i][j] = r.gen_range(-1.0..1.0);
        }
    }
    let (tb, tc) = (
        (b[0][0] + b[1][1] + b[2][2]) / 3.0,
        (c[0][0] + c[1][1] + c[2][2]) / 3.0,
    );
    for i in 0..3 {
        b[i][i] -= tb;
        c[i][i] -= tc;
    }
    let mut a = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = b[i][j];
            a[i + 3][j + 3] = b[i][j];
            a[i][j + 3] = -c[i][j];
            a[i + 3][j] = c[i][j];
        }
    }
    a
}

/// A random well-conditioned change of basis `I + 0.3·N`, `N` uniform in [-1,1].
pub fn random_basis_change(r: &mut impl Rng) -> Matrix7 {
    loop {
        let p = Matrix7::identity() + Matrix7::from_fn(|_, _| 0.3 * r.gen_range(-1.0..1.0));
        if p.determinant().abs() > 0.2 {
            return p;
        }
    }
}

/// The same structure written in the basis `f_a = Σ_i p[i][a] e_i`.
pub fn in_new_basis(lie: &LieAlgebra7, s: &G2Structure, p: &Matrix7) -> G2Structure {
    let lie2 = lie.change_basis(p).expect("invertible");
    G2Structure::from_lie(&lie2, s.phi().pullback(p)).expect("positive")
}

/// A closed structure from one of three families, in a random basis.
pub fn random_closed_structure(r: &mut impl Rng) -> G2Structure {
    let lie = match r.gen_range(0..3) {
        0 => catalog::triple_lie(
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
        ),
        1 => catalog::htype_lie(r.gen_range(-1.0..3.0)),
        _ => catalog::almost_abelian_lie(&random_sl3c(r), &[0, 2, 4, 1, 3, 5]),
    };
    let s = G2Structure::from_lie(&lie, phi_canonical()).expect("positive");
    in_new_basis(&lie, &s, &random_basis_change(r))
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}
