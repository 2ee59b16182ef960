//! Small dense helpers on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector, Dyn, SVD};

use crate::forms::Matrix7;

/// Full SVD whose factors are checked to reproduce `a`.
///
/// nalgebra's default convergence threshold occasionally stops with factors
/// that are off by `1e-2` on matrices with clustered singular values, so the
/// reconstruction is verified and the decomposition retried on the transpose
/// or with a looser threshold.
pub fn svd(a: &DMatrix<f64>) -> SVD<f64, Dyn, Dyn> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let ok = |d: &SVD<f64, Dyn, Dyn>, target: &DMatrix<f64>| {
        let (Some(u), Some(v_t)) = (&d.u, &d.v_t) else {
            return false;
        };
        let recon = u * DMatrix::from_diagonal(&d.singular_values) * v_t;
        (recon - target).amax() <= 1e-11 * scale
    };
    let direct = a.clone().svd(true, true);
    if ok(&direct, a) {
        return direct;
    }
    let at = a.transpose();
    let tr = at.clone().svd(true, true);
    if ok(&tr, &at) {
        return SVD {
            u: tr.v_t.map(|v| v.transpose()),
            v_t: tr.u.map(|u| u.transpose()),
            singular_values: tr.singular_values,
        };
    }
    for eps in [1e-14, 1e-13, 1e-12] {
        if let Some(d) = a.clone().try_svd(true, true, eps, 0) {
            if ok(&d, a) {
                return d;
            }
        }
    }
    direct
}

/// Orthonormal basis of the null space of `a`.
///
/// A singular value counts as zero when it is below `rel_tol` times the
/// largest one (or is exactly zero for the zero matrix).
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let (m, n) = a.shape();
    // SVD of a wide matrix only yields min(m,n) right singular vectors
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let d = svd(&padded);
    let v_t = d.v_t.expect("requested V^T");
    let smax = d.singular_values.max();
    let cutoff = rel_tol * smax;
    d.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff || smax == 0.0)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Numerical rank with a relative singular-value cutoff.
pub fn rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = svd(a).singular_values;
    let smax = s.max();
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Moore-Penrose pseudoinverse with a relative cutoff.
pub fn pseudo_inverse(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let d = svd(a);
    let smax = d.singular_values.max();
    let eps = if smax > 0.0 { rel_tol * smax } else { 0.0 };
    d.pseudo_inverse(eps).expect("U and V were computed")
}

/// Row-major flattening of a 7×7 matrix.
pub fn flatten(m: &Matrix7) -> DVector<f64> {
    DVector::from_iterator(49, (0..7).flat_map(|r| (0..7).map(move |c| m[(r, c)])))
}

pub fn unflatten(v: &[f64]) -> Matrix7 {
    Matrix7::from_fn(|r, c| v[r * 7 + c])
}

/// Largest absolute entry.
pub fn max_abs(m: &Matrix7) -> f64 {
    m.amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((a.clone() * v)[0].abs() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix_has_full_null_space() {
        let a = DMatrix::<f64>::zeros(4, 3);
        assert_eq!(null_space(&a, 1e-9).len(), 3);
        assert_eq!(rank(&a, 1e-9), 0);
    }

    #[test]
    fn flatten_round_trip() {
        let m = Matrix7::from_fn(|r, c| (r * 10 + c) as f64);
        assert_eq!(unflatten(flatten(&m).as_slice()), m);
        assert_eq!(flatten(&m)[8], 11.0);
    }
}
