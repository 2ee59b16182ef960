//! Coframe algebras, Lie algebras given by structure constants, derivations
//! and the Levi-Civita curvature of left-invariant metrics.
//!
//! Differentials of left-invariant 1-forms follow `de^k(X,Y) = -e^k([X,Y])`,
//! so `de^k = -Σ_{i<j} c_{ij}^k e^{ij}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{dim_forms, KForm, Matrix7, Metric7, MultiIndex, Term, Vector7, DIM};
use crate::linalg;

const JACOBI_TOL: f64 = 1e-12;

/// Real 7-dimensional Lie algebra, `c[i][j][k]` the `e_k` coordinate of `[e_i, e_j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra7 {
    c: [[[f64; DIM]; DIM]; DIM],
}

impl Default for LieAlgebra7 {
    fn default() -> Self {
        Self::abelian()
    }
}

impl LieAlgebra7 {
    pub fn abelian() -> Self {
        LieAlgebra7 {
            c: [[[0.0; DIM]; DIM]; DIM],
        }
    }

    /// Set `[e_i, e_j] = out` (1-based), keeping antisymmetry. Unchecked.
    pub fn set_bracket(&mut self, i: usize, j: usize, out: &Vector7) {
        assert!(i != j && (1..=DIM).contains(&i) && (1..=DIM).contains(&j));
        for k in 0..DIM {
            self.c[i - 1][j - 1][k] = out[k];
            self.c[j - 1][i - 1][k] = -out[k];
        }
    }

    /// Add `coeff · e_k` to `[e_i, e_j]` (1-based). Unchecked.
    pub fn add_bracket(&mut self, i: usize, j: usize, k: usize, coeff: f64) {
        let mut v = self.bracket_basis(i, j);
        v[k - 1] += coeff;
        self.set_bracket(i, j, &v);
    }

    /// Builder from a list of `(i, j, k, coeff)` meaning `[e_i,e_j] ∋ coeff e_k`;
    /// rejects data violating the Jacobi identity.
    pub fn from_entries(entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::abelian();
        for &(i, j, k, v) in entries {
            if i == j || [i, j, k].iter().any(|&x| x == 0 || x > DIM) {
                return Err(Error::Invalid(format!("bad bracket entry ({i},{j},{k})")));
            }
            g.add_bracket(i, j, k, v);
        }
        g.check_jacobi()?;
        Ok(g)
    }

    /// `c_{ij}^k`, 0-based.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    /// `[e_i, e_j]` with 1-based indices.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector7 {
        Vector7::from_fn(|k, _| self.c[i - 1][j - 1][k])
    }

    pub fn bracket(&self, x: &Vector7, y: &Vector7) -> Vector7 {
        let mut out = Vector7::zeros();
        for i in 0..DIM {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..DIM {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..DIM {
                    out[k] += w * self.c[i][j][k];
                }
            }
        }
        out
    }

    /// Matrix of `ad e_i` (1-based).
    pub fn ad(&self, i: usize) -> Matrix7 {
        Matrix7::from_fn(|k, j| self.c[i - 1][j][k])
    }

    /// Worst Jacobi violation as `(i, j, k, residual)` with 1-based indices.
    pub fn jacobi_residual(&self) -> (usize, usize, usize, f64) {
        let mut worst = (1, 2, 3, 0.0);
        let e = |i: usize| Vector7::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
        for i in 0..DIM {
            for j in i + 1..DIM {
                for k in j + 1..DIM {
                    let (x, y, z) = (e(i), e(j), e(k));
                    let s = self.bracket(&self.bracket(&x, &y), &z)
                        + self.bracket(&self.bracket(&y, &z), &x)
                        + self.bracket(&self.bracket(&z, &x), &y);
                    let r = s.amax();
                    if r > worst.3 {
                        worst = (i + 1, j + 1, k + 1, r);
                    }
                }
            }
        }
        worst
    }

    pub fn check_jacobi(&self) -> Result<()> {
        let (i, j, k, residual) = self.jacobi_residual();
        let scale = self.max_abs().max(1.0).powi(2);
        if residual > JACOBI_TOL * scale {
            return Err(Error::Jacobi { i, j, k, residual });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .fold(0.0, |m, v: &f64| m.max(v.abs()))
    }

    /// Structure constants in the basis `f_a = Σ_i p[i][a] e_i`.
    pub fn change_basis(&self, p: &Matrix7) -> Result<LieAlgebra7> {
        let pinv = p.try_inverse().ok_or(Error::SingularSolve)?;
        let mut out = Self::abelian();
        for a in 0..DIM {
            for b in a + 1..DIM {
                let v = self.bracket(&p.column(a).into(), &p.column(b).into());
                out.set_bracket(a + 1, b + 1, &(pinv * v));
            }
        }
        Ok(out)
    }

    /// Max entry of `D[x,y] - [Dx,y] - [x,Dy]` over basis pairs.
    pub fn derivation_residual(&self, d: &Matrix7) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=DIM {
            for j in i + 1..=DIM {
                let ei: Vector7 = Matrix7::identity().column(i - 1).into();
                let ej: Vector7 = Matrix7::identity().column(j - 1).into();
                let r = d * self.bracket(&ei, &ej)
                    - self.bracket(&(d * ei), &ej)
                    - self.bracket(&ei, &(d * ej));
                worst = worst.max(r.amax());
            }
        }
        worst
    }

    pub fn to_json(&self) -> LieAlgebraJson {
        let mut brackets = Vec::new();
        for i in 0..DIM {
            for j in i + 1..DIM {
                let out: BTreeMap<String, f64> = (0..DIM)
                    .filter(|&k| self.c[i][j][k] != 0.0)
                    .map(|k| ((k + 1).to_string(), self.c[i][j][k]))
                    .collect();
                if !out.is_empty() {
                    brackets.push(BracketJson {
                        i: i + 1,
                        j: j + 1,
                        out,
                    });
                }
            }
        }
        LieAlgebraJson { dim: DIM, brackets }
    }

    pub fn from_json(json: &LieAlgebraJson) -> Result<Self> {
        if json.dim != DIM {
            return Err(Error::Invalid(format!("dim must be 7, got {}", json.dim)));
        }
        let mut g = Self::abelian();
        for b in &json.brackets {
            if b.i == b.j || b.i == 0 || b.j == 0 || b.i > DIM || b.j > DIM {
                return Err(Error::Invalid(format!(
                    "bad bracket pair ({}, {})",
                    b.i, b.j
                )));
            }
            let mut v = g.bracket_basis(b.i, b.j);
            for (k, val) in &b.out {
                let k: usize = k
                    .parse()
                    .ok()
                    .filter(|k| (1..=DIM).contains(k))
                    .ok_or_else(|| Error::Invalid(format!("bad output index '{k}'")))?;
                v[k - 1] += val;
            }
            g.set_bracket(b.i, b.j, &v);
        }
        g.check_jacobi()?;
        Ok(g)
    }
}

/// `{"dim": 7, "brackets": [{"i": 1, "j": 4, "out": {"5": -1.0}}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub brackets: Vec<BracketJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub out: BTreeMap<String, f64>,
}

/// `{"d": [KForm × 7]}`, each KForm a sparse term list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoframeJson {
    pub d: Vec<Vec<Term>>,
}

/// Seven generators with prescribed differentials `d e^k`, extended to all
/// degrees as an antiderivation.
#[derive(Clone, Debug)]
pub struct CoframeAlgebra {
    d1: Vec<KForm>,
    // d on Λ^k as a C(7,k+1) × C(7,k) matrix, k = 0..6
    dmats: Vec<DMatrix<f64>>,
    lie: Option<LieAlgebra7>,
}

impl CoframeAlgebra {
    /// Coframe from the seven 2-forms `d e^1, ..., d e^7`. `d∘d = 0` is not
    /// enforced here; see [`CoframeAlgebra::d_squared_residual`].
    pub fn from_differentials(d1: Vec<KForm>) -> Result<Self> {
        if d1.len() != DIM {
            return Err(Error::Invalid(format!(
                "{} differentials, expected 7",
                d1.len()
            )));
        }
        if let Some(bad) = d1.iter().find(|f| f.degree() != 2) {
            return Err(Error::DegreeMismatch(2, bad.degree()));
        }
        let dmats = build_d_matrices(&d1);
        Ok(CoframeAlgebra {
            d1,
            dmats,
            lie: None,
        })
    }

    pub fn from_structure_constants(lie: &LieAlgebra7) -> Result<Self> {
        lie.check_jacobi()?;
        let d1 = (0..DIM)
            .map(|k| {
                let mut f = KForm::zero(2);
                let mut coeffs = f.coeffs().to_vec();
                for (p, idx) in MultiIndex::all(2).enumerate() {
                    let ij = idx.indices();
                    coeffs[p] = -lie.c[ij[0] - 1][ij[1] - 1][k];
                }
                f = KForm::from_coeffs(2, coeffs).expect("21 coefficients");
                f
            })
            .collect::<Vec<_>>();
        let mut cf = Self::from_differentials(d1)?;
        cf.lie = Some(lie.clone());
        Ok(cf)
    }

    pub fn from_json(json: &CoframeJson) -> Result<Self> {
        let d1 = json
            .d
            .iter()
            .map(|terms| KForm::from_terms(2, terms))
            .collect::<Result<Vec<_>>>()?;
        Self::from_differentials(d1)
    }

    pub fn to_json(&self) -> CoframeJson {
        CoframeJson {
            d: self.d1.iter().map(KForm::to_terms).collect(),
        }
    }

    /// The Lie algebra this coframe was derived from, if any.
    pub fn lie(&self) -> Option<&LieAlgebra7> {
        self.lie.as_ref()
    }

    /// `d e^k`, 1-based.
    pub fn de(&self, k: usize) -> &KForm {
        &self.d1[k - 1]
    }

    pub fn differentials(&self) -> &[KForm] {
        &self.d1
    }

    pub fn d_matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.dmats[k]
    }

    /// Chevalley-Eilenberg style differential of an arbitrary form.
    pub fn d(&self, a: &KForm) -> Result<KForm> {
        let k = a.degree();
        if k >= DIM {
            return Err(Error::DegreeOverflow(k + 1));
        }
        Ok(crate::forms::apply(&self.dmats[k], a, k + 1))
    }

    /// `max_k |d(d e^k)|`.
    pub fn d_squared_residual(&self) -> f64 {
        self.d1
            .iter()
            .map(|f| self.d(f).expect("2-form").max_abs())
            .fold(0.0, f64::max)
    }
}

fn build_d_matrices(d1: &[KForm]) -> Vec<DMatrix<f64>> {
    // d on basis monomials, degree by degree: d(e^i ∧ e^R) = de^i ∧ e^R - e^i ∧ d e^R
    let mut basis_d: Vec<Vec<KForm>> = vec![vec![KForm::zero(1)]];
    for k in 1..DIM {
        let mut level = Vec::with_capacity(dim_forms(k));
        for idx in MultiIndex::all(k) {
            let mask = idx.mask();
            let low = mask.trailing_zeros() as usize;
            let rest = MultiIndex::from_mask(mask & !(1 << low));
            let e_rest = KForm::monomial(&rest.indices(), 1.0).unwrap_or(KForm::constant(1.0));
            let d_rest = &basis_d[k - 1][rest.position()];
            let first = d1[low].wedge(&e_rest).expect("degree ≤ 7");
            let second = KForm::e(&[low + 1]).wedge(d_rest).expect("degree ≤ 7");
            level.push(first - second);
        }
        basis_d.push(level);
    }
    basis_d
        .iter()
        .enumerate()
        .map(|(k, level)| {
            let rows = dim_forms(k + 1);
            DMatrix::from_fn(rows, level.len(), |r, c| level[c].coeffs()[r])
        })
        .collect()
}

pub fn from_structure_constants(lie: &LieAlgebra7) -> Result<CoframeAlgebra> {
    CoframeAlgebra::from_structure_constants(lie)
}

pub fn ce_d(cf: &CoframeAlgebra, a: &KForm) -> Result<KForm> {
    cf.d(a)
}

pub fn check_d_squared(cf: &CoframeAlgebra) -> f64 {
    cf.d_squared_residual()
}

/// Basis of `Der(g)`, orthonormal for `tr(A Bᵀ)`.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub basis: Vec<Matrix7>,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance of `d` from the span (Frobenius norm of the orthogonal residual).
    pub fn distance(&self, d: &Matrix7) -> f64 {
        let mut r = *d;
        for b in &self.basis {
            r -= b * (d.component_mul(b).sum());
        }
        r.norm()
    }
}

/// Null space of `D ↦ (D[e_i,e_j] - [De_i,e_j] - [e_i,De_j])_{i<j}`.
pub fn derivations(lie: &LieAlgebra7) -> DerivationSpace {
    let rows = 21 * DIM;
    let mut a = DMatrix::<f64>::zeros(rows, 49);
    let var = |r: usize, s: usize| r * DIM + s;
    let mut row = 0;
    for i in 0..DIM {
        for j in i + 1..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    // D[e_i,e_j]_k = Σ_l c_ij^l D_kl
                    a[(row, var(k, l))] += lie.c[i][j][l];
                    // [De_i, e_j]_k = Σ_m D_mi c_mj^k
                    a[(row, var(l, i))] -= lie.c[l][j][k];
                    // [e_i, De_j]_k = Σ_m D_mj c_im^k
                    a[(row, var(l, j))] -= lie.c[i][l][k];
                }
                row += 1;
            }
        }
    }
    let basis = linalg::null_space(&a, 1e-9)
        .into_iter()
        .map(|v| linalg::unflatten(v.as_slice()))
        .collect();
    DerivationSpace { basis }
}

/// Levi-Civita data of a left-invariant metric.
#[derive(Clone, Debug)]
pub struct LeviCivita {
    /// `nabla[i]` is the matrix of `∇_{e_i}` acting on coordinate vectors.
    pub nabla: Vec<Matrix7>,
    lie: LieAlgebra7,
    metric: Metric7,
}

impl LeviCivita {
    /// Koszul formula `2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ - ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`.
    pub fn new(lie: &LieAlgebra7, metric: &Metric7) -> Self {
        let g = metric.matrix();
        let ginv = metric.inverse();
        let ip = |i: usize, j: usize, l: usize| -> f64 {
            // ⟨[e_i, e_j], e_l⟩
            (0..DIM).map(|m| lie.c[i][j][m] * g[(m, l)]).sum()
        };
        let nabla = (0..DIM)
            .map(|i| {
                let mut m = Matrix7::zeros();
                for j in 0..DIM {
                    let koszul =
                        Vector7::from_fn(|l, _| 0.5 * (ip(i, j, l) - ip(j, l, i) + ip(l, i, j)));
                    m.set_column(j, &(ginv * koszul));
                }
                m
            })
            .collect();
        LeviCivita {
            nabla,
            lie: lie.clone(),
            metric: metric.clone(),
        }
    }

    /// Matrix of `R(e_a, e_b) = [∇_a, ∇_b] - ∇_{[e_a,e_b]}` (0-based).
    pub fn curvature(&self, a: usize, b: usize) -> Matrix7 {
        let mut r = self.nabla[a] * self.nabla[b] - self.nabla[b] * self.nabla[a];
        for m in 0..DIM {
            let c = self.lie.c[a][b][m];
            if c != 0.0 {
                r -= self.nabla[m] * c;
            }
        }
        r
    }

    /// Ricci tensor `ric(Y,Z) = tr(X ↦ R(X,Y)Z)`.
    pub fn ricci_tensor(&self) -> Matrix7 {
        let mut ric = Matrix7::zeros();
        for a in 0..DIM {
            for b in 0..DIM {
                let r = self.curvature(a, b);
                for c in 0..DIM {
                    ric[(b, c)] += r[(a, c)];
                }
            }
        }
        ric
    }

    /// Sectional curvature of the plane spanned by `e_i, e_j` (0-based).
    pub fn sectional(&self, i: usize, j: usize) -> Result<f64> {
        let g = self.metric.matrix();
        let area = g[(i, i)] * g[(j, j)] - g[(i, j)].powi(2);
        if i == j || area.abs() < 1e-14 {
            return Err(Error::DegeneratePlane);
        }
        let rv = self.curvature(i, j).column(j).into_owned();
        let num: f64 = (0..DIM).map(|m| rv[m] * g[(m, i)]).sum();
        Ok(num / area)
    }
}

/// Ricci curvature computed from the Koszul connection.
#[derive(Clone, Debug)]
pub struct KoszulRicci {
    /// Symmetric Ricci tensor `ric(e_i, e_j)`.
    pub tensor: Matrix7,
    /// Ricci operator `g⁻¹ ric`.
    pub operator: Matrix7,
    pub scalar: f64,
}

pub fn ricci_koszul(lie: &LieAlgebra7, metric: &Metric7) -> KoszulRicci {
    let lc = LeviCivita::new(lie, metric);
    let tensor = lc.ricci_tensor();
    let operator = metric.inverse() * tensor;
    KoszulRicci {
        tensor,
        operator,
        scalar: operator.trace(),
    }
}

/// Sectional curvature of the plane `(e_i, e_j)`, 1-based indices.
pub fn sectional_curvature(lie: &LieAlgebra7, metric: &Metric7, i: usize, j: usize) -> Result<f64> {
    if i == j || i == 0 || j == 0 || i > DIM || j > DIM {
        return Err(Error::DegeneratePlane);
    }
    LeviCivita::new(lie, metric).sectional(i - 1, j - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn htype(a: f64) -> LieAlgebra7 {
        let mut g = LieAlgebra7::abelian();
        g.add_bracket(1, 4, 5, -1.0);
        g.add_bracket(1, 3, 6, -1.0);
        g.add_bracket(2, 3, 5, -1.0);
        g.add_bracket(2, 4, 6, 1.0);
        for (i, w) in [a, a, 0.5 - a, 0.5 - a, 0.5, 0.5].into_iter().enumerate() {
            g.add_bracket(7, i + 1, i + 1, w);
        }
        g
    }

    #[test]
    fn abelian_coframe_is_zero() {
        let cf = CoframeAlgebra::from_structure_constants(&LieAlgebra7::abelian()).unwrap();
        assert!(cf.differentials().iter().all(|f| f.is_zero(0.0)));
        assert_eq!(cf.d(&KForm::constant(3.0)).unwrap(), KForm::zero(1));
        assert_eq!(derivations(&LieAlgebra7::abelian()).dim(), 49);
    }

    #[test]
    fn htype_de5() {
        let cf = CoframeAlgebra::from_structure_constants(&htype(0.3)).unwrap();
        assert!(cf.de(5).dist(&KForm::parse("e14 + e23 + 0.5e57").unwrap()) < 1e-15);
        assert!(cf.d(&KForm::e(&[7])).unwrap().is_zero(0.0));
        assert!(cf.d_squared_residual() < 1e-12);
    }

    #[test]
    fn jacobi_violation_reported() {
        let mut g = LieAlgebra7::abelian();
        g.add_bracket(1, 2, 3, 1.0);
        g.add_bracket(3, 4, 5, 1.0);
        g.add_bracket(1, 4, 1, 1.0);
        let err = CoframeAlgebra::from_structure_constants(&g).unwrap_err();
        assert!(matches!(err, Error::Jacobi { .. }));
    }

    #[test]
    fn seven_form_has_no_differential() {
        let cf = CoframeAlgebra::from_structure_constants(&htype(1.0)).unwrap();
        assert_eq!(
            cf.d(&KForm::e(&[1, 2, 3, 4, 5, 6, 7])),
            Err(Error::DegreeOverflow(8))
        );
    }

    #[test]
    fn htype_diagonal_derivation() {
        for a in [0.25, 1.0, 1.7] {
            let g = htype(a);
            let d = Matrix7::from_diagonal(&Vector7::from_column_slice(&[
                -2.0 + 2.0 * a * a,
                -2.0 + 2.0 * a * a,
                -1.5 - 2.0 * a + 2.0 * a * a,
                -1.5 - 2.0 * a + 2.0 * a * a,
                -3.5 - 2.0 * a + 4.0 * a * a,
                -3.5 - 2.0 * a + 4.0 * a * a,
                0.0,
            ]));
            assert!(g.derivation_residual(&d) < 1e-10);
            let der = derivations(&g);
            assert!(der.distance(&d) < 1e-9, "a = {a}");
            for b in &der.basis {
                assert!(g.derivation_residual(b) < 1e-10);
            }
        }
    }

    #[test]
    fn koszul_flat_and_sectional() {
        let flat = LieAlgebra7::abelian();
        let ric = ricci_koszul(&flat, &Metric7::identity());
        assert_eq!(ric.scalar, 0.0);
        assert_eq!(
            sectional_curvature(&flat, &Metric7::identity(), 1, 2).unwrap(),
            0.0
        );
        assert_eq!(
            sectional_curvature(&flat, &Metric7::identity(), 2, 2),
            Err(Error::DegeneratePlane)
        );
    }

    #[test]
    fn json_round_trip() {
        let g = htype(0.75);
        let json = serde_json::to_string(&g.to_json()).unwrap();
        let back: LieAlgebraJson = serde_json::from_str(&json).unwrap();
        assert_eq!(LieAlgebra7::from_json(&back).unwrap(), g);
    }
}
