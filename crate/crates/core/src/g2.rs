//! G2-structure calculus for a positive 3-form on a coframe algebra.
//!
//! All endomorphisms are matrices acting on coordinate vectors in the basis
//! `e_1..e_7`. Transposes, symmetric parts and the trace inner product are
//! taken with respect to the metric induced by `φ`, so nothing assumes the
//! basis is orthonormal.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{self, dim_forms, wedge_sign, KForm, Matrix7, Metric7, MultiIndex, DIM};
use crate::liecoframe::{CoframeAlgebra, LieAlgebra7};
use crate::linalg;

/// `θ(A)ψ = -ψ(A·,·,…) - ψ(·,A·,…) - …`, extended to forms of any degree.
///
/// On 1-forms `θ(A)e^m = -Σ_j A[m][j] e^j`; θ acts as a derivation.
pub fn theta(a: &Matrix7, psi: &KForm) -> KForm {
    let k = psi.degree();
    let mut out = vec![0.0; dim_forms(k)];
    for (idx, coeff) in psi.terms() {
        let mask = idx.mask();
        for m in 0..DIM {
            let bit = 1u8 << m;
            if mask & bit == 0 {
                continue;
            }
            let rest = mask & !bit;
            // e^I = s_m e^m ∧ e^{I \ m}
            let s_m = wedge_sign(bit, rest);
            for j in 0..DIM {
                let amj = a[(m, j)];
                if amj == 0.0 || rest & (1 << j) != 0 {
                    continue;
                }
                let target = MultiIndex::from_mask(rest | (1 << j));
                let s_j = wedge_sign(1 << j, rest);
                out[target.position()] -= coeff * amj * s_m * s_j;
            }
        }
    }
    KForm::from_coeffs(k, out).expect("same degree")
}

/// Matrix of `A ↦ θ(A)ψ` from row-major flattened `A` to coefficients of `ψ`'s degree.
pub fn theta_matrix(psi: &KForm) -> DMatrix<f64> {
    let n = dim_forms(psi.degree());
    let mut m = DMatrix::zeros(n, 49);
    for r in 0..DIM {
        for s in 0..DIM {
            let mut e = Matrix7::zeros();
            e[(r, s)] = 1.0;
            let col = theta(&e, psi);
            m.set_column(r * DIM + s, &DVector::from_column_slice(col.coeffs()));
        }
    }
    m
}

/// Metric and volume form determined by a 3-form through
/// `g(X,Y) vol = (1/6) i_Xφ ∧ i_Yφ ∧ φ`.
pub fn induce_metric(phi: &KForm) -> Result<(Metric7, KForm)> {
    if phi.degree() != 3 {
        return Err(Error::DegreeMismatch(3, phi.degree()));
    }
    let contractions: Vec<KForm> = (1..=DIM)
        .map(|i| phi.interior_basis(i).expect("degree 3"))
        .collect();
    let mut b = Matrix7::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let top = contractions[i]
                .wedge(&contractions[j])
                .and_then(|w| w.wedge(phi))
                .expect("degree 7");
            let v = top.coeffs()[0] / 6.0;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let det = b.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::NonPositiveForm);
    }
    let (b, orientation) = if det < 0.0 { (-b, -1.0) } else { (b, 1.0) };
    let g = b / det.abs().powf(1.0 / 9.0);
    let metric = Metric7::new(g, orientation).map_err(|_| Error::NonPositiveForm)?;
    let vol = metric.volume_form();
    Ok((metric, vol))
}

/// Stabilizer algebra `g2` of `φ` and its trace-orthogonal complement `q`.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub g2: Vec<Matrix7>,
    pub q: Vec<Matrix7>,
    /// Dimensions of `q1`, `q7`, `q27`.
    pub q_dims: [usize; 3],
    /// Rank of `A ↦ θ(A)φ` restricted to `q`.
    pub theta_q_rank: usize,
}

fn span_rank(mats: &[Matrix7]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(49, mats.len(), |r, c| mats[c][(r / DIM, r % DIM)]);
    linalg::rank(&m, 1e-9)
}

/// `g2 = ker(A ↦ θ(A)φ)` and `q = g2^⊥`; decomposes `q` into its trace,
/// skew and traceless-symmetric parts.
pub fn g2_stabilizer(phi: &KForm, metric: &Metric7) -> Result<Stabilizer> {
    let theta_phi = theta_matrix(phi);
    let g2: Vec<Matrix7> = linalg::null_space(&theta_phi, 1e-9)
        .into_iter()
        .map(|v| linalg::unflatten(v.as_slice()))
        .collect();
    // functionals A ↦ tr(A g⁻¹ Kᵀ g) for K in g2
    let mut w = DMatrix::zeros(g2.len(), 49);
    for (row, k) in g2.iter().enumerate() {
        let kt = metric.adjoint(k);
        for a in 0..DIM {
            for b in 0..DIM {
                w[(row, a * DIM + b)] = kt[(b, a)];
            }
        }
    }
    let q: Vec<Matrix7> = linalg::null_space(&w, 1e-9)
        .into_iter()
        .map(|v| linalg::unflatten(v.as_slice()))
        .collect();

    let skew: Vec<Matrix7> = q.iter().map(|a| metric.skew_part(a)).collect();
    let sym: Vec<Matrix7> = q.iter().map(|a| metric.symmetric_part(a)).collect();
    let traceless: Vec<Matrix7> = sym
        .iter()
        .map(|a| a - Matrix7::identity() * (a.trace() / DIM as f64))
        .collect();
    let q1 = usize::from(sym.iter().any(|a| a.trace().abs() > 1e-9));
    let q_dims = [q1, span_rank(&skew), span_rank(&traceless)];

    let theta_q = DMatrix::from_fn(35, q.len(), |r, c| {
        theta_phi.row(r).dot(&linalg::flatten(&q[c]).transpose())
    });
    let theta_q_rank = linalg::rank(&theta_q, 1e-9);
    if g2.len() != 14 || theta_q_rank != 35 {
        return Err(Error::NonPositiveForm);
    }
    Ok(Stabilizer {
        g2,
        q,
        q_dims,
        theta_q_rank,
    })
}

/// Thresholds used by torsion checks and classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// `dφ = 0` and other exact identities.
    pub closed: f64,
    /// Matrix-identity residuals (quadratic, ERP, eigenform).
    pub quadratic: f64,
    /// Soliton certificate residual.
    pub soliton: f64,
    /// `|c|` below which a soliton is steady.
    pub steady: f64,
    /// `|τ|` below which a structure is parallel.
    pub parallel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            closed: 1e-9,
            quadratic: 1e-8,
            soliton: 1e-8,
            steady: 1e-9,
            parallel: 1e-9,
        }
    }
}

/// A positive 3-form on a coframe algebra with its induced metric data.
#[derive(Clone, Debug)]
pub struct G2Structure {
    coframe: CoframeAlgebra,
    phi: KForm,
    metric: Metric7,
    vol: KForm,
    star: Vec<DMatrix<f64>>,
    stabilizer: Stabilizer,
    // inverse of θ(·)φ restricted to q, in the q basis
    q_solve: DMatrix<f64>,
}

impl G2Structure {
    pub fn new(coframe: CoframeAlgebra, phi: KForm) -> Result<Self> {
        let (metric, vol) = induce_metric(&phi)?;
        let stabilizer = g2_stabilizer(&phi, &metric)?;
        let star = (0..=DIM).map(|k| metric.star_matrix(k)).collect();
        let theta_phi = theta_matrix(&phi);
        let q = &stabilizer.q;
        let theta_q = DMatrix::from_fn(35, q.len(), |r, c| {
            theta_phi.row(r).dot(&linalg::flatten(&q[c]).transpose())
        });
        // rank 35 was checked by the stabilizer, so the square system is invertible
        let q_solve = theta_q
            .clone()
            .try_inverse()
            .unwrap_or_else(|| linalg::pseudo_inverse(&theta_q, 1e-10));
        Ok(G2Structure {
            coframe,
            phi,
            metric,
            vol,
            star,
            stabilizer,
            q_solve,
        })
    }

    pub fn from_lie(lie: &LieAlgebra7, phi: KForm) -> Result<Self> {
        Self::new(CoframeAlgebra::from_structure_constants(lie)?, phi)
    }

    pub fn coframe(&self) -> &CoframeAlgebra {
        &self.coframe
    }

    pub fn lie(&self) -> Option<&LieAlgebra7> {
        self.coframe.lie()
    }

    pub fn phi(&self) -> &KForm {
        &self.phi
    }

    pub fn metric(&self) -> &Metric7 {
        &self.metric
    }

    pub fn volume(&self) -> &KForm {
        &self.vol
    }

    pub fn stabilizer(&self) -> &Stabilizer {
        &self.stabilizer
    }

    pub fn star(&self, a: &KForm) -> KForm {
        forms::apply(&self.star[a.degree()], a, DIM - a.degree())
    }

    pub fn inner(&self, a: &KForm, b: &KForm) -> Result<f64> {
        self.metric.inner(a, b)
    }

    pub fn d(&self, a: &KForm) -> Result<KForm> {
        self.coframe.d(a)
    }

    /// `max |dφ|`.
    pub fn closed_residual(&self) -> f64 {
        self.coframe.d(&self.phi).expect("3-form").max_abs()
    }

    /// `θ(A)φ`.
    pub fn theta_phi(&self, a: &Matrix7) -> KForm {
        theta(a, &self.phi)
    }

    /// The unique `Q_ψ ∈ q` with `θ(Q_ψ)φ = ψ`.
    pub fn q_operator(&self, psi: &KForm) -> Result<Matrix7> {
        if psi.degree() != 3 {
            return Err(Error::DegreeMismatch(3, psi.degree()));
        }
        let x = &self.q_solve * DVector::from_column_slice(psi.coeffs());
        let mut q = Matrix7::zeros();
        for (xi, b) in x.iter().zip(&self.stabilizer.q) {
            q += b * *xi;
        }
        let residual = self.theta_phi(&q).dist(psi);
        if residual > 1e-9 * psi.max_abs().max(1.0) {
            return Err(Error::SingularSolve);
        }
        Ok(q)
    }

    /// `i(h) = -2θ(h)φ`.
    pub fn i_map(&self, h: &Matrix7) -> KForm {
        self.theta_phi(h).scaled(-2.0)
    }

    /// `j(ψ) = -2 tr(Q_ψ) I - 4 Q_ψ`, dropping the skew (`Λ³_7`) part of `Q_ψ`.
    pub fn j_map(&self, psi: &KForm) -> Result<Matrix7> {
        let q = self.metric.symmetric_part(&self.q_operator(psi)?);
        Ok(Matrix7::identity() * (-2.0 * q.trace()) - q * 4.0)
    }

    /// Endomorphism `T` with `τ(X,Y) = ⟨TX, Y⟩`.
    pub fn two_form_operator(&self, tau: &KForm) -> Matrix7 {
        let mut t = Matrix7::zeros();
        for (idx, c) in tau.terms() {
            let ij = idx.indices();
            t[(ij[0] - 1, ij[1] - 1)] = c;
            t[(ij[1] - 1, ij[0] - 1)] = -c;
        }
        -(self.metric.inverse() * t)
    }

    /// Eigenvalues (ascending) of a metric-self-adjoint operator.
    pub fn self_adjoint_eigenvalues(&self, op: &Matrix7) -> Vec<f64> {
        let l = self.metric.matrix().cholesky().expect("metric is SPD").l();
        let tensor = self.metric.matrix() * op;
        let tensor = (tensor + tensor.transpose()) * 0.5;
        let linv = l.try_inverse().expect("invertible");
        let s = linv * tensor * linv.transpose();
        let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Torsion of a closed structure and everything derived from it.
    pub fn torsion(&self) -> Result<TorsionPackage> {
        let scale = self.phi.max_abs().max(1.0);
        let closed = self.closed_residual();
        if closed > 1e-9 * scale {
            return Err(Error::NotClosed(closed));
        }
        let psi = self.star(&self.phi);
        let d_psi = self.d(&psi)?;
        let tau = -self.star(&d_psi);
        let tau_phi = tau.wedge(&self.phi)?;
        let d_star_residual = d_psi.dist(&tau_phi);

        let dtau = self.d(&tau)?;
        let tt = tau.wedge(&tau)?;
        let star_tt = self.star(&tt);
        let tau_norm2 = self.inner(&tau, &tau)?;
        let tau_matrix = self.two_form_operator(&tau);
        let tau_sq = tau_matrix * tau_matrix;
        let q_dtau = self.q_operator(&dtau)?;
        let q_star_tt = self.q_operator(&star_tt)?;

        let ricci = Matrix7::identity() * (-tau_norm2 / 6.0) + q_dtau - tau_sq * 0.5;
        let scalar = ricci.trace();
        let ricci_norm2 = self.metric.frobenius(&ricci, &ricci);
        let f = if ricci_norm2 > 1e-24 {
            Some(scalar * scalar / ricci_norm2)
        } else {
            None
        };
        Ok(TorsionPackage {
            tau,
            tau_matrix,
            tau_norm2,
            dtau,
            star_tau_tau: star_tt,
            q_dtau,
            q_star_tau_tau: q_star_tt,
            ricci,
            scalar,
            ricci_norm2,
            f,
            closed_residual: closed,
            d_star_phi_residual: d_star_residual,
        })
    }

    /// `Ric = ¼|τ|² I - ¼ j(dτ - ½∗(τ∧τ))`.
    pub fn ricci_via_j(&self, t: &TorsionPackage) -> Result<Matrix7> {
        let arg = t.dtau.axpy(-0.5, &t.star_tau_tau);
        Ok(Matrix7::identity() * (0.25 * t.tau_norm2) - self.j_map(&arg)? * 0.25)
    }

    /// `Ric = (¼|τ|² + ½tr Q_{dτ} - ¼tr Q_{∗(τ∧τ)}) I + Q_{dτ} - ½Q_{∗(τ∧τ)}`.
    pub fn ricci_via_q(&self, t: &TorsionPackage) -> Matrix7 {
        let c = 0.25 * t.tau_norm2 + 0.5 * t.q_dtau.trace() - 0.25 * t.q_star_tau_tau.trace();
        Matrix7::identity() * c + t.q_dtau - t.q_star_tau_tau * 0.5
    }

    /// Quadratic/ERP/eigenform classification.
    pub fn classify(&self, t: &TorsionPackage, tol: &Tolerances) -> ClassificationReport {
        let scale = t.tau_norm2.max(1.0);
        let parallel = t.tau.max_abs() < tol.parallel;

        let phi_norm2 = self.inner(&self.phi, &self.phi).expect("degree 3");
        let c = self.inner(&t.dtau, &self.phi).expect("degree 3") / phi_norm2;
        let eigen_residual = t.dtau.dist(&self.phi.scaled(c));
        let eigenform_c = (eigen_residual < tol.quadratic * scale).then_some(c);

        let erp_form = self
            .phi
            .scaled(t.tau_norm2 / 6.0)
            .axpy(1.0 / 6.0, &t.star_tau_tau);
        let erp_residual = t.dtau.dist(&erp_form);

        let (quadratic_q, quadratic_residual) = if parallel {
            (None, 0.0)
        } else {
            let tau_sq = t.tau_matrix * t.tau_matrix;
            let x = t.q_dtau + Matrix7::identity() * (t.tau_norm2 / 21.0);
            let y = Matrix7::identity() * (2.0 * t.tau_norm2 / 7.0) + tau_sq;
            let q = self.metric.frobenius(&x, &y) / self.metric.frobenius(&y, &y);
            let residual = (x - y * q).amax();
            ((residual < tol.quadratic * scale).then_some(q), residual)
        };
        let q_admissible =
            quadratic_q.map(|q| [0.0, 0.5, 1.0 / 6.0].iter().any(|v| (q - v).abs() < 1e-6));
        let erp = !parallel && erp_residual < tol.quadratic * scale;

        ClassificationReport {
            closed: t.closed_residual < tol.closed * self.phi.max_abs().max(1.0),
            parallel,
            eigenform_c,
            quadratic_q,
            trivially_quadratic: parallel,
            q_admissible,
            erp,
            f: t.f,
            f_ill_conditioned: t.ricci_norm2.sqrt() < 1e-6,
            tau_norm2: t.tau_norm2,
            ricci_eigenvalues: self.self_adjoint_eigenvalues(&t.ricci),
            residuals: ClassificationResiduals {
                closed: t.closed_residual,
                d_star_phi: t.d_star_phi_residual,
                eigenform: eigen_residual,
                quadratic: quadratic_residual,
                erp: erp_residual,
            },
        }
    }
}

/// Torsion 2-form and the curvature quantities built from it.
#[derive(Clone, Debug)]
pub struct TorsionPackage {
    /// `τ = -∗d∗φ`.
    pub tau: KForm,
    /// `τ` as the skew endomorphism `⟨τ·,·⟩`.
    pub tau_matrix: Matrix7,
    pub tau_norm2: f64,
    /// `dτ = Δφ`.
    pub dtau: KForm,
    pub star_tau_tau: KForm,
    pub q_dtau: Matrix7,
    pub q_star_tau_tau: Matrix7,
    /// Ricci operator, `-(1/6)|τ|² I + Q_{dτ} - ½τ²`.
    pub ricci: Matrix7,
    pub scalar: f64,
    /// `|Ric|² = tr(Ric Ricᵗ)`.
    pub ricci_norm2: f64,
    /// `R²/|Ric|²`; `None` at flat structures.
    pub f: Option<f64>,
    pub closed_residual: f64,
    /// `|d∗φ - τ∧φ|`.
    pub d_star_phi_residual: f64,
}

impl TorsionPackage {
    /// `τ²` as an endomorphism.
    pub fn tau_squared(&self) -> Matrix7 {
        self.tau_matrix * self.tau_matrix
    }

    /// `Δφ = dτ`.
    pub fn laplacian(&self) -> &KForm {
        &self.dtau
    }
}

/// `F = R²/|Ric|²`.
pub fn functional_f(t: &TorsionPackage) -> Result<f64> {
    t.f.ok_or(Error::Flat)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationResiduals {
    pub closed: f64,
    pub d_star_phi: f64,
    pub eigenform: f64,
    pub quadratic: f64,
    pub erp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub closed: bool,
    pub parallel: bool,
    /// `c` with `Δφ = cφ`, when `φ` is an eigenform.
    pub eigenform_c: Option<f64>,
    pub quadratic_q: Option<f64>,
    /// Parallel structures satisfy the quadratic identity for every `q`.
    pub trivially_quadratic: bool,
    /// Whether `q` lies in `{0, 1/2, 1/6}`, the only values possible for
    /// homogeneous non-parallel structures.
    pub q_admissible: Option<bool>,
    pub erp: bool,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub f_ill_conditioned: bool,
    pub tau_norm2: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub residuals: ClassificationResiduals,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::phi_canonical;

    #[test]
    fn canonical_metric_is_identity() {
        let (m, vol) = induce_metric(&phi_canonical()).unwrap();
        assert!((m.matrix() - Matrix7::identity()).amax() < 1e-12);
        assert!(vol.dist(&KForm::e(&[1, 2, 3, 4, 5, 6, 7])) < 1e-12);
        assert_eq!(m.orientation(), 1.0);
    }

    #[test]
    fn scaled_seventh_direction() {
        // replacing e^7 by 2e^7 is the pullback under diag(1,..,1,2)
        let mut s = Matrix7::identity();
        s[(6, 6)] = 2.0;
        let phi = phi_canonical().pullback(&s);
        let (m, _) = induce_metric(&phi).unwrap();
        let mut expected = Matrix7::identity();
        expected[(6, 6)] = 4.0;
        assert!((m.matrix() - expected).amax() < 1e-12);
    }

    #[test]
    fn zero_form_is_not_positive() {
        assert_eq!(induce_metric(&KForm::zero(3)), Err(Error::NonPositiveForm));
    }

    #[test]
    fn reversed_orientation() {
        let (m, vol) = induce_metric(&-phi_canonical()).unwrap();
        assert!((m.matrix() - Matrix7::identity()).amax() < 1e-12);
        assert_eq!(m.orientation(), -1.0);
        assert!(vol.dist(&KForm::parse("-e1234567").unwrap()) < 1e-12);
    }

    #[test]
    fn theta_examples() {
        let phi = phi_canonical();
        assert!(theta(&Matrix7::identity(), &phi).dist(&phi.scaled(-3.0)) < 1e-15);
        let mut e11 = Matrix7::zeros();
        e11[(0, 0)] = 1.0;
        let expected = -KForm::parse("e127 + e135 - e146").unwrap();
        assert!(theta(&e11, &phi).dist(&expected) < 1e-15);
    }

    #[test]
    fn stabilizer_of_canonical_form() {
        let m = Metric7::identity();
        let st = g2_stabilizer(&phi_canonical(), &m).unwrap();
        assert_eq!(st.g2.len(), 14);
        assert_eq!(st.q.len(), 35);
        assert_eq!(st.q_dims, [1, 7, 27]);
        assert_eq!(st.theta_q_rank, 35);
        for a in &st.g2 {
            assert!(theta(a, &phi_canonical()).max_abs() < 1e-12);
            // g2 ⊂ so(7)
            assert!((a + a.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn q_of_phi() {
        let cf = CoframeAlgebra::from_structure_constants(&LieAlgebra7::abelian()).unwrap();
        let s = G2Structure::new(cf, phi_canonical()).unwrap();
        let q = s.q_operator(&phi_canonical()).unwrap();
        assert!((q + Matrix7::identity() / 3.0).amax() < 1e-12);
        assert!(
            s.i_map(&Matrix7::identity())
                .dist(&phi_canonical().scaled(6.0))
                < 1e-12
        );
    }

    #[test]
    fn flat_structure() {
        let cf = CoframeAlgebra::from_structure_constants(&LieAlgebra7::abelian()).unwrap();
        let s = G2Structure::new(cf, phi_canonical()).unwrap();
        let t = s.torsion().unwrap();
        assert!(t.tau.is_zero(0.0));
        assert_eq!(t.ricci, Matrix7::zeros());
        assert_eq!(functional_f(&t), Err(Error::Flat));
        let r = s.classify(&t, &Tolerances::default());
        assert!(r.parallel && r.trivially_quadratic && !r.erp);
        assert_eq!(r.eigenform_c, Some(0.0));
    }

    #[test]
    fn non_closed_rejected() {
        let mut g = LieAlgebra7::abelian();
        g.add_bracket(1, 2, 3, 1.0);
        let s = G2Structure::from_lie(&g, phi_canonical()).unwrap();
        assert!(matches!(s.torsion(), Err(Error::NotClosed(_))));
    }
}
