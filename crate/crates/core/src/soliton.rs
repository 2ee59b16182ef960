//! Laplacian soliton detection for left-invariant closed G2-structures.
//!
//! A structure on a Lie algebra is a (semi-algebraic) soliton when
//! `Q_{dτ} = cI + ½(D + Dᵗ)` for some `c` and a derivation `D`; then
//! `Δφ = -3cφ + θ(D)φ`. `c > 0` is shrinking, `c = 0` steady, `c < 0`
//! expanding.

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::Matrix7;
use crate::g2::{G2Structure, Tolerances, TorsionPackage};
use crate::liecoframe::{derivations, DerivationSpace};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonKind {
    Shrinking,
    Steady,
    Expanding,
    Parallel,
    None,
}

impl SolitonKind {
    pub fn is_soliton(self) -> bool {
        !matches!(self, SolitonKind::None)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolitonKind::Shrinking => "shrinking",
            SolitonKind::Steady => "steady",
            SolitonKind::Expanding => "expanding",
            SolitonKind::Parallel => "parallel",
            SolitonKind::None => "none",
        }
    }
}

/// Witness of `Q_{dτ} = cI + ½(D + Dᵗ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonCertificate {
    pub kind: SolitonKind,
    pub c: f64,
    /// Constant in `Δφ = λφ + L_Xφ`, `λ = -3c`.
    pub lambda: f64,
    pub d: Matrix7,
    /// Max entry of `Q_{dτ} - cI - ½(D + Dᵗ)`.
    pub residual: f64,
    /// `Dᵗ` is a derivation too.
    pub algebraic: bool,
}

impl Serialize for SolitonCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Json<'a> {
            kind: SolitonKind,
            c: f64,
            lambda: f64,
            #[serde(rename = "D")]
            d: &'a [f64],
            residual: f64,
            algebraic: bool,
        }
        let flat = linalg::flatten(&self.d);
        Json {
            kind: self.kind,
            c: self.c,
            lambda: self.lambda,
            d: flat.as_slice(),
            residual: self.residual,
            algebraic: self.algebraic,
        }
        .serialize(serializer)
    }
}

/// Least-squares fit of `Q_{dτ}` by `cI + sym(D)`, `D ∈ Der(g)`, taking the
/// minimal-norm solution.
pub fn detect(s: &G2Structure, t: &TorsionPackage, tol: &Tolerances) -> Result<SolitonCertificate> {
    let lie = s.lie().ok_or(Error::NoLieAlgebra)?;
    let der = derivations(lie);
    detect_with(s, t, &der, tol)
}

/// [`detect`] with a precomputed derivation space.
pub fn detect_with(
    s: &G2Structure,
    t: &TorsionPackage,
    der: &DerivationSpace,
    tol: &Tolerances,
) -> Result<SolitonCertificate> {
    let lie = s.lie().ok_or(Error::NoLieAlgebra)?;
    let metric = s.metric();
    let mut cols = vec![linalg::flatten(&Matrix7::identity())];
    cols.extend(
        der.basis
            .iter()
            .map(|b| linalg::flatten(&metric.symmetric_part(b))),
    );
    let a = DMatrix::from_columns(&cols);
    let rhs = linalg::flatten(&t.q_dtau);
    let x = linalg::pseudo_inverse(&a, 1e-10) * rhs;

    let c = x[0];
    let mut d = Matrix7::zeros();
    for (coef, b) in x.iter().skip(1).zip(&der.basis) {
        d += b * *coef;
    }
    let residual = (t.q_dtau - Matrix7::identity() * c - metric.symmetric_part(&d)).amax();
    let scale = t.tau_norm2.max(1.0);
    let parallel = t.tau.max_abs() < tol.parallel;
    let kind = if parallel {
        SolitonKind::Parallel
    } else if residual >= tol.soliton * scale {
        SolitonKind::None
    } else if c.abs() < tol.steady * scale {
        SolitonKind::Steady
    } else if c > 0.0 {
        SolitonKind::Shrinking
    } else {
        SolitonKind::Expanding
    };
    let algebraic = kind.is_soliton()
        && lie.derivation_residual(&metric.adjoint(&d)) < 1e-8 * d.amax().max(1.0);
    Ok(SolitonCertificate {
        kind,
        c,
        lambda: -3.0 * c,
        d,
        residual,
        algebraic,
    })
}

/// Residual of the self-similarity identity `Δφ + 3cφ - θ(D)φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfSimilarCheck {
    pub residual: f64,
    /// `D` had a skew part; only its symmetric part was used, so the
    /// certificate is verified as a matrix identity only.
    pub symmetric_part_only: bool,
}

pub fn verify_selfsimilar(
    s: &G2Structure,
    t: &TorsionPackage,
    cert: &SolitonCertificate,
) -> SelfSimilarCheck {
    let sym = s.metric().symmetric_part(&cert.d);
    let skew = (cert.d - sym).amax();
    let rhs = s.theta_phi(&sym);
    let lhs = t.dtau.axpy(3.0 * cert.c, s.phi());
    SelfSimilarCheck {
        residual: lhs.dist(&rhs),
        symmetric_part_only: skew > 1e-9,
    }
}
