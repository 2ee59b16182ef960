use thiserror::Error;

/// Errors raised by the exterior-algebra, Lie-algebra and G2 routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree overflow: {0} exceeds 7")]
    DegreeOverflow(usize),
    #[error("interior product of a 0-form")]
    InteriorOfFunction,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("non-positive 3-form")]
    NonPositiveForm,
    #[error("Jacobi identity fails on (e{i}, e{j}, e{k}) with residual {residual:e}")]
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
    },
    #[error("torsion formulas require dphi=0 (residual {0:e})")]
    NotClosed(f64),
    #[error("F undefined at flat structures")]
    Flat,
    #[error("derivation space unavailable: coframe has no underlying Lie algebra")]
    NoLieAlgebra,
    #[error("singular linear solve")]
    SingularSolve,
    #[error("past singularity time T = {0}")]
    PastSingularity(f64),
    #[error("|tau|^2 = {0:e} exceeded the blow-up threshold")]
    BlowUp(f64),
    #[error("degenerate plane")]
    DegeneratePlane,
    #[error("family convention mismatch: no closed arrangement found")]
    ConventionMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Errors caused by the input itself rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DegreeOverflow(_)
                | Error::InteriorOfFunction
                | Error::DegreeMismatch(..)
                | Error::NotPositiveDefinite
                | Error::NonPositiveForm
                | Error::Jacobi { .. }
                | Error::NotClosed(_)
                | Error::NoLieAlgebra
                | Error::ConventionMismatch
                | Error::Invalid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
