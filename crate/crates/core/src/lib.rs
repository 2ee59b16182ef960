//! Computational calculus of closed G2-structures on 7-dimensional Lie
//! algebras and invariant coframe algebras.
//!
//! * [`forms`]: exterior algebra, wedge, interior product, Hodge star.
//! * [`liecoframe`]: structure constants, the differential of invariant forms,
//!   derivations, Levi-Civita curvature of left-invariant metrics.
//! * [`g2`]: induced metric, the `θ`-action, Q-operators, torsion, Ricci,
//!   quadratic/ERP classification and the functional `F = R²/|Ric|²`.
//! * [`soliton`]: Laplacian soliton certificates `Q_{dτ} = cI + (D+Dᵗ)/2`.
//! * [`flow`]: Laplacian flow integration, closed-form soliton solutions and
//!   the `(a,b,c)` bracket flow.
//! * [`catalog`]: the explicit example families.
//! * [`cli`]: the command-line front end.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod flow;
pub mod forms;
pub mod g2;
pub mod liecoframe;
pub mod linalg;
pub mod soliton;

pub use error::{Error, Result};
pub use forms::{KForm, Matrix7, Metric7, MultiIndex, Vector7};
pub use g2::{ClassificationReport, G2Structure, Tolerances, TorsionPackage};
pub use liecoframe::{CoframeAlgebra, DerivationSpace, LieAlgebra7};
pub use soliton::{SolitonCertificate, SolitonKind};
