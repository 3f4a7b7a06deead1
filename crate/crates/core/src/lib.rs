//! Divergence equation `div U = f` on an annulus `R1 < |x| < R2` in two and
//! three dimensions, with `U = 0` on both boundary spheres.
//!
//! The pipeline is: boundary traces of `f`, the quadratic radial correction
//! `Q` ([`coefficients`]), the radial moment of `f - Q` on a sphere grid, a
//! mean-zero sphere solve ([`sphere`]) and the assembled field
//! ([`assembly`]). [`verify`] checks the result numerically.

pub mod assembly;
pub mod coefficients;
pub mod domain;
pub mod error;
pub mod quadrature;
pub mod source;
pub mod sphere;
pub mod verify;

pub use assembly::{assemble_solution, Resolution, SolutionField};
pub use coefficients::{build_correction, CorrectionCoefficients, CorrectionOrder};
pub use domain::AnnulusDomain;
pub use error::{Error, Result};
pub use source::{CatalogSource, RadialTerm, Source, SourceSpec};
pub use verify::{run_suite, VerificationReport, VerifyConfig};
