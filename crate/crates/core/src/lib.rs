//! Two-stage regression with deterministically assigned hidden parameters.
//!
//! The `ltdahp` scheme fixes the nonlinear ("hidden") parameters of a
//! shallow sigmoid network without looking at the targets: inner weights are
//! placed at well-separated points on the unit sphere (centers of a recursive
//! zonal equal-area partition, which approximate minimal Riesz-energy
//! configurations) and thresholds on a fixed grid in `[-1/2, 1/2]`. Only the
//! linear ("bright") coefficients are learned, by ridge least squares, so a
//! fit is a single deterministic linear solve. The crate also ships the
//! classical random-assignment baseline (`ltrahp`), k-fold cross-validation
//! for model selection, and a benchmark harness for synthetic studies.
//!
//! Core math is generic over the scalar type via [`scalar::Real`]; the
//! aliases at the crate root pin the default `f64` precision used by the CLI.

pub mod activation;
pub mod bench;
pub mod error;
pub mod estimator;
pub mod features;
pub mod modelsel;
pub mod scalar;
pub mod solver;
pub mod sphere;

pub use error::{Error, Result};
pub use scalar::{Real, SolverReal};

// Downstream crates build inputs with the same array types.
pub use ndarray;

/// Default-precision sphere configuration.
pub type SphereConfig64 = sphere::SphereConfig<f64>;
/// Default-precision hypothesis space.
pub type HypothesisSpec64 = features::HypothesisSpec<f64>;
/// Default-precision fitted model.
pub type Model64 = estimator::Model<f64>;
/// Default-precision dataset.
pub type Dataset64 = estimator::Dataset<f64>;
