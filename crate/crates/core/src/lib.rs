//! Numerical engine for c-spectral constants of rotationally symmetric
//! (warped product) metrics `g = dt² + φ(t)² g_{S^{n-1}}`.
//!
//! The radial coordinate is always called `t` and is measured in arclength,
//! so the `dt²` coefficient is identically one. Metrics given in another
//! gauge are brought into this form with [`geometry::normalize_arclength`].
//!
//! Conventions used throughout:
//!
//! * `kappa` is the reciprocal `1/c` of the curvature coupling `c`, with
//!   `0 <= kappa < 4`. `kappa == 0` is the pointwise scalar curvature mode.
//! * `lambda` is the spectral target `Λ`. When `kappa == 0` the same field
//!   holds the rescaled target `Λ̃ = κΛ`, which stays finite in the limit.

pub mod closedform;
pub mod error;
pub mod extrapolate;
pub mod geometry;
pub mod harmonic3d;
mod interp;
mod pencil;
pub mod profile;
pub mod residual;
pub mod spectral;

pub use closedform::{ModelConstants, SpectralParams};
pub use error::{Error, Result};
pub use geometry::{CurvatureReport, Domination, DriftReport, Warp, WarpTable, WarpedMetric};
pub use harmonic3d::{HarmonicProfile, ModelRelationReport, RelationCheck};
pub use profile::{ProfileLabel, RadialProfile};
pub use spectral::{Discretization, EigenSolution, Schedule};
