//! Rotationally symmetric model manifolds `g = dr^2 + f(r)^2 g_{S^{n-1}}`.
//!
//! The radial coordinate is the distance to the pole `O`, so every
//! geometric quantity reduces to a function of `r`.

mod config;
mod profile;
mod spline;

pub use config::{ProfileConfig, WarpConfig};
pub use profile::{GrowthFit, MetricProfile, Warp, WarpTable, WarpValue, GROWTH_RESIDUAL_THRESHOLD};
pub use spline::CubicSpline;

pub use profile::linear_fit;
