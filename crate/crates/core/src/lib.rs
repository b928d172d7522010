//! Numerical Yamabe problem on rotationally symmetric model manifolds.

// Guards are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod dimension;
pub mod error;
pub mod exhaustion;
pub mod functional;
pub mod manifold;
pub mod radial;
pub mod subcritical;

mod linalg;
mod quadrature;

pub use dimension::Dimension;
pub use error::{Error, Result};

/// Crate version, recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
