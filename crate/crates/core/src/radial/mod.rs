//! Radial grids, fields and the discrete calculus on them.

mod field;
mod grid;
mod operator;
mod ops;

pub use field::{Boundary, RadialField};
pub use grid::{RadialGrid, MIN_INTERVALS};
pub use operator::RadialOperator;
pub use ops::{gradient_energy, laplace_beltrami, lp_norm, operator_for, yamabe_energy};
