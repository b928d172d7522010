use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of intervals.
pub const MIN_INTERVALS: usize = 32;

/// Uniform grid `r_i = i h`, `h = j / N`, discretizing the geodesic ball `B_j(O)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radius: f64,
    intervals: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("outer radius must be positive, got {radius}")));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_INTERVALS} intervals, got {intervals}"
            )));
        }
        Ok(RadialGrid { radius, intervals })
    }

    /// Grid with `ceil(per_unit * radius)` intervals (at least the minimum).
    pub fn with_density(radius: f64, per_unit: f64) -> Result<Self> {
        let n = (per_unit * radius).ceil().max(MIN_INTERVALS as f64) as usize;
        Self::new(radius, n)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.radius / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.radius
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Same spacing, `factor` times the radius (used for extension by zero).
    pub fn extended(&self, factor: usize) -> RadialGrid {
        RadialGrid { radius: self.radius * factor as f64, intervals: self.intervals * factor }
    }
}
