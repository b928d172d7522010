//! Dimension-dependent constants shared by every module.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Manifold dimension `n >= 3` together with the constants of the
/// conformal Laplacian that depend only on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 3, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    pub fn nf(self) -> f64 {
        self.0 as f64
    }

    /// `c(n) = (n-2) / (4(n-1))`.
    pub fn conformal_coefficient(self) -> f64 {
        let n = self.nf();
        (n - 2.0) / (4.0 * (n - 1.0))
    }

    /// `p = 2n / (n-2)`.
    pub fn critical_exponent(self) -> f64 {
        let n = self.nf();
        2.0 * n / (n - 2.0)
    }

    /// Area of the unit `(n-1)`-sphere, the angular factor of every radial integral.
    pub fn angular_area(self) -> f64 {
        sphere_area(self.0 - 1)
    }

    /// Best Sobolev constant `n(n-2)/4 * |S^n|^{2/n}`.
    pub fn sobolev_constant(self) -> f64 {
        let n = self.nf();
        n * (n - 2.0) / 4.0 * sphere_area(self.0).powf(2.0 / n)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

/// `Gamma(k/2)`, exact for every positive integer `k` via the half-integer recurrence.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Gamma(0) is undefined");
    let (mut g, start) = if k.is_multiple_of(2) { (1.0, 2) } else { (PI.sqrt(), 1) };
    let mut m = start;
    while m < k {
        g *= m as f64 / 2.0;
        m += 2;
    }
    g
}

/// Area of the unit `k`-sphere `S^k ⊂ R^{k+1}`: `2 π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: u32) -> f64 {
    2.0 * PI.powf((k + 1) as f64 / 2.0) / gamma_half(k + 1)
}
