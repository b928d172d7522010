//! Finite-volume discretization of the radial conformal Laplacian on an
//! arbitrary increasing node set.
//!
//! Each node owns the dual cell between the neighbouring midpoints, with
//! volume `m_i = ∫ ω f^{n-1} dr` over that cell. Edge `e = (i, i+1)` carries
//! `k_e = ω f(r_{e+1/2})^{n-1} / (r_{i+1} - r_i)`. The discrete energy is
//!
//! `E(u) = Σ_e k_e (u_{i+1} - u_i)^2 + Σ_i m_i c(n) R(r_i) u_i^2`
//!
//! and the Laplacian is the matching flux difference divided by `m_i`, so
//! summation by parts holds exactly. A node at `r = 0` has a one-sided cell
//! and no inner flux, which enforces `u'(0) = 0`.

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::manifold::MetricProfile;
use crate::quadrature::gauss8;

#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub(crate) nodes: Vec<f64>,
    pub(crate) mass: Vec<f64>,
    pub(crate) stiff: Vec<f64>,
    pub(crate) potential: Vec<f64>,
}

impl RadialOperator {
    pub fn new(nodes: Vec<f64>, profile: &MetricProfile) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] < 0.0 {
            return Err(Error::InvalidGrid("nodes must be nonnegative and strictly increasing".into()));
        }
        let last = *nodes.last().unwrap();
        if last > profile.r_max() * (1.0 + 1e-12) {
            return Err(Error::GridMismatch(format!(
                "grid reaches r = {last} beyond the profile's r_max = {}",
                profile.r_max()
            )));
        }
        let dens = |r: f64| profile.area_density(r);
        let m = nodes.len();
        let mut mass = vec![0.0; m];
        let mut stiff = vec![0.0; m - 1];
        for e in 0..m - 1 {
            let (a, b) = (nodes[e], nodes[e + 1]);
            let mid = 0.5 * (a + b);
            stiff[e] = dens(mid) / (b - a);
            mass[e] += gauss8(&dens, a, mid);
            mass[e + 1] += gauss8(&dens, mid, b);
        }
        let c = profile.dim().conformal_coefficient();
        let potential = nodes.iter().map(|r| c * profile.curvature_unchecked(*r)).collect();
        Ok(RadialOperator { nodes, mass, stiff, potential })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn has_pole(&self) -> bool {
        self.nodes[0] == 0.0
    }

    pub fn gradient_energy(&self, u: &[f64]) -> f64 {
        self.stiff.iter().enumerate().map(|(e, k)| k * (u[e + 1] - u[e]).powi(2)).sum()
    }

    pub fn potential_energy(&self, u: &[f64]) -> f64 {
        self.mass.iter().zip(&self.potential).zip(u).map(|((m, v), x)| m * v * x * x).sum()
    }

    /// `E(u)`, the discrete `∫ |∇u|^2 + c(n) R u^2 dV`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.gradient_energy(u) + self.potential_energy(u)
    }

    /// `Σ m_i |u_i|^s`.
    pub fn power_sum(&self, u: &[f64], s: f64) -> f64 {
        self.mass.iter().zip(u).map(|(m, x)| m * x.abs().powf(s)).sum()
    }

    pub fn lp_norm(&self, u: &[f64], s: f64) -> f64 {
        self.power_sum(u, s).powf(1.0 / s)
    }

    /// `Σ_e k_e (u_{i+1} - u_i)(φ_{i+1} - φ_i)` for all hat functions `φ = e_i`:
    /// the weak form of `-Δu` tested against each node.
    pub fn weak_neg_laplacian(&self, u: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut out = vec![0.0; m];
        for e in 0..m - 1 {
            let flux = self.stiff[e] * (u[e + 1] - u[e]);
            out[e] -= flux;
            out[e + 1] += flux;
        }
        out
    }

    /// Strong-form discrete Laplacian `(flux_{i+1/2} - flux_{i-1/2}) / m_i` at
    /// every node that owns a full cell (all but the last, and the first
    /// unless it is the pole).
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let w = self.weak_neg_laplacian(u);
        w.iter().zip(&self.mass).map(|(a, m)| -a / m).collect()
    }

    /// Tridiagonal matrix of the quadratic form `E` restricted to `free`
    /// indices, all other nodes held at zero.
    pub fn stiffness(&self, free: std::ops::Range<usize>) -> Tridiagonal {
        let m = self.len();
        let diag = free
            .clone()
            .map(|i| {
                let left = if i > 0 { self.stiff[i - 1] } else { 0.0 };
                let right = if i + 1 < m { self.stiff[i] } else { 0.0 };
                left + right + self.mass[i] * self.potential[i]
            })
            .collect();
        let off = free.clone().take(free.len().saturating_sub(1)).map(|i| -self.stiff[i]).collect();
        Tridiagonal::symmetric(diag, off)
    }
}
