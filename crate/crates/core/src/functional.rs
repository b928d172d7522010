//! Yamabe quotients on balls, annuli and bubble test functions.

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::manifold::MetricProfile;
use crate::quadrature::{gauss8, graded};
use crate::radial::{RadialGrid, RadialOperator};
use crate::subcritical::{continuation_on, descend_on, newton_on, residual_on, NewtonOutcome, SolverConfig};

/// Best Sobolev constant `Λ = n(n-2)/4 · |S^n|^{2/n}`.
pub fn lambda_constant(n: u32) -> Result<f64> {
    Ok(Dimension::new(n)?.sobolev_constant())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Bubble { alpha: f64, eps: f64 },
}

/// `Q_s = E / ‖·‖_s^2` together with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub domain: Domain,
    pub s: f64,
    pub energy: f64,
    pub norm: f64,
    pub quotient: f64,
}

impl QuotientReport {
    fn new(domain: Domain, s: f64, energy: f64, norm: f64) -> Result<Self> {
        if !(norm > 0.0) {
            return Err(Error::InvalidField("quotient of a field with zero norm".into()));
        }
        Ok(QuotientReport { domain, s, energy, norm, quotient: energy / (norm * norm) })
    }
}

/// Test function `η u_α` centred at the pole, `u_α = (α / (α^2 + r^2))^{(n-2)/2}`,
/// with `η = 1` on `B_ε` and `η = 0` outside `B_{2ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    pub alpha: f64,
    pub eps: f64,
}

impl BubbleSpec {
    pub fn new(alpha: f64, eps: f64) -> Result<Self> {
        if !(alpha > 0.0 && eps > 0.0 && alpha <= eps) {
            return Err(Error::InvalidArgument(format!("bubble needs 0 < alpha <= eps, got alpha = {alpha}, eps = {eps}")));
        }
        Ok(BubbleSpec { alpha, eps })
    }

    /// `(η u_α, (η u_α)')` at `r`.
    pub fn eval(&self, n: Dimension, r: f64) -> (f64, f64) {
        let (a, e) = (self.alpha, self.eps);
        let k = 0.5 * (n.nf() - 2.0);
        let q = a * a + r * r;
        let u = (a / q).powf(k);
        let du = -2.0 * k * r / q * u;
        let (eta, deta) = cutoff((2.0 * e - r) / e);
        (eta * u, eta * du - deta / e * u)
    }
}

/// Smooth step `ψ(t)`: 0 for `t <= 0`, 1 for `t >= 1`; returns `(ψ, ψ')`.
fn cutoff(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    let s = a + b;
    (a / s, (da * s - a * (da + db)) / (s * s))
}

/// `Q_s(η u_α)` by Gauss–Legendre panels on the cells of `grid`, which must
/// cover `[0, 2ε]` and place at least 16 nodes in `r <= α`.
pub fn bubble_quotient(profile: &MetricProfile, spec: &BubbleSpec, s: f64, grid: &RadialGrid) -> Result<QuotientReport> {
    let BubbleSpec { alpha, eps } = *spec;
    if 2.0 * eps > profile.r_max() {
        return Err(Error::InvalidArgument(format!("2 eps = {} exceeds r_max = {}", 2.0 * eps, profile.r_max())));
    }
    if grid.radius() < 2.0 * eps {
        return Err(Error::GridMismatch(format!("grid radius {} does not cover 2 eps = {}", grid.radius(), 2.0 * eps)));
    }
    let inside = (alpha / grid.h()).floor() as usize + 1;
    if inside < 16 {
        let required = (15.0 * grid.radius() / alpha).ceil() as usize;
        return Err(Error::GridTooCoarse { inside, required });
    }
    let n = profile.dim();
    let c = n.conformal_coefficient();
    let energy_density = |r: f64| {
        let (v, dv) = spec.eval(n, r);
        (dv * dv + c * profile.curvature_unchecked(r) * v * v) * profile.area_density(r)
    };
    let power_density = |r: f64| spec.eval(n, r).0.abs().powf(s) * profile.area_density(r);
    let cells = ((2.0 * eps) / grid.h()).ceil() as usize;
    let (mut energy, mut power) = (0.0, 0.0);
    for k in 0..cells {
        let a = k as f64 * grid.h();
        let b = ((k + 1) as f64 * grid.h()).min(2.0 * eps);
        energy += gauss8(&energy_density, a, b);
        power += gauss8(&power_density, a, b);
    }
    QuotientReport::new(Domain::Bubble { alpha, eps }, s, energy, power.powf(1.0 / s))
}

/// Settings for [`exterior_quotient`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExteriorConfig {
    /// Relative change in the quotient below which `R_out` is considered large enough.
    pub tol_out: f64,
    /// Nodes per unit of `log r` on the geometric annulus grid.
    pub nodes_per_efold: f64,
    /// Upper limit for `R_out` (also capped by the profile's `r_max`).
    pub r_out_max: f64,
}

impl Default for ExteriorConfig {
    fn default() -> Self {
        ExteriorConfig { tol_out: 1e-3, nodes_per_efold: 128.0, r_out_max: 1e8 }
    }
}

/// Estimate of `Y(M \ B_{r_in})` in the radial class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorReport {
    pub report: QuotientReport,
    /// `(R_out, quotient)` for every outer radius tried.
    pub history: Vec<(f64, f64)>,
    pub last_change: f64,
}

fn annulus_nodes(r_in: f64, r_out: f64, per_efold: f64) -> Vec<f64> {
    let k = ((r_out / r_in).ln() * per_efold).ceil().max(32.0) as usize;
    let d = (r_out / r_in).ln() / k as f64;
    (0..=k).map(|i| if i == k { r_out } else { r_in * (i as f64 * d).exp() }).collect()
}

/// Minimizes `Q_s` over radial fields vanishing at `r_in` and `R_out`,
/// doubling `R_out` from `r_out` until the value changes by less than `tol_out`.
pub fn exterior_quotient(
    profile: &MetricProfile,
    r_in: f64,
    r_out: f64,
    s: f64,
    solver: &SolverConfig,
    cfg: &ExteriorConfig,
) -> Result<ExteriorReport> {
    let p = profile.dim().critical_exponent();
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::InvalidArgument(format!("annulus needs 0 < r_in < R_out, got [{r_in}, {r_out}]")));
    }
    if !(s > 2.0 && s <= p) {
        return Err(Error::InvalidArgument(format!("exponent s = {s} outside (2, {p}]")));
    }
    let limit = profile.r_max().min(cfg.r_out_max);
    if r_out > limit {
        return Err(Error::InvalidArgument(format!("R_out = {r_out} exceeds the usable radius {limit}")));
    }
    let mut scfg = solver.clone();
    scfg.concentration_cap = f64::INFINITY;
    scfg.core_cells = 0.0;
    let mut schedule: Vec<f64> = solver.schedule(p).into_iter().filter(|x| *x < s).collect();
    schedule.push(s);

    let mut history = Vec::new();
    let mut outer = r_out;
    let mut warm: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut last_change = f64::INFINITY;
    loop {
        let nodes = annulus_nodes(r_in, outer, cfg.nodes_per_efold);
        let op = RadialOperator::new(nodes.clone(), profile)?;
        let free = 1..nodes.len() - 1;
        let from_warm = warm.as_ref().and_then(|(old_nodes, old_u)| {
            let mut u0 = vec![0.0; nodes.len()];
            // Old grid is a prefix of the new one up to rounding; interpolate to be safe.
            for (i, r) in nodes.iter().enumerate() {
                u0[i] = interpolate(old_nodes, old_u, *r);
            }
            solve_warm(&op, &free, s, &u0, &scfg)
        });
        let sol = match from_warm {
            Some(sol) => sol,
            None => {
                let (runs, _, _) = continuation_on(&op, &free, p, &schedule, &scfg)?;
                let (last_s, last) = runs.into_iter().last().expect("nonempty schedule");
                if last_s != s {
                    return Err(Error::NoConvergence {
                        iters: 0,
                        residual: last.residual,
                        last_iterate: last.u,
                        multiplier: last.lambda,
                    });
                }
                last
            }
        };
        let q = sol.lambda;
        if let Some((_, prev)) = history.last() {
            last_change = ((q - prev) / prev).abs();
        }
        history.push((outer, q));
        if last_change < cfg.tol_out {
            let norm = op.lp_norm(&sol.u, s);
            let report = QuotientReport::new(Domain::Annulus { inner: r_in, outer }, s, op.energy(&sol.u), norm)?;
            return Ok(ExteriorReport { report, history, last_change });
        }
        if 2.0 * outer > limit {
            return Err(Error::ExteriorNotStable { r_max: limit, last_change });
        }
        warm = Some((nodes, sol.u));
        outer *= 2.0;
    }
}

/// Newton from `u0`; on a long annulus the translation mode can pull it onto a
/// sign-changing critical point, so retry after a projected descent and keep
/// the descent field itself when it is already close to stationary.
fn solve_warm(op: &RadialOperator, free: &std::ops::Range<usize>, s: f64, u0: &[f64], cfg: &SolverConfig) -> Option<NewtonOutcome> {
    if let Ok(sol) = newton_on(op, free, s, u0, cfg) {
        return Some(sol);
    }
    let u = descend_on(op, free, s, u0, cfg.tol, 20_000).ok()?;
    if let Ok(sol) = newton_on(op, free, s, &u, cfg) {
        return Some(sol);
    }
    let lambda = op.energy(&u);
    let residual = residual_on(op, free, &u, lambda, s);
    (residual < 1e-4).then_some(NewtonOutcome { u, lambda, residual, iterations: 0 })
}

/// Piecewise-linear interpolation, zero outside the node range.
fn interpolate(nodes: &[f64], u: &[f64], r: f64) -> f64 {
    if r <= nodes[0] || r >= nodes[nodes.len() - 1] {
        return 0.0;
    }
    let k = nodes.partition_point(|x| *x <= r) - 1;
    let t = (r - nodes[k]) / (nodes[k + 1] - nodes[k]);
    u[k] * (1.0 - t) + u[k + 1] * t
}

/// `-c(n) ‖(R_g)_-‖_{L^{n/2}(B_{R_out})}`.
///
/// The integral is split at `R_out / 2`; when the outer half carries more
/// than `1e-3` of the total the tail is declared divergent.
pub fn scalar_lower_bound(profile: &MetricProfile, r_out: f64) -> Result<f64> {
    if !(r_out > 0.0 && r_out <= profile.r_max()) {
        return Err(Error::OutOfDomain { r: r_out, r_max: profile.r_max() });
    }
    let n = profile.dim();
    let q = 0.5 * n.nf();
    let density = |r: f64| {
        let neg = (-profile.curvature_unchecked(r)).max(0.0);
        if neg == 0.0 {
            0.0
        } else {
            neg.powf(q) * profile.area_density(r)
        }
    };
    let half = 0.5 * r_out;
    let inner = negative_part_integral(&density, 0.0, half);
    let outer = negative_part_integral(&density, half, r_out);
    let total = inner + outer;
    if total == 0.0 {
        return Ok(0.0);
    }
    let tail_share = outer / total;
    if tail_share > 1e-3 {
        return Err(Error::DivergentTail { tail_share, half, r_out });
    }
    Ok(-n.conformal_coefficient() * total.powf(1.0 / q))
}

fn negative_part_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let first = 1e-3_f64.max(1e-4 * (b - a)).min(b - a);
    graded(f, a, b, first, 1.01)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn lambda_values() {
        assert_relative_eq!(lambda_constant(3).unwrap(), 0.75 * (2.0 * PI * PI).powf(2.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(lambda_constant(4).unwrap(), 2.0 * (8.0 * PI * PI / 3.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(lambda_constant(6).unwrap(), 6.0 * (16.0 * PI.powi(3) / 15.0).powf(1.0 / 3.0), max_relative = 1e-14);
        assert!(lambda_constant(2).is_err());
    }

    #[test]
    fn cutoff_is_smooth_step() {
        assert_eq!(cutoff(-0.1), (0.0, 0.0));
        assert_eq!(cutoff(1.1), (1.0, 0.0));
        let (v, _) = cutoff(0.5);
        assert_relative_eq!(v, 0.5, epsilon = 1e-15);
        let h = 1e-6;
        let fd = (cutoff(0.3 + h).0 - cutoff(0.3 - h).0) / (2.0 * h);
        assert_relative_eq!(cutoff(0.3).1, fd, max_relative = 1e-7);
    }

    #[test]
    fn flat_bubble_near_lambda() {
        let p = MetricProfile::euclidean(3, 10.0).unwrap();
        let spec = BubbleSpec::new(0.02, 0.5).unwrap();
        let g = RadialGrid::new(1.0, 2000).unwrap();
        let q = bubble_quotient(&p, &spec, 6.0, &g).unwrap();
        let lam = lambda_constant(3).unwrap();
        assert!(q.quotient > lam && q.quotient < 1.15 * lam, "{}", q.quotient);
    }

    #[test]
    fn coarse_grid_refused() {
        let p = MetricProfile::euclidean(3, 10.0).unwrap();
        let spec = BubbleSpec::new(0.02, 0.5).unwrap();
        let g = RadialGrid::new(1.0, 100).unwrap();
        match bubble_quotient(&p, &spec, 6.0, &g) {
            Err(Error::GridTooCoarse { required, .. }) => {
                let g = RadialGrid::new(1.0, required).unwrap();
                assert!(bubble_quotient(&p, &spec, 6.0, &g).is_ok());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_bounds() {
        let flat = MetricProfile::euclidean(3, 1e6).unwrap();
        assert_eq!(scalar_lower_bound(&flat, 1e3).unwrap(), 0.0);
        let hyp = MetricProfile::hyperbolic(3, 50.0).unwrap();
        assert!(matches!(scalar_lower_bound(&hyp, 40.0), Err(Error::DivergentTail { .. })));
    }
}
