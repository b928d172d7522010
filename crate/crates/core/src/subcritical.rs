//! Constrained minimization of `Q_s(u) = E(u) / ‖u‖_s^2` on a ball and the
//! continuation `s → p`.
//!
//! The discrete Euler–Lagrange system `A u = λ M |u|^{s-2} u`,
//! `Σ m_i |u_i|^s = 1` is solved by Newton's method on `(u, λ)` with the
//! normalization appended as an extra equation. All radial problems share
//! the same finite-volume operator, so the solver works on any node set with
//! a contiguous block of free nodes.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_bordered;
use crate::manifold::MetricProfile;
use crate::radial::{Boundary, RadialField, RadialGrid, RadialOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Euler–Lagrange residual tolerance.
    pub tol: f64,
    pub max_iters: usize,
    pub max_halvings: u32,
    /// `s_max = p (1 - eps_s)`.
    pub eps_s: f64,
    /// First exponent of the schedule (clamped into `(2, p)`).
    pub s_start: f64,
    pub schedule_len: usize,
    /// Concentration is flagged once `max u_s` exceeds this multiple of the first maximum.
    pub concentration_cap: f64,
    /// ... or once the half-maximum radius falls below this many local cells.
    pub core_cells: f64,
    // A solve that fails after step refinement also counts as concentration when the core is
    // under `2 core_cells` cells or the maximum has grown past `sqrt(concentration_cap)`.
    /// Solve the critical problem `s = p` after a continuation without concentration.
    pub critical_solve: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_iters: 60,
            max_halvings: 20,
            eps_s: 1e-3,
            s_start: 2.1,
            schedule_len: 16,
            concentration_cap: 1e3,
            core_cells: 8.0,
            critical_solve: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return bad("solver.tol must lie in (0, 1e-2)");
        }
        if self.max_iters == 0 {
            return bad("solver.max_iters must be positive");
        }
        if !(self.eps_s > 0.0 && self.eps_s < 0.5) {
            return bad("solver.eps_s must lie in (0, 0.5)");
        }
        if self.schedule_len < 3 {
            return bad("solver.schedule_len must be at least 3");
        }
        if !(self.s_start > 2.0) {
            return bad("solver.s_start must exceed 2");
        }
        if !(self.concentration_cap > 1.0 && self.core_cells >= 0.0) {
            return bad("solver.concentration_cap must exceed 1 and solver.core_cells be nonnegative");
        }
        Ok(())
    }

    /// Increasing exponents from `s_start` to `p (1 - eps_s)`, geometric in `p - s`.
    pub fn schedule(&self, p: f64) -> Vec<f64> {
        let s0 = self.s_start.min(2.0 + 0.5 * (p - 2.0));
        let d0 = p - s0;
        let d1 = p * self.eps_s;
        let k = self.schedule_len;
        (0..k)
            .map(|i| p - d0 * (d1 / d0).powf(i as f64 / (k - 1) as f64))
            .collect()
    }
}

/// A converged minimizer `u_s` on `B_j` with `‖u_s‖_{L^s} = 1`.
#[derive(Debug, Clone)]
pub struct SubcriticalSolution {
    pub field: RadialField,
    pub lambda: f64,
    pub s: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Outcome of a Newton solve on a node set.
#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn normalize(op: &RadialOperator, u: &mut [f64], s: f64) {
    let n = op.lp_norm(u, s);
    if n > 0.0 {
        u.iter_mut().for_each(|v| *v /= n);
    }
}

/// `sqrt(Σ_free F_i^2 / m_i)` with `F = A u - λ M |u|^{s-2} u`: the discrete
/// `L^2` norm of `Δu - c(n) R u + λ |u|^{s-2} u` on the free nodes.
pub(crate) fn residual_on(op: &RadialOperator, free: &Range<usize>, u: &[f64], lambda: f64, s: f64) -> f64 {
    let w = op.weak_neg_laplacian(u);
    free.clone()
        .map(|i| {
            let m = op.mass[i];
            let f = w[i] + m * op.potential[i] * u[i] - lambda * m * u[i].abs().powf(s - 2.0) * u[i];
            f * f / m
        })
        .sum::<f64>()
        .sqrt()
}

/// Lowest eigenpair of `A w = μ M w` on the free nodes by shifted inverse
/// iteration; `w` is positive with maximum 1.
pub(crate) fn lowest_eigen(op: &RadialOperator, free: &Range<usize>) -> Result<(f64, Vec<f64>)> {
    let span = op.nodes[free.end.min(op.len() - 1)] - op.nodes[free.start.saturating_sub(1)];
    let vmin = free.clone().map(|i| op.potential[i]).fold(f64::INFINITY, f64::min);
    let sigma = vmin - 1.0 / (span * span);
    let mut a = op.stiffness(free.clone());
    for (k, i) in free.clone().enumerate() {
        a.diag[k] -= sigma * op.mass[i];
    }
    let lu = a.factor()?;
    let m: Vec<f64> = free.clone().map(|i| op.mass[i]).collect();
    let mut w: Vec<f64> = vec![1.0; free.len()];
    let mut mu = f64::NAN;
    for _ in 0..500 {
        let rhs: Vec<f64> = w.iter().zip(&m).map(|(x, mi)| x * mi).collect();
        let mut next = lu.solve(&rhs);
        let scale = next.iter().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { *v } else { acc });
        next.iter_mut().for_each(|v| *v /= scale);
        // Rayleigh quotient of the unshifted pencil.
        let full = embed(op.len(), free, &next);
        let num = op.energy(&full);
        let den: f64 = next.iter().zip(&m).map(|(x, mi)| x * x * mi).sum();
        let mu_next = num / den;
        let change: f64 = next.iter().zip(&w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        w = next;
        let done = (mu_next - mu).abs() <= 1e-14 * mu_next.abs().max(1.0) && change < 1e-12;
        mu = mu_next;
        if done {
            break;
        }
    }
    Ok((mu, embed(op.len(), free, &w)))
}

fn embed(len: usize, free: &Range<usize>, x: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; len];
    full[free.clone()].copy_from_slice(x);
    full
}

/// Newton's method on `(u, λ)`; `u0` is a full-length vector (non-free nodes
/// are ignored and kept at zero).
pub(crate) fn newton_on(
    op: &RadialOperator,
    free: &Range<usize>,
    s: f64,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<NewtonOutcome> {
    let mut u = vec![0.0; op.len()];
    u[free.clone()].copy_from_slice(&u0[free.clone()]);
    normalize(op, &mut u, s);
    let mut lambda = op.energy(&u);
    let mut res = residual_on(op, free, &u, lambda, s);
    let base = op.stiffness(free.clone());
    let mut iters = 0;
    while res > cfg.tol {
        if iters == cfg.max_iters {
            return Err(Error::NoConvergence { iters, residual: res, last_iterate: u, multiplier: lambda });
        }
        iters += 1;
        let w = op.weak_neg_laplacian(&u);
        // Symmetric mass scaling keeps round-off uniform across the pole and the far field.
        let mut jac = base.clone();
        let sq: Vec<f64> = free.clone().map(|i| op.mass[i].sqrt()).collect();
        let mut c = Vec::with_capacity(free.len());
        let mut f = Vec::with_capacity(free.len());
        for (k, i) in free.clone().enumerate() {
            let m = op.mass[i];
            let a = u[i].abs().powf(s - 2.0);
            jac.diag[k] = (jac.diag[k] - lambda * (s - 1.0) * m * a) / m;
            if k + 1 < free.len() {
                jac.upper[k] /= sq[k] * sq[k + 1];
                jac.lower[k] /= sq[k] * sq[k + 1];
            }
            c.push(sq[k] * a * u[i]);
            f.push(-(w[i] + m * op.potential[i] * u[i] - lambda * m * a * u[i]) / sq[k]);
        }
        let g = -(op.power_sum(&u, s) - 1.0) / s;
        let (dy, _dl) = solve_bordered(&jac.factor()?, &c, &f, g)?;
        let du: Vec<f64> = dy.iter().zip(&sq).map(|(y, q)| y / q).collect();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let mut trial = u.clone();
            for (k, i) in free.clone().enumerate() {
                trial[i] += t * du[k];
            }
            normalize(op, &mut trial, s);
            let lt = op.energy(&trial);
            let rt = residual_on(op, free, &trial, lt, s);
            if rt.is_finite() && rt < res {
                accepted = Some((trial, lt, rt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, lt, rt)) => {
                u = trial;
                lambda = lt;
                res = rt;
            }
            None => {
                return Err(Error::NoConvergence { iters, residual: res, last_iterate: u, multiplier: lambda });
            }
        }
    }
    let negative = free.clone().filter(|i| u[*i] <= 0.0).count();
    if negative > 0 {
        return Err(Error::NegativeNodes { count: negative });
    }
    Ok(NewtonOutcome { u, lambda, residual: res, iterations: iters })
}

/// Preconditioned projected gradient descent on `E(u) / ‖u‖_s^2` over
/// nonnegative fields with `‖u‖_{L^s} = 1`, started from `u0`.
///
/// The metric is `B = A + σ M` with `σ` large enough to make `B` positive
/// definite; steps adapt by doubling and halving on the quotient. Returns once
/// the Euler-Lagrange residual drops below `tol` or the budget is spent.
pub(crate) fn descend_on(op: &RadialOperator, free: &Range<usize>, s: f64, u0: &[f64], tol: f64, budget: usize) -> Result<Vec<f64>> {
    let vmin = free.clone().map(|i| op.potential[i]).fold(f64::INFINITY, f64::min);
    let sigma = (-vmin).max(0.0) + 1.0;
    let mut b = op.stiffness(free.clone());
    for (k, i) in free.clone().enumerate() {
        b.diag[k] += sigma * op.mass[i];
    }
    let lu = b.factor()?;
    let mut u = vec![0.0; op.len()];
    for i in free.clone() {
        u[i] = u0[i].abs();
    }
    normalize(op, &mut u, s);
    let mut q = op.energy(&u);
    let mut tau = 1.0;
    for _ in 0..budget {
        if residual_on(op, free, &u, q, s) < tol {
            break;
        }
        let w = op.weak_neg_laplacian(&u);
        let g: Vec<f64> = free
            .clone()
            .map(|i| {
                let m = op.mass[i];
                w[i] + m * op.potential[i] * u[i] - q * m * u[i].powf(s - 1.0)
            })
            .collect();
        let d = lu.solve(&g);
        let mut moved = false;
        while tau > 1e-12 {
            let mut trial = u.clone();
            for (k, i) in free.clone().enumerate() {
                trial[i] = (u[i] - tau * d[k]).abs();
            }
            normalize(op, &mut trial, s);
            let qt = op.energy(&trial);
            if qt < q {
                u = trial;
                q = qt;
                tau = (2.0 * tau).min(1e6);
                moved = true;
                break;
            }
            tau *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok(u)
}

fn ball_setup(profile: &MetricProfile, grid: &RadialGrid) -> Result<(RadialOperator, Range<usize>)> {
    let op = RadialOperator::new(grid.nodes(), profile)?;
    Ok((op, 0..grid.intervals()))
}

fn check_exponent(profile: &MetricProfile, s: f64, allow_critical: bool) -> Result<()> {
    let p = profile.dim().critical_exponent();
    let ok = s > 2.0 && (s < p || (allow_critical && s == p));
    if !ok {
        return Err(Error::InvalidArgument(format!("exponent s = {s} outside (2, {p})")));
    }
    Ok(())
}

/// First Dirichlet eigenpair of `-Δ + c(n) R_g` on the ball, eigenfunction scaled to maximum 1.
pub fn dirichlet_eigenpair(profile: &MetricProfile, grid: &RadialGrid) -> Result<(f64, RadialField)> {
    let (op, free) = ball_setup(profile, grid)?;
    let (mu, w) = lowest_eigen(&op, &free)?;
    Ok((mu, RadialField::new(*grid, w, Boundary::DirichletZero)?))
}

/// Minimizer of `Q_s` on `B_j` for `2 < s < p`. Without `init`, Newton starts
/// from the first Dirichlet eigenfunction.
pub fn solve_subcritical(
    profile: &MetricProfile,
    grid: &RadialGrid,
    s: f64,
    init: Option<&RadialField>,
    cfg: &SolverConfig,
) -> Result<SubcriticalSolution> {
    check_exponent(profile, s, false)?;
    solve_exponent(profile, grid, s, init, cfg)
}

fn solve_exponent(
    profile: &MetricProfile,
    grid: &RadialGrid,
    s: f64,
    init: Option<&RadialField>,
    cfg: &SolverConfig,
) -> Result<SubcriticalSolution> {
    let (op, free) = ball_setup(profile, grid)?;
    let u0 = match init {
        Some(f) if f.grid() == *grid => f.values().to_vec(),
        Some(_) => return Err(Error::GridMismatch("initial field lives on a different grid".into())),
        None => lowest_eigen(&op, &free)?.1,
    };
    let out = newton_on(&op, &free, s, &u0, cfg)?;
    Ok(SubcriticalSolution {
        field: RadialField::new(*grid, out.u, Boundary::DirichletZero)?,
        lambda: out.lambda,
        s,
        residual: out.residual,
        iterations: out.iterations,
    })
}

/// Discrete `L^2` norm of `Δu - c(n) R_g u + λ u^{s-1}` over the nodes of a dirichlet-zero field.
pub fn el_residual(u: &RadialField, profile: &MetricProfile, lambda: f64, s: f64) -> Result<f64> {
    if !u.vanishes_at_boundary() {
        return Err(Error::InvalidField("residual needs a field vanishing at the outer radius".into()));
    }
    let (op, free) = ball_setup(profile, &u.grid())?;
    Ok(residual_on(&op, &free, u.values(), lambda, s))
}

/// `Q_s(u) = E(u) / ‖u‖_s^2`.
pub fn quotient(u: &RadialField, profile: &MetricProfile, s: f64) -> Result<f64> {
    let op = crate::radial::operator_for(u, profile)?;
    if !u.vanishes_at_boundary() {
        return Err(Error::InvalidField("quotient needs a field vanishing at the outer radius".into()));
    }
    let n = op.lp_norm(u.values(), s);
    if n == 0.0 {
        return Err(Error::InvalidField("quotient of the zero field".into()));
    }
    Ok(op.energy(u.values()) / (n * n))
}

/// Radius where `u` first falls to half its maximum beyond the argmax (linear interpolation).
pub(crate) fn half_max_radius(nodes: &[f64], u: &[f64]) -> f64 {
    let (k, m) = u.iter().enumerate().fold((0, f64::NEG_INFINITY), |(k, m), (i, v)| if *v > m { (i, *v) } else { (k, m) });
    for i in k + 1..u.len() {
        if u[i] <= 0.5 * m {
            let t = (u[i - 1] - 0.5 * m) / (u[i - 1] - u[i]);
            return nodes[i - 1] + t * (nodes[i] - nodes[i - 1]) - nodes[k];
        }
    }
    nodes[nodes.len() - 1] - nodes[k]
}

/// Continuation `s → p` on `B_j`.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub schedule: Vec<f64>,
    pub solutions: Vec<SubcriticalSolution>,
    /// Linear least-squares extrapolation of `λ_s` to `s = p` over the last three points.
    pub y_extrapolated: f64,
    /// `λ_p` from a direct critical solve, when one was run and converged.
    pub y_critical: Option<f64>,
    /// The reported `Y_j`: `y_critical` when available, `upper_witness` after
    /// concentration, otherwise the smaller of `y_extrapolated` and `upper_witness`.
    pub y_j: f64,
    /// `Q_p` of the last subcritical field, an upper bound for the discrete `Y_j`.
    pub upper_witness: f64,
    pub concentrated: bool,
    pub maxima: Vec<f64>,
    pub core_radii: Vec<f64>,
    /// Final field with `‖u_j‖_{L^p} = 1`.
    pub field: RadialField,
    /// `el_residual(field, y_j, p)`.
    pub critical_residual: f64,
}

/// Serializable digest of a [`ContinuationResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSummary {
    pub radius: f64,
    pub intervals: usize,
    pub schedule: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
    pub maxima: Vec<f64>,
    pub core_radii: Vec<f64>,
    pub y_extrapolated: f64,
    pub y_critical: Option<f64>,
    pub y_j: f64,
    pub upper_witness: f64,
    pub concentrated: bool,
    pub critical_residual: f64,
}

impl ContinuationResult {
    pub fn summary(&self) -> ContinuationSummary {
        ContinuationSummary {
            radius: self.field.grid().radius(),
            intervals: self.field.grid().intervals(),
            schedule: self.schedule.clone(),
            lambdas: self.solutions.iter().map(|s| s.lambda).collect(),
            residuals: self.solutions.iter().map(|s| s.residual).collect(),
            iterations: self.solutions.iter().map(|s| s.iterations).collect(),
            maxima: self.maxima.clone(),
            core_radii: self.core_radii.clone(),
            y_extrapolated: self.y_extrapolated,
            y_critical: self.y_critical,
            y_j: self.y_j,
            upper_witness: self.upper_witness,
            concentrated: self.concentrated,
            critical_residual: self.critical_residual,
        }
    }
}

/// Value at `x = 0` of the least-squares line through the points.
pub(crate) fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> f64 {
    let (_, intercept, _) = crate::manifold::linear_fit(x, y);
    intercept
}

/// Accepted `(s, outcome)` pairs of a continuation.
pub(crate) type Runs = Vec<(f64, NewtonOutcome)>;

/// Raw continuation on an operator: returns the accepted `(s, outcome)` pairs
/// and whether concentration stopped the run.
pub(crate) fn continuation_on(
    op: &RadialOperator,
    free: &Range<usize>,
    p: f64,
    schedule: &[f64],
    cfg: &SolverConfig,
) -> Result<(Runs, Vec<f64>, bool)> {
    let mut u = lowest_eigen(op, free)?.1;
    let mut out: Runs = Vec::new();
    let mut cores = Vec::new();
    let mut first_max = None;
    let mut concentrated = false;
    let mut pending: Vec<f64> = schedule.iter().rev().copied().collect();
    let mut last_cells = f64::INFINITY;
    let mut last_growth = 1.0;
    while let Some(s) = pending.pop() {
        match newton_on(op, free, s, &u, cfg) {
            Ok(sol) => {
                u = sol.u.clone();
                let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let core = half_max_radius(&op.nodes, &u);
                let k = u.iter().position(|v| *v == m).unwrap_or(0);
                let cell = op.nodes[(k + 1).min(op.len() - 1)] - op.nodes[k.min(op.len() - 2)];
                let m0 = *first_max.get_or_insert(m);
                cores.push(core);
                out.push((s, sol));
                last_cells = core / cell;
                last_growth = m / m0;
                if m > cfg.concentration_cap * m0 || last_cells < cfg.core_cells {
                    concentrated = true;
                    break;
                }
            }
            Err(e) => {
                // Retry with an intermediate exponent, geometric in p - s.
                let Some(sp) = out.last().map(|(s, _)| *s) else {
                    // Nothing accepted yet: approach from the eigenvalue end instead.
                    if s - 2.0 > 1e-3 {
                        pending.push(s);
                        pending.push(2.0 + 0.5 * (s - 2.0));
                        continue;
                    }
                    return Err(e);
                };
                if (p - sp) / (p - s) > 1.02 {
                    pending.push(s);
                    pending.push(p - ((p - sp) * (p - s)).sqrt());
                } else if last_cells < 2.0 * cfg.core_cells || last_growth > cfg.concentration_cap.sqrt() {
                    // The smooth branch ends once the core is a few cells wide
                    // or the peak has already grown by orders of magnitude.
                    concentrated = true;
                    break;
                } else {
                    // The branch was lost (typically the maximum migrates): descend
                    // to a nearby minimizer and polish it.
                    let start = descend_on(op, free, s, &u, 1e-4, 20_000)?;
                    let sol = newton_on(op, free, s, &start, cfg).map_err(|_| e)?;
                    let (m, k) = sol.u.iter().enumerate().fold((f64::NEG_INFINITY, 0), |a, (i, v)| if *v > a.0 { (*v, i) } else { a });
                    let core = half_max_radius(&op.nodes, &sol.u);
                    let cell = op.nodes[(k + 1).min(op.len() - 1)] - op.nodes[k.min(op.len() - 2)];
                    if core / cell < cfg.core_cells {
                        // Unresolved spikes are grid artifacts, not minimizers.
                        concentrated = true;
                        break;
                    }
                    u = sol.u.clone();
                    cores.push(core);
                    out.push((s, sol));
                    last_cells = core / cell;
                    last_growth = m / first_max.unwrap_or(m);
                }
            }
        }
    }
    Ok((out, cores, concentrated))
}

/// Indices of the last three accepted exponents whose distances to `p`
/// differ pairwise by at least 10%.
fn extrapolation_points(ds: &[f64]) -> Vec<usize> {
    let mut picked = vec![ds.len() - 1];
    for i in (0..ds.len() - 1).rev() {
        if picked.len() == 3 {
            break;
        }
        if ds[i] >= 1.1 * ds[*picked.last().unwrap()] {
            picked.push(i);
        }
    }
    picked.reverse();
    picked
}

/// Continuation along `schedule` (increasing exponents in `(2, p)`), warm
/// starting each solve from the previous one.
pub fn continue_to_critical(
    profile: &MetricProfile,
    grid: &RadialGrid,
    schedule: &[f64],
    cfg: &SolverConfig,
) -> Result<ContinuationResult> {
    let p = profile.dim().critical_exponent();
    if schedule.len() < 3 {
        return Err(Error::InvalidArgument("schedule needs at least 3 exponents".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("schedule must be increasing".into()));
    }
    for s in schedule {
        check_exponent(profile, *s, false)?;
    }
    let (op, free) = ball_setup(profile, grid)?;
    let (runs, core_radii, concentrated) = continuation_on(&op, &free, p, schedule, cfg)?;
    let ds: Vec<f64> = runs.iter().map(|(s, _)| p - s).collect();
    let idx = extrapolation_points(&ds);
    let xs: Vec<f64> = idx.iter().map(|i| ds[*i]).collect();
    let ys: Vec<f64> = idx.iter().map(|i| runs[*i].1.lambda).collect();
    let y_extrapolated = if idx.len() >= 2 { extrapolate_to_zero(&xs, &ys) } else { ys[0] };
    let last = &runs.last().expect("at least one accepted solve").1;
    let mut witness_field = last.u.clone();
    normalize(&op, &mut witness_field, p);
    let upper_witness = op.energy(&witness_field);

    let mut y_critical = None;
    let mut final_u = witness_field;
    if !concentrated && cfg.critical_solve {
        if let Ok(crit) = newton_on(&op, &free, p, &last.u, cfg) {
            y_critical = Some(crit.lambda);
            final_u = crit.u;
        }
    }
    // A concentrating branch has no smooth limit to extrapolate; its witness
    // quotient is then the estimate, and it always bounds Y_j from above.
    let y_j = match y_critical {
        Some(y) => y,
        None if concentrated => upper_witness,
        None => y_extrapolated.min(upper_witness),
    };
    let critical_residual = residual_on(&op, &free, &final_u, y_j, p);
    let maxima = runs.iter().map(|(_, o)| o.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut schedule_used = Vec::with_capacity(runs.len());
    let mut solutions = Vec::with_capacity(runs.len());
    for (s, o) in runs {
        schedule_used.push(s);
        solutions.push(SubcriticalSolution {
            field: RadialField::new(*grid, o.u, Boundary::DirichletZero)?,
            lambda: o.lambda,
            s,
            residual: o.residual,
            iterations: o.iterations,
        });
    }
    Ok(ContinuationResult {
        schedule: schedule_used,
        solutions,
        y_extrapolated,
        y_critical,
        y_j,
        upper_witness,
        concentrated,
        maxima,
        core_radii,
        field: RadialField::new(*grid, final_u, Boundary::DirichletZero)?,
        critical_residual,
    })
}
