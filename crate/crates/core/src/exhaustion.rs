//! The exhaustion pipeline: `Y_j` on growing balls, extension by zero,
//! decay exponents, boundary bounds and the non-concentration verdict.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::functional::{exterior_quotient, lambda_constant, ExteriorConfig, ExteriorReport};
use crate::manifold::{linear_fit, MetricProfile};
use crate::radial::{Boundary, RadialField, RadialGrid, RadialOperator};
use crate::subcritical::{continue_to_critical, el_residual, ContinuationSummary, SolverConfig};

/// Width of the boundary layer `U_j = {d(x, ∂B_j) < 1/8}`.
pub const BOUNDARY_LAYER: f64 = 0.125;

/// One ball of the exhaustion.
#[derive(Debug, Clone)]
pub struct JRecord {
    pub radius: f64,
    pub y_j: f64,
    /// `u_j` with `‖u_j‖_{L^p} = 1`.
    pub field: RadialField,
    /// Exponent and multiplier of the equation `Δu - c(n) R u + μ u^{q-1} = 0` solved by `field`.
    pub equation: (f64, f64),
    pub max_value: f64,
    pub max_radius: f64,
    pub boundary_max: f64,
    /// `(r, u_j(r))` on the outer half, at most 128 samples.
    pub tail: Vec<(f64, f64)>,
    pub continuation: ContinuationSummary,
}

/// Serializable form of a [`JRecord`] (the field itself goes to CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JRecordSummary {
    pub n: u32,
    pub radius: f64,
    /// Field CSV, relative to the trace file.
    pub field_file: String,
    pub y_j: f64,
    pub equation: (f64, f64),
    pub max_value: f64,
    pub max_radius: f64,
    pub boundary_max: f64,
    pub tail: Vec<(f64, f64)>,
    pub continuation: ContinuationSummary,
}

impl JRecord {
    /// Builds a record from a field normalized in `L^p`, deriving maxima and tail samples.
    pub fn from_field(radius: f64, y_j: f64, field: RadialField, equation: (f64, f64), continuation: ContinuationSummary) -> Self {
        let grid = field.grid();
        let (max_value, k) = field.max();
        let v = field.values();
        let boundary_max = (0..grid.len())
            .filter(|i| grid.radius() - grid.node(*i) < BOUNDARY_LAYER)
            .map(|i| v[i])
            .fold(0.0, f64::max);
        let first = grid.len() / 2;
        let stride = ((grid.len() - first) / 128).max(1);
        let tail = (first..grid.len()).step_by(stride).map(|i| (grid.node(i), v[i])).collect();
        JRecord { radius, y_j, max_value, max_radius: grid.node(k), boundary_max, tail, equation, field, continuation }
    }

    pub fn field_file(&self) -> String {
        format!("u_j{}.csv", self.radius)
    }

    pub fn summary(&self, n: u32) -> JRecordSummary {
        JRecordSummary {
            n,
            radius: self.radius,
            field_file: self.field_file(),
            y_j: self.y_j,
            equation: self.equation,
            max_value: self.max_value,
            max_radius: self.max_radius,
            boundary_max: self.boundary_max,
            tail: self.tail.clone(),
            continuation: self.continuation.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExhaustionTrace {
    pub dimension: Dimension,
    pub records: Vec<JRecord>,
}

impl ExhaustionTrace {
    pub fn radii(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.radius).collect()
    }

    pub fn y_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y_j).collect()
    }

    pub fn record(&self, radius: f64) -> Option<&JRecord> {
        self.records.iter().find(|r| r.radius == radius)
    }

    pub fn last(&self) -> &JRecord {
        self.records.last().expect("trace is never empty")
    }

    /// Writes `trace.jsonl` (one record per radius) and one `r,u` CSV per field
    /// into `dir`; returns the written paths in order.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let trace_path = dir.join(TRACE_FILE);
        let mut out = BufWriter::new(File::create(&trace_path)?);
        let mut paths = vec![trace_path];
        for rec in &self.records {
            serde_json::to_writer(&mut out, &rec.summary(self.dimension.n()))?;
            out.write_all(b"\n")?;
            let path = dir.join(rec.field_file());
            rec.field.write_csv(BufWriter::new(File::create(&path)?))?;
            paths.push(path);
        }
        out.flush()?;
        Ok(paths)
    }

    /// Reads a trace written by [`ExhaustionTrace::write_dir`]; `path` is the
    /// JSON-lines file or its directory.
    pub fn read(path: &Path) -> Result<Self> {
        let file = if path.is_dir() { path.join(TRACE_FILE) } else { path.to_path_buf() };
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut records = Vec::new();
        let mut n = None;
        for line in BufReader::new(File::open(&file)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let s: JRecordSummary = serde_json::from_str(&line)?;
            if *n.get_or_insert(s.n) != s.n {
                return Err(Error::InvalidArgument("trace mixes dimensions".into()));
            }
            let field = RadialField::read_csv(File::open(dir.join(&s.field_file))?, Boundary::DirichletZero)?;
            records.push(JRecord {
                radius: s.radius,
                y_j: s.y_j,
                field,
                equation: s.equation,
                max_value: s.max_value,
                max_radius: s.max_radius,
                boundary_max: s.boundary_max,
                tail: s.tail,
                continuation: s.continuation,
            });
        }
        let Some(n) = n else {
            return Err(Error::InvalidArgument(format!("{} holds no records", file.display())));
        };
        Ok(ExhaustionTrace { dimension: Dimension::new(n)?, records })
    }
}

/// Name of the JSON-lines trace inside an output directory.
pub const TRACE_FILE: &str = "trace.jsonl";

/// `tol_mono = 1e-3 |Y_{j_1}|` (absolute floor `1e-12`).
pub fn monotonicity_tolerance(first: f64) -> f64 {
    (1e-3 * first.abs()).max(1e-12)
}

/// Checks `Y_{j+1} <= Y_j + tol_mono` along the trace.
pub fn check_monotone(trace: &ExhaustionTrace) -> Result<()> {
    let ys = trace.y_values();
    let tol = monotonicity_tolerance(ys[0]);
    for (k, w) in trace.records.windows(2).enumerate() {
        if w[1].y_j > w[0].y_j + tol {
            return Err(Error::NotMonotone {
                j_prev: w[0].radius,
                y_prev: ys[k],
                j_next: w[1].radius,
                y_next: ys[k + 1],
                tol,
            });
        }
    }
    Ok(())
}

/// Solves the continuation on each ball `B_j` (concurrently) and assembles the trace.
pub fn run_exhaustion(profile: &MetricProfile, radii: &[f64], per_unit: f64, solver: &SolverConfig) -> Result<ExhaustionTrace> {
    if radii.len() < 3 {
        return Err(Error::InvalidArgument(format!("exhaustion needs at least 3 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    if let Some(r) = radii.iter().find(|r| **r > profile.r_max()) {
        return Err(Error::OutOfDomain { r: *r, r_max: profile.r_max() });
    }
    solver.validate()?;
    let p = profile.dim().critical_exponent();
    let schedule = solver.schedule(p);
    let records = radii
        .par_iter()
        .map(|&j| {
            let run = || -> Result<JRecord> {
                let grid = RadialGrid::with_density(j, per_unit)?;
                let res = continue_to_critical(profile, &grid, &schedule, solver)?;
                let equation = match res.y_critical {
                    Some(y) => (p, y),
                    None => {
                        // The last subcritical field, rescaled to unit L^p norm, solves
                        // Δu - cRu + λ c^{s-2} u^{s-1} = 0 with c its former L^p norm.
                        let last = res.solutions.last().expect("continuation keeps at least one solve");
                        let op = RadialOperator::new(grid.nodes(), profile)?;
                        let c = op.lp_norm(last.field.values(), p);
                        (last.s, last.lambda * c.powf(last.s - 2.0))
                    }
                };
                let summary = res.summary();
                Ok(JRecord::from_field(j, res.y_j, res.field, equation, summary))
            };
            run().map_err(|e| Error::AtRadius { j, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let trace = ExhaustionTrace { dimension: profile.dim(), records };
    check_monotone(&trace)?;
    Ok(trace)
}

/// Critical exterior quotients `Y(M \ B_{r_in})` for each inner radius (concurrently),
/// each started from `R_out = 4 r_in`.
pub fn exterior_sequence(
    profile: &MetricProfile,
    inner_radii: &[f64],
    solver: &SolverConfig,
    cfg: &ExteriorConfig,
) -> Result<Vec<ExteriorReport>> {
    let p = profile.dim().critical_exponent();
    inner_radii
        .par_iter()
        .map(|&r| {
            exterior_quotient(profile, r, 4.0 * r, p, solver, cfg).map_err(|e| Error::AtRadius { j: r, source: Box::new(e) })
        })
        .collect()
}

/// True when the values never drop by more than `tol_mono` of the first.
pub fn nondecreasing(values: &[f64]) -> bool {
    match values.first() {
        Some(first) => {
            let tol = monotonicity_tolerance(*first);
            values.windows(2).all(|w| w[1] >= w[0] - tol)
        }
        None => true,
    }
}

/// Weak subsolution test of the zero extension of `u_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionReport {
    pub radius: f64,
    pub extended_radius: f64,
    /// `max_i [(A u)_i - μ m_i u_i^{q-1}]` over hat functions on the extended grid.
    pub max_violation: f64,
    /// Node radius where the maximum is attained.
    pub worst_radius: f64,
    /// Largest value over hats straddling or beyond `∂B_j`.
    pub boundary_violation: f64,
    pub tol_weak: f64,
    pub pass: bool,
}

/// Tests `Δu - c(n) R u + μ u^{q-1} >= 0` weakly on `B_{2j}` against every hat function,
/// with `u` the extension by zero of the record's field and `(q, μ)` its equation.
pub fn subsolution_check(profile: &MetricProfile, trace: &ExhaustionTrace, j: f64) -> Result<SubsolutionReport> {
    let record = trace
        .record(j)
        .ok_or_else(|| Error::InvalidArgument(format!("trace holds no radius {j}")))?;
    subsolution_of(profile, &record.field, record.equation)
}

/// [`subsolution_check`] for an arbitrary field on `B_j` and equation `(q, μ)`.
pub fn subsolution_of(profile: &MetricProfile, field: &RadialField, equation: (f64, f64)) -> Result<SubsolutionReport> {
    let radius = field.grid().radius();
    let ext = field.extend_by_zero(2)?;
    let op = RadialOperator::new(ext.grid().nodes(), profile)?;
    let u = ext.values();
    let (q, mu) = equation;
    let weak = op.weak_neg_laplacian(u);
    let mass = op.mass();
    let nodes = op.nodes();
    let last = ext.grid().intervals();
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst = 0;
    let mut boundary_violation = f64::NEG_INFINITY;
    let mut scale: f64 = 0.0;
    let j_index = field.grid().intervals();
    for i in 0..last {
        let a = weak[i] + mass[i] * op.potential[i] * u[i];
        let v = a - mu * mass[i] * u[i].abs().powf(q - 2.0) * u[i];
        scale = scale.max(a.abs());
        if v > max_violation {
            max_violation = v;
            worst = i;
        }
        if i + 1 >= j_index {
            boundary_violation = boundary_violation.max(v);
        }
    }
    let tol_weak = 1e-6 * scale.max(f64::MIN_POSITIVE);
    Ok(SubsolutionReport {
        radius,
        extended_radius: ext.grid().radius(),
        max_violation,
        worst_radius: nodes[worst],
        boundary_violation,
        tol_weak,
        pass: max_violation <= tol_weak,
    })
}

/// Largest admissible `β₀`:
/// `min(sqrt((1 - ε̂) / (C₀ Y)), n/(n-2) (1 - 1e-9))`.
pub fn beta0_select(n: u32, c0_y: f64, eps_hat: f64) -> Result<f64> {
    let dim = Dimension::new(n)?;
    if !(0.0..1.0).contains(&eps_hat) {
        return Err(Error::InvalidArgument(format!("slack must lie in [0, 1), got {eps_hat}")));
    }
    if c0_y >= 1.0 {
        return Err(Error::MarginExhausted(c0_y));
    }
    let cap = dim.nf() / (dim.nf() - 2.0) * (1.0 - 1e-9);
    let beta = if c0_y <= 0.0 { cap } else { ((1.0 - eps_hat) / c0_y).sqrt().min(cap) };
    if !(beta > 1.0) {
        return Err(Error::MarginExhausted(c0_y / (1.0 - eps_hat)));
    }
    Ok(beta)
}

/// Decay bookkeeping `(β₀, δ, ρ₀, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub n: u32,
    pub y: f64,
    pub y_inf: f64,
    pub beta0: f64,
    /// Slack `ε` in `(β₀² + ε) C₀ Y < 1`; zero means `β₀` is the supremum.
    pub eps: f64,
    pub delta: f64,
    pub rho: f64,
    pub rho0: f64,
    pub alpha_predicted: f64,
    pub alpha_fitted: Option<f64>,
    pub fit_residual: Option<f64>,
    /// `true` when `Y < 0` and the direct choice `ρ₀ = 2n/(n-2)` was used.
    pub negative_branch: bool,
}

/// Closed-form exponents. For `Y > 0`, `β₀ = min(sqrt(Y_∞/Y), n/(n-2))`,
/// `ρ₀ = n(β₀ - 1)` and `α = (n-2)/2 - (n-2)ρ / (2n(β₀ - 1))`; for `Y <= 0`,
/// `ρ₀ = 2n/(n-2)` and `α = (n-2)(2n - ρ(n-2)) / (4n)`.
pub fn exponent_formulas(n: u32, y: f64, y_inf: f64, rho: f64) -> Result<ExponentReport> {
    let dim = Dimension::new(n)?;
    let nf = dim.nf();
    if !(y_inf > 0.0) {
        return Err(Error::Hypothesis(format!("Y_inf must be positive, got {y_inf}")));
    }
    if !(y < y_inf) {
        return Err(Error::Hypothesis(format!("Y = {y} must be smaller than Y_inf = {y_inf}")));
    }
    let cap = nf / (nf - 2.0);
    let negative_branch = y <= 0.0;
    let (beta0, rho0, alpha) = if negative_branch {
        let rho0 = 2.0 * nf / (nf - 2.0);
        (cap, rho0, (nf - 2.0) * (2.0 * nf - rho * (nf - 2.0)) / (4.0 * nf))
    } else {
        let beta0 = (y_inf / y).sqrt().min(cap);
        let rho0 = (nf * (y_inf / y).sqrt() - nf).min(2.0 * nf / (nf - 2.0));
        (beta0, rho0, (nf - 2.0) / 2.0 - (nf - 2.0) * rho / (2.0 * nf * (beta0 - 1.0)))
    };
    if !(rho < rho0) {
        return Err(Error::RhoTooLarge { rho, rho0 });
    }
    let delta = (nf - 2.0) * beta0 / (nf * beta0 - 2.0);
    Ok(ExponentReport {
        n,
        y,
        y_inf,
        beta0,
        eps: 0.0,
        delta,
        rho,
        rho0,
        alpha_predicted: alpha,
        alpha_fitted: None,
        fit_residual: None,
        negative_branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub alpha: f64,
    pub residual: f64,
    pub window: [f64; 2],
    pub nodes: usize,
}

/// Negated slope of `log u` against `log r` over `r ∈ [(1 - frac) j, j]`,
/// skipping nonpositive values.
pub fn decay_fit_field(field: &RadialField, window_frac: f64) -> Result<DecayFit> {
    if !(window_frac > 0.0 && window_frac < 1.0) {
        return Err(Error::InvalidArgument(format!("window fraction must lie in (0, 1), got {window_frac}")));
    }
    let grid = field.grid();
    let lo = (1.0 - window_frac) * grid.radius();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, v) in field.values().iter().enumerate() {
        let r = grid.node(i);
        if r >= lo && r > 0.0 && *v > 0.0 {
            xs.push(r.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 10 {
        return Err(Error::EmptyWindow(format!("{} positive nodes in [{lo}, {}]", xs.len(), grid.radius())));
    }
    let (slope, _, residual) = linear_fit(&xs, &ys);
    Ok(DecayFit { alpha: -slope, residual, window: [xs[0].exp(), xs[xs.len() - 1].exp()], nodes: xs.len() })
}

/// [`decay_fit_field`] on the largest ball of the trace.
pub fn decay_fit(trace: &ExhaustionTrace, window_frac: f64) -> Result<DecayFit> {
    decay_fit_field(&trace.last().field, window_frac)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBound {
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
    /// Largest upper-half boundary maximum over the first upper-half one.
    pub ratio: f64,
    pub pass: bool,
}

/// Boundary-layer maxima `sup_{U_j} u_j`; passes when they do not grow by
/// more than a factor 2 across the upper half of the radii.
pub fn boundary_bound(trace: &ExhaustionTrace) -> BoundaryBound {
    let radii = trace.radii();
    let maxima: Vec<f64> = trace.records.iter().map(|r| r.boundary_max).collect();
    let upper = &maxima[maxima.len() / 2..];
    let first = upper[0];
    let top = upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratio = if top <= first {
        1.0
    } else if first > 0.0 {
        top / first
    } else {
        f64::INFINITY
    };
    BoundaryBound { radii, maxima, ratio, pass: ratio <= 2.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    ConvergesPositive,
    Concentrates,
    Escapes,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationVerdict {
    pub verdict: VerdictKind,
    pub compact_radius: f64,
    /// `sup_{B_R} u_j` per radius.
    pub sup_compact: Vec<f64>,
    /// `max u_j` per radius.
    pub maxima: Vec<f64>,
    /// Per-radius concentration flags of the continuation.
    pub flagged: Vec<bool>,
}

/// Classifies the behaviour of `u_j` on a fixed ball `B_R` as `j` grows.
pub fn concentration_verdict(trace: &ExhaustionTrace, compact_radius: f64) -> Result<ConcentrationVerdict> {
    if trace.records.len() < 3 {
        return Err(Error::InvalidArgument("verdict needs at least 3 radii".into()));
    }
    let min_radius = trace.radii().into_iter().fold(f64::INFINITY, f64::min);
    if !(compact_radius > 0.0 && compact_radius < min_radius) {
        return Err(Error::InvalidArgument(format!(
            "compact radius {compact_radius} must lie in (0, {min_radius})"
        )));
    }
    let sup_compact: Vec<f64> = trace
        .records
        .iter()
        .map(|r| {
            let g = r.field.grid();
            r.field
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| g.node(*i) <= compact_radius)
                .map(|(_, v)| *v)
                .fold(0.0, f64::max)
        })
        .collect();
    let maxima: Vec<f64> = trace.records.iter().map(|r| r.max_value).collect();
    let flagged: Vec<bool> = trace.records.iter().map(|r| r.continuation.concentrated).collect();
    let first = sup_compact[0];
    let last = *sup_compact.last().unwrap();
    let decreasing = sup_compact.windows(2).all(|w| w[1] <= w[0]);
    let growing_max = maxima.windows(2).all(|w| w[1] >= w[0]) && *maxima.last().unwrap() > 2.0 * maxima[0];
    let lo = sup_compact.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sup_compact.iter().cloned().fold(0.0, f64::max);
    let verdict = if *flagged.last().unwrap() || growing_max {
        VerdictKind::Concentrates
    } else if decreasing && last < 0.5 * first {
        VerdictKind::Escapes
    } else if lo > 0.0 && lo >= 0.5 * hi {
        VerdictKind::ConvergesPositive
    } else {
        VerdictKind::Inconclusive
    };
    Ok(ConcentrationVerdict { verdict, compact_radius, sup_compact, maxima, flagged })
}

/// Residual of `Δw - c(n) R w + K w^{p-1} = 0` for `w = |Y|^{1/(p-2)} u`, `K = sign(Y)`.
pub fn k_normalized_residual(field: &RadialField, profile: &MetricProfile, y: f64) -> Result<(f64, f64)> {
    let p = profile.dim().critical_exponent();
    let (k, scale) = if y == 0.0 { (0.0, 1.0) } else { (y.signum(), y.abs().powf(1.0 / (p - 2.0))) };
    let w = field.scaled(scale);
    Ok((k, el_residual(&w, profile, k, p)?))
}

/// Estimates of the three constants and the existence condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsEstimate {
    pub lambda: f64,
    /// `Y(M)` estimate: the last (smallest) `Y_j`.
    pub y_est: f64,
    /// Largest radial exterior quotient over the inner radii tried.
    pub y_inf_raw: f64,
    /// `min(y_inf_raw, Λ)`.
    pub y_inf_est: f64,
    pub margin: f64,
    /// `Y_est < Y_∞_est - margin |Y_∞_est|` and `Y_∞_est > 0`.
    pub condition_holds: bool,
    /// `(Y_∞_est - Y_est) / |Y_∞_est|`.
    pub relative_gap: f64,
}

pub fn estimate_constants(n: u32, y_values: &[f64], exterior: &[f64], margin: f64) -> Result<ConstantsEstimate> {
    let lambda = lambda_constant(n)?;
    if y_values.is_empty() || exterior.is_empty() {
        return Err(Error::InvalidArgument("need Y_j values and exterior quotients".into()));
    }
    let y_est = *y_values.last().unwrap();
    let y_inf_raw = exterior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_inf_est = y_inf_raw.min(lambda);
    let relative_gap = (y_inf_est - y_est) / y_inf_est.abs();
    Ok(ConstantsEstimate {
        lambda,
        y_est,
        y_inf_raw,
        y_inf_est,
        margin,
        condition_holds: y_inf_est > 0.0 && y_est < y_inf_est - margin * y_inf_est.abs(),
        relative_gap,
    })
}

/// `Y_est > -∞`-style chain `lower <= Y_est <= Y_∞_est <= Λ`, each upper link with tolerance `tol`.
pub fn chain_holds(lower: f64, y_est: f64, y_inf_est: f64, lambda: f64, tol: f64) -> bool {
    lower <= y_est && y_est <= y_inf_est + tol && y_inf_est <= lambda + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Boundary;
    use approx::assert_relative_eq;

    fn synthetic(values: &[(f64, f64, f64)]) -> ExhaustionTrace {
        // (radius, peak, boundary value) → field peak·(1 - r/j)^2 + boundary bump
        let records = values
            .iter()
            .map(|&(j, peak, bval)| {
                let g = RadialGrid::new(j, 512).unwrap();
                let f = RadialField::from_fn(g, Boundary::DirichletZero, |r| {
                    peak * (1.0 - r / j).powi(2) + bval * (1.0 - (j - r - 0.06).abs() / 0.06).max(0.0)
                })
                .unwrap();
                let summary = ContinuationSummary {
                    radius: j,
                    intervals: 512,
                    schedule: vec![],
                    lambdas: vec![],
                    residuals: vec![],
                    iterations: vec![],
                    maxima: vec![],
                    core_radii: vec![],
                    y_extrapolated: 1.0,
                    y_critical: Some(1.0),
                    y_j: 1.0,
                    upper_witness: 1.0,
                    concentrated: false,
                    critical_residual: 0.0,
                };
                JRecord::from_field(j, 1.0, f, (6.0, 1.0), summary)
            })
            .collect();
        ExhaustionTrace { dimension: Dimension::new(3).unwrap(), records }
    }

    #[test]
    fn beta0_examples() {
        assert_relative_eq!(beta0_select(3, 0.25, 0.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(beta0_select(4, 0.9, 0.0).unwrap(), (1.0f64 / 0.9).sqrt(), epsilon = 1e-15);
        assert!(matches!(beta0_select(3, 1.2, 0.0), Err(Error::MarginExhausted(_))));
        let b = beta0_select(3, 0.01, 0.0).unwrap();
        assert!(b < 3.0 && b > 2.99);
    }

    #[test]
    fn exponent_examples() {
        let r = exponent_formulas(3, 1.0, 4.0, 0.0).unwrap();
        assert_eq!((r.rho0, r.alpha_predicted, r.beta0), (3.0, 0.5, 2.0));
        let r = exponent_formulas(4, -1.0, 5.0, 0.0).unwrap();
        assert_eq!((r.rho0, r.alpha_predicted), (4.0, 1.0));
        assert!(matches!(exponent_formulas(3, 1.0, 4.0, 3.0), Err(Error::RhoTooLarge { .. })));
        assert!(matches!(exponent_formulas(3, 5.0, 4.0, 0.0), Err(Error::Hypothesis(_))));
        assert!(matches!(exponent_formulas(3, 1.0, -4.0, 0.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn power_law_decay() {
        let g = RadialGrid::new(10.0, 200).unwrap();
        let f = RadialField::from_fn(g, Boundary::Free, |r| 3.0 / r.max(1e-3).sqrt()).unwrap();
        let fit = decay_fit_field(&f, 0.5).unwrap();
        assert_relative_eq!(fit.alpha, 0.5, epsilon = 1e-10);
        let e = RadialField::from_fn(g, Boundary::Free, |r| (-r).exp()).unwrap();
        assert!(decay_fit_field(&e, 0.5).unwrap().alpha > 5.0);
    }

    #[test]
    fn boundary_bound_cases() {
        let flat = synthetic(&[(2.0, 1.0, 0.0), (4.0, 1.0, 0.0), (8.0, 1.0, 0.0)]);
        assert!(boundary_bound(&flat).pass);
        let growing = synthetic(&[(2.0, 1.0, 0.1), (4.0, 1.0, 0.5), (8.0, 1.0, 2.0)]);
        assert!(!boundary_bound(&growing).pass);
        let single = synthetic(&[(2.0, 1.0, 0.3)]);
        assert_eq!(boundary_bound(&single).ratio, 1.0);
    }

    #[test]
    fn verdicts() {
        let constant = synthetic(&[(2.0, 1.0, 0.0), (4.0, 1.0, 0.0), (8.0, 1.0, 0.0)]);
        assert_eq!(concentration_verdict(&constant, 0.5).unwrap().verdict, VerdictKind::ConvergesPositive);
        let fading = synthetic(&[(2.0, 1.0, 0.0), (4.0, 0.3, 0.0), (8.0, 0.05, 0.0)]);
        assert_eq!(concentration_verdict(&fading, 0.5).unwrap().verdict, VerdictKind::Escapes);
        assert!(concentration_verdict(&constant, 3.0).is_err());
    }

    #[test]
    fn estimator() {
        let e = estimate_constants(3, &[4.0, 3.9], &[5.0, 6.0], 0.05).unwrap();
        assert_relative_eq!(e.y_inf_est, lambda_constant(3).unwrap());
        assert!(e.condition_holds);
        let flat = estimate_constants(3, &[5.5], &[5.49], 0.05).unwrap();
        assert!(!flat.condition_holds);
    }
}
