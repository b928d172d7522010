use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use yamabe_lab::blowup::{contradiction_test, energy_identity_check, rescale, ContradictionReport, IdentityReport};
use yamabe_lab::exhaustion::{
    boundary_bound, chain_holds, concentration_verdict, decay_fit, estimate_constants, exponent_formulas,
    exterior_sequence, k_normalized_residual, nondecreasing, run_exhaustion, subsolution_check, BoundaryBound,
    ConcentrationVerdict, ConstantsEstimate, DecayFit, ExhaustionTrace, ExponentReport, SubsolutionReport,
};
use yamabe_lab::functional::{bubble_quotient, lambda_constant, scalar_lower_bound, BubbleSpec};
use yamabe_lab::manifold::{linear_fit, GrowthFit, MetricProfile};
use yamabe_lab::radial::{Boundary, RadialField, RadialGrid};
use yamabe_lab::subcritical::{el_residual, quotient};
use yamabe_lab::Error;

use crate::config::RunConfig;
use crate::report::{table, write_json, Header, Report};

/// Pipeline stage that failed; each maps to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Profile,
    Exhaustion,
    Exterior,
    Decay,
    Bubble,
    Blowup,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Profile => "profile",
            Stage::Exhaustion => "exhaustion",
            Stage::Exterior => "exterior",
            Stage::Decay => "decay",
            Stage::Bubble => "bubble",
            Stage::Blowup => "blowup",
            Stage::Output => "output",
        }
    }

    /// `2` is reserved for usage errors.
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Profile => 3,
            Stage::Exhaustion => 4,
            Stage::Exterior => 5,
            Stage::Decay => 6,
            Stage::Bubble => 7,
            Stage::Blowup => 8,
            Stage::Output => 9,
        }
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage.name(), self.source)
    }
}

impl std::error::Error for StageError {}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait AtStage<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T> AtStage<T> for yamabe_lab::Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|source| StageError { stage, source })
    }
}

impl<T> AtStage<T> for std::io::Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|e| StageError { stage, source: Error::Io(e) })
    }
}

fn setup(cfg: &RunConfig, needs_radii: bool) -> StageResult<MetricProfile> {
    cfg.validate(needs_radii).at(Stage::Config)?;
    cfg.build_profile().at(Stage::Profile)
}

fn prepare_out(out: &Path) -> StageResult<()> {
    std::fs::create_dir_all(out).at(Stage::Output)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YRow {
    pub radius: f64,
    pub y_j: f64,
    pub y_extrapolated: f64,
    pub upper_witness: f64,
    pub concentrated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorRow {
    pub r_in: f64,
    pub quotient: f64,
    pub r_out: f64,
    pub last_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub lower_bound: Option<f64>,
    pub y_est: f64,
    pub y_inf_est: f64,
    pub lambda: f64,
    pub tol: f64,
    /// `None` when the lower bound is infinite.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBody {
    pub n: u32,
    pub profile: String,
    pub y_table: Vec<YRow>,
    pub exterior: Vec<ExteriorRow>,
    pub exterior_monotone: bool,
    pub lower_bound_note: Option<String>,
    pub estimate: ConstantsEstimate,
    pub chain: ChainCheck,
    pub verdict: String,
}

/// Relative slack on the upper links of the chain `lower <= Y <= Y_inf <= Λ`.
pub const CHAIN_TOL: f64 = 0.02;

/// Exhaustion, exterior quotients, lower bound and the existence condition.
pub fn constants(cfg: &RunConfig) -> StageResult<(Report<ConstantsBody>, ExhaustionTrace)> {
    let profile = setup(cfg, true)?;
    let n = cfg.dimension;
    let trace = run_exhaustion(&profile, &cfg.pipeline.radii, cfg.grid.per_unit, &cfg.solver).at(Stage::Exhaustion)?;
    let exteriors = exterior_sequence(&profile, &cfg.exterior_radii(), &cfg.solver, &cfg.exterior).at(Stage::Exterior)?;
    let exterior: Vec<ExteriorRow> = cfg
        .exterior_radii()
        .iter()
        .zip(&exteriors)
        .map(|(r, e)| ExteriorRow {
            r_in: *r,
            quotient: e.report.quotient,
            r_out: e.history.last().map(|h| h.0).unwrap_or(f64::NAN),
            last_change: e.last_change,
        })
        .collect();
    let ext_values: Vec<f64> = exterior.iter().map(|e| e.quotient).collect();
    let (lower_bound, lower_bound_note) = match scalar_lower_bound(&profile, cfg.lower_bound_radius()) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let y_values = trace.y_values();
    let estimate = estimate_constants(n, &y_values, &ext_values, cfg.pipeline.margin).at(Stage::Exterior)?;
    let lambda = estimate.lambda;
    let tol = CHAIN_TOL * lambda;
    let chain = ChainCheck {
        lower_bound,
        y_est: estimate.y_est,
        y_inf_est: estimate.y_inf_est,
        lambda,
        tol,
        holds: lower_bound.map(|lb| chain_holds(lb, estimate.y_est, estimate.y_inf_est, lambda, tol)),
    };
    let verdict = condition_verdict(&estimate);
    let y_table = trace
        .records
        .iter()
        .map(|r| YRow {
            radius: r.radius,
            y_j: r.y_j,
            y_extrapolated: r.continuation.y_extrapolated,
            upper_witness: r.continuation.upper_witness,
            concentrated: r.continuation.concentrated,
        })
        .collect();
    let body = ConstantsBody {
        n,
        profile: profile.warp().name().to_string(),
        y_table,
        exterior,
        exterior_monotone: nondecreasing(&ext_values),
        lower_bound_note,
        estimate,
        chain,
        verdict,
    };
    Ok((Report { header: Header::new("constants", cfg), body }, trace))
}

pub fn condition_verdict(e: &ConstantsEstimate) -> String {
    if e.condition_holds {
        format!(
            "condition Y < Y_inf holds: Y_est = {:.6}, Y_inf_est = {:.6}, gap {:.2}% exceeds the {:.1}% margin",
            e.y_est,
            e.y_inf_est,
            100.0 * e.relative_gap,
            100.0 * e.margin
        )
    } else if e.y_inf_est <= 0.0 {
        format!("condition Y < Y_inf fails: Y_inf_est = {:.6} is not positive", e.y_inf_est)
    } else {
        format!(
            "condition Y < Y_inf fails: Y_est = {:.6} is not below Y_inf_est = {:.6} by the {:.1}% margin (gap {:.2}%)",
            e.y_est,
            e.y_inf_est,
            100.0 * e.margin,
            100.0 * e.relative_gap
        )
    }
}

pub fn cmd_constants(cfg: &RunConfig, out: &Path) -> StageResult<Report<ConstantsBody>> {
    let (report, _) = constants(cfg)?;
    prepare_out(out)?;
    write_json(&out.join("constants.json"), &report).at(Stage::Output)?;
    Ok(report)
}

pub fn render_constants(r: &ConstantsBody) -> String {
    let rows: Vec<Vec<String>> = r
        .y_table
        .iter()
        .map(|y| {
            vec![
                format!("{}", y.radius),
                format!("{:.6}", y.y_j),
                format!("{:.6}", y.y_extrapolated),
                format!("{:.6}", y.upper_witness),
                y.concentrated.to_string(),
            ]
        })
        .collect();
    let mut s = table(&["j", "Y_j", "extrapolated", "witness", "concentrated"], &rows);
    let ext: Vec<Vec<String>> = r
        .exterior
        .iter()
        .map(|e| vec![format!("{}", e.r_in), format!("{:.6}", e.quotient), format!("{:.3e}", e.r_out)])
        .collect();
    s.push('\n');
    s.push_str(&table(&["r_in", "exterior quotient", "R_out"], &ext));
    s.push_str(&format!(
        "\nLambda = {:.6}\nY_est = {:.6}\nY_inf_est = {:.6} (raw {:.6})\n",
        r.estimate.lambda, r.estimate.y_est, r.estimate.y_inf_est, r.estimate.y_inf_raw
    ));
    match (r.chain.lower_bound, r.chain.holds) {
        (Some(lb), Some(h)) => s.push_str(&format!("chain lower <= Y <= Y_inf <= Lambda: {h} (lower = {lb:.6})\n")),
        _ => s.push_str(&format!(
            "chain: lower bound infinite ({})\n",
            r.lower_bound_note.as_deref().unwrap_or("unavailable")
        )),
    }
    s.push_str(&r.verdict);
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustBody {
    pub n: u32,
    pub profile: String,
    pub radii: Vec<f64>,
    pub y_values: Vec<f64>,
    pub subsolution: Vec<SubsolutionReport>,
    pub boundary: BoundaryBound,
    pub verdict: ConcentrationVerdict,
    /// `(K, residual)` of the largest-ball field after the `|Y|^{1/(p-2)}` dilation.
    pub k_normalized: (f64, f64),
    /// `el_residual` of the largest-ball field against its own equation.
    pub final_residual: f64,
    pub files: Vec<ManifestEntry>,
}

fn sha256_file(path: &Path) -> StageResult<String> {
    let bytes = std::fs::read(path).at(Stage::Output)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Runs the exhaustion with its diagnostics and writes the trace under `out/trace`.
pub fn cmd_exhaust(cfg: &RunConfig, out: &Path) -> StageResult<Report<ExhaustBody>> {
    let profile = setup(cfg, true)?;
    let trace = run_exhaustion(&profile, &cfg.pipeline.radii, cfg.grid.per_unit, &cfg.solver).at(Stage::Exhaustion)?;
    let subsolution = trace
        .radii()
        .par_iter()
        .map(|j| subsolution_check(&profile, &trace, *j))
        .collect::<yamabe_lab::Result<Vec<_>>>()
        .at(Stage::Exhaustion)?;
    let boundary = boundary_bound(&trace);
    let verdict = concentration_verdict(&trace, cfg.pipeline.compact_radius).at(Stage::Exhaustion)?;
    let last = trace.last();
    let y_est = last.y_j;
    let k_normalized = k_normalized_residual(&last.field, &profile, y_est).at(Stage::Exhaustion)?;
    let final_residual = el_residual(&last.field, &profile, last.equation.1, last.equation.0).at(Stage::Exhaustion)?;

    prepare_out(out)?;
    let trace_dir = out.join("trace");
    let written = trace.write_dir(&trace_dir).at(Stage::Output)?;
    let mut files = Vec::new();
    for path in &written {
        let rel = path.strip_prefix(out).unwrap_or(path).to_string_lossy().replace('\\', "/");
        files.push(ManifestEntry { file: rel, sha256: sha256_file(path)? });
    }
    let body = ExhaustBody {
        n: cfg.dimension,
        profile: profile.warp().name().to_string(),
        radii: trace.radii(),
        y_values: trace.y_values(),
        subsolution,
        boundary,
        verdict,
        k_normalized,
        final_residual,
        files,
    };
    let report = Report { header: Header::new("exhaust", cfg), body };
    write_json(&out.join("exhaust.json"), &report).at(Stage::Output)?;
    Ok(report)
}

pub fn render_exhaust(r: &ExhaustBody) -> String {
    let rows: Vec<Vec<String>> = r
        .radii
        .iter()
        .zip(&r.y_values)
        .zip(&r.subsolution)
        .zip(&r.boundary.maxima)
        .map(|(((j, y), sub), b)| {
            vec![
                format!("{j}"),
                format!("{y:.6}"),
                format!("{:.3e}", sub.max_violation),
                sub.pass.to_string(),
                format!("{b:.3e}"),
            ]
        })
        .collect();
    let mut s = table(&["j", "Y_j", "weak violation", "subsolution", "boundary max"], &rows);
    s.push_str(&format!(
        "\nboundary ratio {:.3} (pass {})\nverdict {:?}\nfinal residual {:.3e}, K-normalized residual {:.3e} (K = {})\n",
        r.boundary.ratio, r.boundary.pass, r.verdict.verdict, r.final_residual, r.k_normalized.1, r.k_normalized.0
    ));
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayBody {
    pub n: u32,
    pub growth: Option<GrowthFit>,
    pub growth_note: Option<String>,
    /// Smallest `C` with `R >= -C r^{-2}` over the growth window.
    pub curvature_constant: Option<f64>,
    pub y: f64,
    pub y_inf: f64,
    pub exponents: Option<ExponentReport>,
    pub fit: DecayFit,
    pub consistent: Option<bool>,
    pub verdict: String,
}

/// Allowed shortfall of the fitted decay exponent.
pub const DECAY_SLACK: f64 = 0.2;

/// Volume growth, exponent formulas and the empirical decay of a stored trace.
pub fn cmd_decay(cfg: &RunConfig, trace_path: &Path, out: &Path) -> StageResult<Report<DecayBody>> {
    let profile = setup(cfg, false)?;
    let trace = ExhaustionTrace::read(trace_path).at(Stage::Decay)?;
    if trace.dimension.n() != cfg.dimension {
        return Err(StageError {
            stage: Stage::Decay,
            source: Error::Config(format!("trace has n = {} but the config has n = {}", trace.dimension.n(), cfg.dimension)),
        });
    }
    let [lo, hi] = cfg.growth_window();
    let (growth, growth_note) = match profile.volume_growth_exponent(lo, hi) {
        Ok(g) => (Some(g), None),
        Err(e @ Error::ExponentialGrowth { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(StageError { stage: Stage::Decay, source: e }),
    };
    let curvature_constant = profile.curvature_decay_constant(lo, hi, 64).ok();
    let fit = decay_fit(&trace, cfg.pipeline.window_frac).at(Stage::Decay)?;
    let y = trace.last().y_j;
    let mut inner: Vec<f64> = cfg.exterior_radii();
    if inner.is_empty() {
        inner = trace.radii();
    }
    let exteriors = exterior_sequence(&profile, &inner, &cfg.solver, &cfg.exterior).at(Stage::Exterior)?;
    let raw = exteriors.iter().map(|e| e.report.quotient).fold(f64::NEG_INFINITY, f64::max);
    let y_inf = raw.min(lambda_constant(cfg.dimension).at(Stage::Decay)?);
    let (exponents, consistent, verdict) = match &growth {
        None => (None, None, format!("hypothesis fails: {}", growth_note.clone().unwrap_or_default())),
        Some(g) => match exponent_formulas(cfg.dimension, y, y_inf, g.rho) {
            Ok(mut rep) => {
                rep.alpha_fitted = Some(fit.alpha);
                rep.fit_residual = Some(fit.residual);
                let ok = fit.alpha >= rep.alpha_predicted - DECAY_SLACK;
                let verdict = if ok {
                    format!(
                        "empirical decay consistent with the predicted rate: alpha_fitted = {:.4} >= {:.4} - {DECAY_SLACK}",
                        fit.alpha, rep.alpha_predicted
                    )
                } else {
                    format!(
                        "empirical decay slower than predicted: alpha_fitted = {:.4} < {:.4} - {DECAY_SLACK}",
                        fit.alpha, rep.alpha_predicted
                    )
                };
                (Some(rep), Some(ok), verdict)
            }
            Err(e) => (None, None, format!("hypothesis fails: {e}")),
        },
    };
    let body = DecayBody { n: cfg.dimension, growth, growth_note, curvature_constant, y, y_inf, exponents, fit, consistent, verdict };
    prepare_out(out)?;
    let report = Report { header: Header::new("decay", cfg), body };
    write_json(&out.join("decay.json"), &report).at(Stage::Output)?;
    Ok(report)
}

pub fn render_decay(r: &DecayBody) -> String {
    let mut s = String::new();
    match &r.growth {
        Some(g) => s.push_str(&format!("volume growth rho = {:.4} (residual {:.2e})\n", g.rho, g.residual)),
        None => s.push_str(&format!("volume growth: {}\n", r.growth_note.as_deref().unwrap_or(""))),
    }
    if let Some(e) = &r.exponents {
        s.push_str(&table(
            &["beta0", "delta", "rho", "rho0", "alpha_predicted", "alpha_fitted"],
            &[vec![
                format!("{:.4}", e.beta0),
                format!("{:.4}", e.delta),
                format!("{:.4}", e.rho),
                format!("{:.4}", e.rho0),
                format!("{:.4}", e.alpha_predicted),
                format!("{:.4}", r.fit.alpha),
            ]],
        ));
    } else {
        s.push_str(&format!("alpha_fitted = {:.4}\n", r.fit.alpha));
    }
    s.push_str(&r.verdict);
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleRow {
    pub alpha: f64,
    pub quotient: f64,
    pub excess: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleBody {
    pub n: u32,
    pub eps: f64,
    pub lambda: f64,
    pub rows: Vec<BubbleRow>,
    /// Slope of `log(Q - Λ)` against `log α`; `None` when some excess is not positive.
    pub rate: Option<f64>,
    pub rate_residual: Option<f64>,
}

/// Intervals on `[0, 2ε]` for the bubble test: at least the configured density
/// and 64 cells per core radius `α`.
pub fn bubble_intervals(per_unit: f64, alpha: f64, eps: f64) -> usize {
    let radius = 2.0 * eps;
    ((per_unit * radius).ceil() as usize).max((64.0 * radius / alpha).ceil() as usize)
}

/// Critical quotients of cut-off bubbles and the fitted excess rate.
pub fn cmd_bubble(cfg: &RunConfig, alphas: &[f64], eps: f64, out: &Path) -> StageResult<Report<BubbleBody>> {
    let profile = setup(cfg, false)?;
    if alphas.len() < 2 {
        return Err(StageError { stage: Stage::Config, source: Error::Config("bubble needs at least two alphas".into()) });
    }
    let p = profile.dim().critical_exponent();
    let lambda = lambda_constant(cfg.dimension).at(Stage::Bubble)?;
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let spec = BubbleSpec::new(alpha, eps)?;
            let intervals = bubble_intervals(cfg.grid.per_unit, alpha, eps);
            let grid = RadialGrid::new(2.0 * eps, intervals)?;
            let q = bubble_quotient(&profile, &spec, p, &grid)?;
            Ok(BubbleRow { alpha, quotient: q.quotient, excess: q.quotient - lambda, intervals })
        })
        .collect::<yamabe_lab::Result<Vec<_>>>()
        .at(Stage::Bubble)?;
    let (rate, rate_residual) = if rows.iter().all(|r| r.excess > 0.0) {
        let xs: Vec<f64> = rows.iter().map(|r| r.alpha.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.excess.ln()).collect();
        let (slope, _, res) = linear_fit(&xs, &ys);
        (Some(slope), Some(res))
    } else {
        (None, None)
    };
    let body = BubbleBody { n: cfg.dimension, eps, lambda, rows, rate, rate_residual };
    prepare_out(out)?;
    let mut csv = String::from("alpha,quotient,excess\n");
    for r in &body.rows {
        csv.push_str(&format!("{:e},{:e},{:e}\n", r.alpha, r.quotient, r.excess));
    }
    std::fs::write(out.join("bubble.csv"), csv).at(Stage::Output)?;
    let report = Report { header: Header::new("bubble", cfg), body };
    write_json(&out.join("bubble.json"), &report).at(Stage::Output)?;
    Ok(report)
}

pub fn render_bubble(r: &BubbleBody) -> String {
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|b| vec![format!("{}", b.alpha), format!("{:.6}", b.quotient), format!("{:.4e}", b.excess)])
        .collect();
    let mut s = table(&["alpha", "Q", "Q - Lambda"], &rows);
    match r.rate {
        Some(k) => s.push_str(&format!("excess rate alpha^{k:.3}\n")),
        None => s.push_str("excess rate unavailable (nonpositive excess)\n"),
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupBody {
    pub n: u32,
    pub m: f64,
    pub delta: f64,
    pub center: f64,
    pub window: f64,
    /// Constant of the comparison bubble.
    pub y: f64,
    pub bubble_deviation: f64,
    pub identity: IdentityReport,
    pub contradiction: Option<ContradictionReport>,
    pub contradiction_note: Option<String>,
}

/// Rescales a stored field about its maximum and compares it with the standard bubble.
pub fn cmd_blowup(cfg: &RunConfig, field_path: &Path, out: &Path) -> StageResult<Report<BlowupBody>> {
    let profile = setup(cfg, false)?;
    let read = |b| RadialField::read_csv(File::open(field_path)?, b);
    let mut field = read(Boundary::Free).at(Stage::Blowup)?;
    if field.vanishes_at_boundary() {
        field = read(Boundary::DirichletZero).at(Stage::Blowup)?;
    }
    let p = profile.dim().critical_exponent();
    let y = match cfg.pipeline.blowup_y {
        Some(y) => y,
        None => quotient(&field, &profile, p).at(Stage::Blowup)?,
    };
    let v = rescale(&field, &profile).at(Stage::Blowup)?;
    let bubble_deviation = v.bubble_deviation(y).at(Stage::Blowup)?;
    let identity = energy_identity_check(&v.samples, y, v.window).at(Stage::Blowup)?;
    let (contradiction, contradiction_note) = match contradiction_test(&v.samples, y) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    prepare_out(out)?;
    v.samples
        .write_csv(BufWriter::new(File::create(out.join("rescaled.csv")).at(Stage::Output)?))
        .at(Stage::Output)?;
    let body = BlowupBody {
        n: cfg.dimension,
        m: v.m,
        delta: v.delta,
        center: v.center,
        window: v.window,
        y,
        bubble_deviation,
        identity,
        contradiction,
        contradiction_note,
    };
    let report = Report { header: Header::new("blowup", cfg), body };
    write_json(&out.join("blowup.json"), &report).at(Stage::Output)?;
    Ok(report)
}

pub fn render_blowup(r: &BlowupBody) -> String {
    let mut s = format!(
        "m = {:.6}, delta = {:.3e}, center = {}, window = {:.3}\nsup |v - bubble(Y = {:.6})| = {:.4e}\n",
        r.m, r.delta, r.center, r.window, r.y, r.bubble_deviation
    );
    s.push_str(&format!(
        "identity: grad {:.6}, Y int v^p {:.6}, flux {:.6}, relative defect {:.3e}\n",
        r.identity.gradient, r.identity.potential, r.identity.flux, r.identity.relative_defect
    ));
    match (&r.contradiction, &r.contradiction_note) {
        (Some(c), _) => s.push_str(&format!("Lambda = {:.6} vs Y (int v^p)^(2/n) = {:.6}: {:?}\n", c.lhs, c.rhs, c.verdict)),
        (None, Some(note)) => s.push_str(&format!("contradiction test refused: {note}\n")),
        _ => {}
    }
    s
}

/// Default output directory.
pub fn default_out() -> PathBuf {
    PathBuf::from("yamabe-out")
}
