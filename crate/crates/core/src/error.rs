use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("radius {r} outside profile domain [0, {r_max}]")]
    OutOfDomain { r: f64, r_max: f64 },

    #[error("table too sparse for stable differentiation: {0}")]
    SparseTable(String),

    #[error("grid/profile mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("growth is exponential on [{lo}, {hi}]: log V is linear in r, not in log r")]
    ExponentialGrowth { lo: f64, hi: f64 },

    #[error("grid too coarse: {inside} nodes inside r <= alpha, need 16 (use at least {required} intervals)")]
    GridTooCoarse { inside: usize, required: usize },

    #[error("negative-part curvature integral diverges (tail share {tail_share:.3e} on [{half}, {r_out}])")]
    DivergentTail { tail_share: f64, half: f64, r_out: f64 },

    #[error("exterior quotient did not stabilize before r_max = {r_max} (last change {last_change:.3e}); r_max too small")]
    ExteriorNotStable { r_max: f64, last_change: f64 },

    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence {
        iters: usize,
        residual: f64,
        last_iterate: Vec<f64>,
        multiplier: f64,
    },

    #[error("converged solution has {count} non-positive interior nodes; discretization too coarse")]
    NegativeNodes { count: usize },

    #[error("singular linear system at row {0}")]
    Singular(usize),

    #[error("existence margin exhausted: C0*Y_j = {0} >= 1")]
    MarginExhausted(f64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition rho < rho0 violated: rho = {rho}, rho0 = {rho0}")]
    RhoTooLarge { rho: f64, rho0: f64 },

    #[error("solve failed at radius j = {j}: {source}")]
    AtRadius {
        j: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("Y_j not monotone: Y({j_prev}) = {y_prev}, Y({j_next}) = {y_next}, tolerance {tol:.3e}")]
    NotMonotone {
        j_prev: f64,
        y_prev: f64,
        j_next: f64,
        y_next: f64,
        tol: f64,
    },

    #[error("maximum attained at the boundary node (r = {0}); only interior blow-up is supported")]
    MaxAtBoundary(f64),

    #[error("tail extrapolation refused: {0}")]
    TailRefused(String),

    #[error("decay fit window is empty: {0}")]
    EmptyWindow(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}
