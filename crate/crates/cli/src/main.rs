use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use yamabe_cli::commands::{self, default_out};
use yamabe_cli::config::parse_csv_list;
use yamabe_cli::{RunConfig, Stage, StageError};

/// Yamabe constants, exhaustion traces and blow-up diagnostics on
/// rotationally symmetric manifolds.
///
/// Configs are TOML: `dimension`, `r_max`, `[profile]` (name, params, table_path),
/// `[grid]` (per_unit = 128), `[solver]` (tol = 1e-9, max_iters = 60,
/// max_halvings = 20, eps_s = 1e-3, s_start = 2.1, schedule_len = 16,
/// concentration_cap = 1e3, core_cells = 8, critical_solve = true),
/// `[exterior]` (tol_out = 1e-3, nodes_per_efold = 128, r_out_max = 1e8) and
/// `[pipeline]` (radii, exterior_radii, window_frac = 0.5, margin = 0.05,
/// compact_radius = 1, growth_window, lower_bound_radius,
/// bubble_alphas = [0.1, 0.05, 0.025], bubble_eps = 0.5, blowup_y).
#[derive(Parser, Debug)]
#[command(name = "yamabe", version)]
struct Cli {
    /// Worker threads for per-radius and per-alpha work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// One comma-separated argument; an alias keeps clap from reading `Vec` as repeated values.
type CsvList = Vec<f64>;

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for JSON reports, traces and CSVs.
    #[arg(long, default_value_os_t = default_out())]
    out: PathBuf,
    /// Override pipeline.radii, e.g. `2,4,8`.
    #[arg(long, value_parser = parse_csv_list)]
    radii: Option<CsvList>,
    /// Override solver.eps_s (s_max = p (1 - eps)).
    #[arg(long)]
    s_max_eps: Option<f64>,
    /// Override pipeline.window_frac.
    #[arg(long)]
    window_frac: Option<f64>,
    /// Override pipeline.margin.
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Y_j table, Y and Y_inf estimates, the comparison chain and the existence condition.
    Constants(Common),
    /// Exhaustion trace with subsolution, boundary and concentration diagnostics.
    Exhaust(Common),
    /// Volume growth, decay exponents and the empirical decay of a stored trace.
    Decay {
        #[command(flatten)]
        common: Common,
        /// Trace directory or trace.jsonl written by `exhaust`.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Critical quotients of cut-off bubbles and their excess rate.
    Bubble {
        #[command(flatten)]
        common: Common,
        /// Core radii, e.g. `0.1,0.05,0.025` (default: pipeline.bubble_alphas).
        #[arg(long, value_parser = parse_csv_list)]
        alphas: Option<CsvList>,
        /// Cut-off radius (default: pipeline.bubble_eps).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Blow-up rescaling of a stored field and bubble diagnostics.
    Blowup {
        #[command(flatten)]
        common: Common,
        /// Field CSV with columns `r,u`.
        #[arg(long)]
        field: PathBuf,
    },
}

fn load(common: &Common) -> Result<RunConfig, StageError> {
    let mut cfg = RunConfig::load(&common.config).map_err(|source| StageError { stage: Stage::Config, source })?;
    if let Some(r) = &common.radii {
        cfg.pipeline.radii = r.clone();
    }
    if let Some(e) = common.s_max_eps {
        cfg.solver.eps_s = e;
    }
    if let Some(w) = common.window_frac {
        cfg.pipeline.window_frac = w;
    }
    if let Some(m) = common.margin {
        cfg.pipeline.margin = m;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, StageError> {
    match cli.command {
        Command::Constants(c) => {
            let cfg = load(&c)?;
            Ok(commands::render_constants(&commands::cmd_constants(&cfg, &c.out)?.body))
        }
        Command::Exhaust(c) => {
            let cfg = load(&c)?;
            Ok(commands::render_exhaust(&commands::cmd_exhaust(&cfg, &c.out)?.body))
        }
        Command::Decay { common, trace } => {
            let cfg = load(&common)?;
            Ok(commands::render_decay(&commands::cmd_decay(&cfg, &trace, &common.out)?.body))
        }
        Command::Bubble { common, alphas, eps } => {
            let cfg = load(&common)?;
            let alphas = alphas.unwrap_or_else(|| cfg.pipeline.bubble_alphas.clone());
            let eps = eps.unwrap_or(cfg.pipeline.bubble_eps);
            Ok(commands::render_bubble(&commands::cmd_bubble(&cfg, &alphas, eps, &common.out)?.body))
        }
        Command::Blowup { common, field } => {
            let cfg = load(&common)?;
            Ok(commands::render_blowup(&commands::cmd_blowup(&cfg, &field, &common.out)?.body))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("cannot size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.stage.exit_code() as u8)
        }
    }
}
