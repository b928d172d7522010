use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use yamabe_lab::functional::ExteriorConfig;
use yamabe_lab::manifold::{MetricProfile, ProfileConfig, WarpConfig};
use yamabe_lab::subcritical::SolverConfig;
use yamabe_lab::{Error, Result};

/// Uniform grid density for ball solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Intervals per unit radius.
    pub per_unit: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { per_unit: 128.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Exhaustion radii `j_1 < ... < j_m`.
    pub radii: Vec<f64>,
    /// Inner radii of the exterior annuli used for `Y_inf`; empty means the exhaustion radii.
    pub exterior_radii: Vec<f64>,
    /// Outer fraction of the largest ball used by the decay fit.
    pub window_frac: f64,
    /// Relative margin in `Y_est < Y_inf_est - margin |Y_inf_est|`.
    pub margin: f64,
    /// Radius `R` of the fixed ball watched by the concentration verdict.
    pub compact_radius: f64,
    /// Volume-growth fit window; defaults to `[j_m, 8 j_m]`.
    pub growth_window: Option<[f64; 2]>,
    /// Radius for the negative-curvature lower bound; defaults to `min(r_max, 64 j_m)`.
    pub lower_bound_radius: Option<f64>,
    pub bubble_alphas: Vec<f64>,
    pub bubble_eps: f64,
    /// Comparison constant for `blowup`; defaults to the field's own quotient.
    pub blowup_y: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            radii: Vec::new(),
            exterior_radii: Vec::new(),
            window_frac: 0.5,
            margin: 0.05,
            compact_radius: 1.0,
            growth_window: None,
            lower_bound_radius: None,
            bubble_alphas: vec![0.1, 0.05, 0.025],
            bubble_eps: 0.5,
            blowup_y: None,
        }
    }
}

/// A full run: profile, grid, solver, exterior and pipeline blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: u32,
    pub r_max: f64,
    pub profile: WarpConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub exterior: ExteriorConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    /// Directory that relative table paths resolve against; not part of the file.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn profile_config(&self) -> ProfileConfig {
        ProfileConfig { dimension: self.dimension, r_max: self.r_max, profile: self.profile.clone() }
    }

    pub fn build_profile(&self) -> Result<MetricProfile> {
        self.profile_config().build(self.base_dir.as_deref())
    }

    /// Range checks shared by every command; `needs_radii` for the exhaustion-based ones.
    pub fn validate(&self, needs_radii: bool) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.solver.validate()?;
        if !(self.grid.per_unit >= 8.0) {
            return bad(format!("grid.per_unit must be at least 8, got {}", self.grid.per_unit));
        }
        let p = &self.pipeline;
        if needs_radii {
            if p.radii.len() < 3 {
                return bad("pipeline.radii needs at least 3 increasing radii".into());
            }
            if p.radii.windows(2).any(|w| w[1] <= w[0]) || p.radii[0] <= 0.0 {
                return bad("pipeline.radii must be positive and increasing".into());
            }
            if p.radii.iter().any(|r| *r > self.r_max) {
                return bad(format!("pipeline.radii exceed r_max = {}", self.r_max));
            }
            if !(p.compact_radius > 0.0 && p.compact_radius < p.radii[0]) {
                return bad(format!("pipeline.compact_radius must lie in (0, {})", p.radii[0]));
            }
        }
        if !(p.window_frac > 0.0 && p.window_frac < 1.0) {
            return bad("pipeline.window_frac must lie in (0, 1)".into());
        }
        if !(p.margin >= 0.0 && p.margin < 1.0) {
            return bad("pipeline.margin must lie in [0, 1)".into());
        }
        if p.exterior_radii.iter().any(|r| !(*r > 0.0)) || p.exterior_radii.windows(2).any(|w| w[1] <= w[0]) {
            return bad("pipeline.exterior_radii must be positive and increasing".into());
        }
        if p.bubble_alphas.iter().any(|a| !(*a > 0.0 && *a < p.bubble_eps)) {
            return bad("pipeline.bubble_alphas must lie in (0, bubble_eps)".into());
        }
        if let Some([lo, hi]) = p.growth_window {
            if !(lo > 0.0 && hi > lo) {
                return bad("pipeline.growth_window must be [lo, hi] with 0 < lo < hi".into());
            }
        }
        Ok(())
    }

    pub fn exterior_radii(&self) -> Vec<f64> {
        if self.pipeline.exterior_radii.is_empty() {
            self.pipeline.radii.clone()
        } else {
            self.pipeline.exterior_radii.clone()
        }
    }

    pub fn growth_window(&self) -> [f64; 2] {
        let last = self.pipeline.radii.last().copied().unwrap_or(1.0);
        self.pipeline.growth_window.unwrap_or([last, (8.0 * last).min(self.r_max)])
    }

    pub fn lower_bound_radius(&self) -> f64 {
        let last = self.pipeline.radii.last().copied().unwrap_or(1.0);
        self.pipeline.lower_bound_radius.unwrap_or((64.0 * last).min(self.r_max))
    }

    /// SHA-256 of the canonical JSON form (sorted keys) of the effective configuration.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}

/// Parses `1,2.5,4` into numbers.
pub fn parse_csv_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}
