use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::profile::{MetricProfile, Warp, WarpTable};
use crate::dimension::Dimension;
use crate::error::{Error, Result};

/// The `[profile]` block of a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_path: Option<PathBuf>,
}

/// Profile definition: `dimension`, `r_max` and the `[profile]` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub dimension: u32,
    pub r_max: f64,
    pub profile: WarpConfig,
}

impl ProfileConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds the profile; relative table paths resolve against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<MetricProfile> {
        let dim = Dimension::new(self.dimension)?;
        let p = &self.profile.params;
        let get = |key: &str| {
            p.get(key)
                .copied()
                .ok_or_else(|| Error::Config(format!("profile `{}` needs params.{key}", self.profile.name)))
        };
        let warp = match self.profile.name.as_str() {
            "euclidean" => Warp::Euclidean,
            "hyperbolic" => Warp::Hyperbolic,
            "cigar" => Warp::Cigar,
            "spherical" => Warp::Spherical,
            "power-bump" => Warp::PowerBump { a: get("a")?, b: get("b")? },
            "custom" | "table" => {
                let rel = self
                    .profile
                    .table_path
                    .as_ref()
                    .ok_or_else(|| Error::Config("custom profile needs profile.table_path".into()))?;
                let path = match base {
                    Some(b) if rel.is_relative() => b.join(rel),
                    _ => rel.clone(),
                };
                if !path.exists() {
                    return Err(Error::Config(format!("table file {} does not exist", path.display())));
                }
                Warp::Table(WarpTable::from_csv(&path)?)
            }
            other => return Err(Error::Config(format!("unknown profile name `{other}`"))),
        };
        MetricProfile::new(dim, warp, self.r_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bump() {
        let cfg = ProfileConfig::from_toml_str(
            r#"
dimension = 3
r_max = 1e6
[profile]
name = "power-bump"
params = { a = 2.0, b = 0.5 }
"#,
        )
        .unwrap();
        let p = cfg.build(None).unwrap();
        assert!(matches!(p.warp(), Warp::PowerBump { a, b } if *a == 2.0 && *b == 0.5));
    }

    #[test]
    fn missing_param_and_unknown_name() {
        let cfg = ProfileConfig::from_toml_str(
            "dimension = 3\nr_max = 10.0\n[profile]\nname = \"power-bump\"\nparams = { a = 1.0 }\n",
        )
        .unwrap();
        assert!(matches!(cfg.build(None), Err(Error::Config(_))));
        let cfg = ProfileConfig::from_toml_str("dimension = 3\nr_max = 10.0\n[profile]\nname = \"torus\"\n").unwrap();
        assert!(matches!(cfg.build(None), Err(Error::Config(_))));
    }

    #[test]
    fn table_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("warp.csv");
        let mut text = String::from("r,f\n");
        for i in 0..=400 {
            let r = i as f64 * 0.01;
            text.push_str(&format!("{r},{}\n", r.sinh()));
        }
        std::fs::write(&path, text).unwrap();
        let cfg = ProfileConfig::from_toml_str(
            "dimension = 3\nr_max = 4.0\n[profile]\nname = \"custom\"\ntable_path = \"warp.csv\"\n",
        )
        .unwrap();
        let p = cfg.build(Some(dir.path())).unwrap();
        let r = p.scalar_curvature(1.0).unwrap();
        assert!((r + 6.0).abs() < 1e-2, "table curvature {r}");
    }
}
