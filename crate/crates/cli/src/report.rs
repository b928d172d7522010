use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Scope statement carried by every report.
pub const SCOPE: &str = "radial class: every constant is an infimum over rotationally symmetric test fields";

/// Field excluded from determinism comparisons.
pub const TIMESTAMP_FIELD: &str = "timestamp";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub command: String,
    pub config_hash: String,
    pub versions: BTreeMap<String, String>,
    pub scope: String,
    pub timestamp: String,
}

impl Header {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        let versions = BTreeMap::from([
            ("yamabe-lab".to_string(), yamabe_lab::VERSION.to_string()),
            ("yamabe-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]);
        Header {
            command: command.to_string(),
            config_hash: cfg.hash(),
            versions,
            scope: SCOPE.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// A JSON report: the header followed by the command's own fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<T> {
    pub header: Header,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Drops every `timestamp` key, recursively.
pub fn strip_timestamps(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.remove(TIMESTAMP_FIELD);
            map.values_mut().for_each(strip_timestamps);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timestamps),
        _ => {}
    }
}

/// Renders rows as a left-aligned text table.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(headers.to_vec());
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_nested_timestamps() {
        let mut v = serde_json::json!({"header": {"timestamp": "x", "a": 1}, "rows": [{"timestamp": 2}]});
        strip_timestamps(&mut v);
        assert_eq!(v, serde_json::json!({"header": {"a": 1}, "rows": [{}]}));
    }

    #[test]
    fn table_alignment() {
        let t = table(&["j", "Y_j"], &[vec!["2".into(), "5.59".into()], vec!["16".into(), "5.5".into()]]);
        assert_eq!(t, "j   Y_j\n2   5.59\n16  5.5\n");
    }
}
