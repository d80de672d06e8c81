//! Run manifest written next to every result file.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// `ber`, `converge` or `sweep`.
    pub command: String,
    /// Fully resolved configuration in config-file syntax.
    pub config: String,
    pub master_seed: u64,
    /// Present for sweeps; each result then overrides `param` with `label`.
    pub sweep_param: Option<String>,
    pub started: String,
    pub finished: String,
    pub results: Vec<ResultRecord>,
}

/// One CSV file and its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Sweep value, if any.
    pub label: Option<String>,
    /// File name relative to the manifest.
    pub csv: String,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: f64,
    /// Trials attempted (BER) or training runs (convergence).
    pub trials: u64,
    /// Trials dropped after a numerical breakdown.
    pub excluded: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: &str, master_seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.to_string(),
            master_seed,
            sweep_param: None,
            started: now(),
            finished: String::new(),
            results: Vec::new(),
        }
    }

    pub fn finish(&mut self) {
        self.finished = now();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
