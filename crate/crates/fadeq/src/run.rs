//! Subcommand bodies: run a harness operation, write CSVs and a manifest.

use std::path::{Path, PathBuf};

use anyhow::Context;
use fadeq_core::alpha_mu::Preset;
use fadeq_core::harness::{self, BerCurve, ExperimentConfig, Executor, SweepParam, SweepValue};

use crate::config::{self, parse_count, parse_preset};
use crate::manifest::{PointRecord, ResultRecord, RunManifest};
use crate::output::emit_csv;

/// `results/ber.csv` → `results/ber.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.manifest.json"))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn ber_record(label: Option<String>, csv: String, curve: &BerCurve) -> ResultRecord {
    let points = curve
        .points
        .iter()
        .zip(curve.trials.iter().zip(&curve.excluded))
        .map(|(p, (&trials, &excluded))| PointRecord { x: p.x, trials, excluded })
        .collect();
    ResultRecord { label, csv, points }
}

/// BER curve to `csv`, manifest alongside.
pub fn ber<E: Executor>(cfg: &ExperimentConfig, exec: &E, csv: &Path) -> anyhow::Result<RunManifest> {
    let mut manifest = RunManifest::new("ber", &config::to_text(cfg), cfg.master_seed);
    let curve = harness::run_ber_experiment(cfg, exec)?;
    emit_csv(&curve.points, csv)?;
    manifest.results.push(ber_record(None, file_name(csv), &curve));
    manifest.finish();
    manifest.write(&manifest_path(csv))?;
    Ok(manifest)
}

/// MSE convergence curve to `csv`, manifest alongside.
pub fn converge<E: Executor>(cfg: &ExperimentConfig, exec: &E, csv: &Path) -> anyhow::Result<RunManifest> {
    let mut manifest = RunManifest::new("converge", &config::to_text(cfg), cfg.master_seed);
    let curve = harness::run_convergence_experiment(cfg, exec)?;
    emit_csv(&curve.points, csv)?;
    manifest.results.push(ResultRecord {
        label: None,
        csv: file_name(csv),
        points: vec![PointRecord {
            x: cfg.snr_grid_db[0],
            trials: curve.runs + curve.excluded,
            excluded: curve.excluded,
        }],
    });
    manifest.finish();
    manifest.write(&manifest_path(csv))?;
    Ok(manifest)
}

/// Parses a comma list of sweep values for `param`.
pub fn parse_sweep_values(param: SweepParam, values: &str) -> anyhow::Result<Vec<SweepValue>> {
    values
        .split(',')
        .map(|v| {
            let parsed = match param {
                SweepParam::Preset => parse_preset(v).map(SweepValue::Preset),
                _ => parse_count(v).map(SweepValue::Count),
            };
            parsed.map_err(|e| anyhow::anyhow!("--values: {e}"))
        })
        .collect()
}

pub fn sweep_label(value: SweepValue) -> String {
    match value {
        SweepValue::Count(n) => n.to_string(),
        SweepValue::Preset(p) => p.key().to_string(),
    }
}

/// One CSV per value plus `manifest.json` in `dir`.
pub fn sweep<E: Executor>(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[SweepValue],
    exec: &E,
    dir: &Path,
) -> anyhow::Result<RunManifest> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = RunManifest::new("sweep", &config::to_text(cfg), cfg.master_seed);
    manifest.sweep_param = Some(param.key().to_string());
    for (value, curve) in harness::run_sweep(cfg, param, values, exec)? {
        let label = sweep_label(value);
        let name = format!("{}_{label}.csv", param.key());
        emit_csv(&curve.points, &dir.join(&name))?;
        manifest.results.push(ber_record(Some(label), name, &curve));
    }
    manifest.finish();
    manifest.write(&dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Fitted link presets as a text table.
pub fn presets_table() -> String {
    let mut out = String::from("preset   alpha  mu    LOS      beta(K=1)\n");
    for p in Preset::ALL {
        let los = match p.los() {
            Some(true) => "LOS",
            Some(false) => "NLOS",
            None => "unknown",
        };
        let beta = p.params_for_taps(1).map(|a| a.beta()).unwrap_or(f64::NAN);
        out.push_str(&format!("{:<8} {:<6} {:<5} {:<8} {:.6}\n", p.name(), p.alpha(), p.mu(), los, beta));
    }
    out.push_str(
        "\nalpha and mu are maximum-likelihood fits to measured sub-THz links;\n\
         beta is not reported by the measurement and is set for unit mean channel energy.\n",
    );
    out
}
