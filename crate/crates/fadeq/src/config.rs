//! Plain-text `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are
//! errors. Every key is optional; missing keys take the defaults of
//! [`ExperimentConfig::default`]. [`to_text`] writes every resolved key, so
//! `parse(to_text(c)) == c`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fadeq_core::alpha_mu::Preset;
use fadeq_core::harness::{ChannelSpec, EqualizerKind, ExperimentConfig, Normalization};
use fadeq_core::C64;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    Duplicate(String),
    #[error("key `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] fadeq_core::Error),
}

/// Recognized keys, in the order [`to_text`] writes them.
pub const KEYS: &[&str] = &[
    "preset",
    "alpha",
    "mu",
    "beta",
    "fixed_taps",
    "channel_taps",
    "normalization",
    "snr",
    "stream_length",
    "num_streams",
    "min_errors",
    "training_length",
    "equalizer",
    "equalizer_taps",
    "step_size",
    "forgetting",
    "initial_p_scale",
    "decision_delay",
    "num_runs_for_mse",
    "seed",
];

/// Raw key/value pairs before resolution; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: line.to_string(),
            })?;
            let key = key.trim();
            if raw.entries.contains_key(key) {
                return Err(ConfigError::Duplicate(key.to_string()));
            }
            raw.set(key, value.trim())?;
        }
        Ok(raw)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        use anyhow::Context;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Sets or overrides one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Applies defaults and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let d = ExperimentConfig::default();
        let channel = if let Some(taps) = self.get("fixed_taps") {
            for k in ["preset", "alpha", "mu", "beta"] {
                if self.get(k).is_some() {
                    return Err(value_err(k, "cannot be combined with fixed_taps"));
                }
            }
            ChannelSpec::Fixed(parse_taps(taps).map_err(|r| value_err("fixed_taps", &r))?)
        } else if self.get("alpha").is_some() || self.get("mu").is_some() {
            if self.get("preset").is_some() {
                return Err(value_err("preset", "cannot be combined with alpha/mu"));
            }
            ChannelSpec::Custom {
                alpha: self.required_f64("alpha")?,
                mu: self.required_f64("mu")?,
                beta: self.opt("beta", parse_f64)?,
            }
        } else {
            if self.get("beta").is_some() {
                return Err(value_err("beta", "needs alpha and mu"));
            }
            ChannelSpec::Preset(self.opt("preset", parse_preset)?.unwrap_or(Preset::RxTx1))
        };
        let cfg = ExperimentConfig {
            channel,
            channel_taps: self.opt("channel_taps", parse_count)?.unwrap_or(d.channel_taps),
            normalization: self.opt("normalization", parse_normalization)?.unwrap_or(d.normalization),
            snr_grid_db: self.opt("snr", parse_grid)?.unwrap_or(d.snr_grid_db),
            stream_length: self.opt("stream_length", parse_count)?.unwrap_or(d.stream_length),
            num_streams: self.opt("num_streams", parse_u64)?.unwrap_or(d.num_streams),
            min_errors: self.opt("min_errors", parse_u64)?.unwrap_or(d.min_errors),
            training_length: self.opt("training_length", parse_count)?.unwrap_or(d.training_length),
            equalizer: self.opt("equalizer", parse_equalizer)?.unwrap_or(d.equalizer),
            equalizer_taps: self.opt("equalizer_taps", parse_count)?.unwrap_or(d.equalizer_taps),
            step_size: self.opt("step_size", parse_f64)?.unwrap_or(d.step_size),
            forgetting: self.opt("forgetting", parse_f64)?.unwrap_or(d.forgetting),
            initial_p_scale: self.opt("initial_p_scale", parse_f64)?.unwrap_or(d.initial_p_scale),
            decision_delay: match self.get("decision_delay") {
                None | Some("auto") => None,
                Some(v) => Some(parse_count(v).map_err(|r| value_err("decision_delay", &r))?),
            },
            num_runs_for_mse: self.opt("num_runs_for_mse", parse_u64)?.unwrap_or(d.num_runs_for_mse),
            master_seed: self.opt("seed", parse_u64)?.unwrap_or(d.master_seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn opt<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        self.get(key).map(|v| f(v).map_err(|r| value_err(key, &r))).transpose()
    }

    fn required_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.opt(key, parse_f64)?.ok_or_else(|| value_err(key, "required"))
    }
}

/// Parses and resolves a whole config text.
pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    RawConfig::parse(text)?.resolve()
}

/// Writes every resolved key.
pub fn to_text(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    match &cfg.channel {
        ChannelSpec::Preset(p) => kv("preset", p.key().to_string()),
        ChannelSpec::Custom { alpha, mu, beta } => {
            kv("alpha", alpha.to_string());
            kv("mu", mu.to_string());
            if let Some(b) = beta {
                kv("beta", b.to_string());
            }
        }
        ChannelSpec::Fixed(taps) => kv("fixed_taps", format_taps(taps)),
    }
    kv("channel_taps", cfg.channel_taps.to_string());
    kv(
        "normalization",
        match cfg.normalization {
            Normalization::MeanPower => "mean_power",
            Normalization::PerRealization => "per_realization",
        }
        .to_string(),
    );
    kv("snr", cfg.snr_grid_db.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","));
    kv("stream_length", cfg.stream_length.to_string());
    kv("num_streams", cfg.num_streams.to_string());
    kv("min_errors", cfg.min_errors.to_string());
    kv("training_length", cfg.training_length.to_string());
    kv("equalizer", cfg.equalizer.key().to_string());
    kv("equalizer_taps", cfg.equalizer_taps.to_string());
    kv("step_size", cfg.step_size.to_string());
    kv("forgetting", cfg.forgetting.to_string());
    kv("initial_p_scale", cfg.initial_p_scale.to_string());
    kv(
        "decision_delay",
        cfg.decision_delay.map_or_else(|| "auto".to_string(), |d| d.to_string()),
    );
    kv("num_runs_for_mse", cfg.num_runs_for_mse.to_string());
    kv("seed", cfg.master_seed.to_string());
    out
}

fn value_err(key: &str, reason: &str) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got {s:?}"))
}

pub fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got {s:?}"))
}

pub fn parse_preset(s: &str) -> Result<Preset, String> {
    Preset::from_key(s.trim()).ok_or_else(|| format!("unknown preset {s:?} (rxtx1, rxtx2, rxtx5)"))
}

pub fn parse_equalizer(s: &str) -> Result<EqualizerKind, String> {
    EqualizerKind::from_key(s.trim()).ok_or_else(|| format!("unknown equalizer {s:?} (none, zf, lms, rls)"))
}

fn parse_normalization(s: &str) -> Result<Normalization, String> {
    match s.trim() {
        "mean_power" => Ok(Normalization::MeanPower),
        "per_realization" => Ok(Normalization::PerRealization),
        _ => Err(format!("unknown normalization {s:?} (mean_power, per_realization)")),
    }
}

/// SNR grid: `start:step:stop` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, step, b] = parts[..] else {
            return Err(format!("range must be start:step:stop, got {s:?}"));
        };
        let (a, step, b) = (parse_f64(a)?, parse_f64(step)?, parse_f64(b)?);
        if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
            return Err(format!("range {s:?} needs finite start ≤ stop and step > 0"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + i as f64 * step).collect());
    }
    let grid = s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

/// Taps as a comma list of `re` or `re:im`.
pub fn parse_taps(s: &str) -> Result<Vec<C64>, String> {
    s.split(',')
        .map(|t| match t.split_once(':') {
            Some((re, im)) => Ok(C64::new(parse_f64(re)?, parse_f64(im)?)),
            None => Ok(C64::new(parse_f64(t)?, 0.0)),
        })
        .collect()
}

fn format_taps(taps: &[C64]) -> String {
    taps.iter()
        .map(|t| format!("{}:{}", t.re, t.im))
        .collect::<Vec<_>>()
        .join(",")
}
