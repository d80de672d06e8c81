//! Monte Carlo engine for BER-vs-SNR and MSE-convergence curves.
//!
//! Every trial owns its randomness. A trial seed is derived from
//! `(master_seed, snr_index, trial_index)` with [`trial_seed`], and five
//! independent ChaCha8 streams are split off it (channel, pilot bits, pilot
//! noise, payload bits, payload noise). Seeds never depend on the swept
//! parameter or on the equalizer, so sweeps and algorithm comparisons run
//! on common random numbers.
//!
//! Trials are dispatched through an [`Executor`]. BER points are evaluated
//! in fixed batches of [`BATCH_SIZE`] trials and the error-count stopping
//! rule is checked only between batches, so the result does not depend on
//! how an executor schedules work.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adaptive::{self, Algorithm, LmsConfig, RlsConfig};
use crate::alpha_mu::{AlphaMuParams, Preset};
use crate::signal::{self, ChannelRealization, SymbolStream};
use crate::zf::{self, ZfEqualizer};
use crate::{Error, Result, C64};

/// Trials evaluated between two checks of the stopping rule.
pub const BATCH_SIZE: u64 = 64;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Preset(Preset),
    /// Explicit α and µ; `beta = None` picks β for unit mean channel energy.
    Custom { alpha: f64, mu: f64, beta: Option<f64> },
    /// Deterministic taps, identical in every trial.
    Fixed(Vec<C64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// β is chosen so that E[Σ|h(k)|²] = 1; realizations keep their fading.
    MeanPower,
    /// Every realization is rescaled to Σ|h(k)|² = 1.
    PerRealization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualizerKind {
    /// Slice the received samples directly.
    None,
    Zf,
    Lms,
    Rls,
}

impl EqualizerKind {
    pub fn key(self) -> &'static str {
        match self {
            EqualizerKind::None => "none",
            EqualizerKind::Zf => "zf",
            EqualizerKind::Lms => "lms",
            EqualizerKind::Rls => "rls",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(EqualizerKind::None),
            "zf" => Some(EqualizerKind::Zf),
            "lms" => Some(EqualizerKind::Lms),
            "rls" => Some(EqualizerKind::Rls),
            _ => None,
        }
    }
}

/// One Monte Carlo campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    /// K, the number of multipath taps (ignored for fixed channels).
    pub channel_taps: usize,
    pub normalization: Normalization,
    pub snr_grid_db: Vec<f64>,
    /// Counted payload symbols per stream.
    pub stream_length: usize,
    /// Upper bound on streams per SNR point.
    pub num_streams: u64,
    /// Stop a BER point once this many bit errors are seen; 0 runs all
    /// `num_streams`.
    pub min_errors: u64,
    pub training_length: usize,
    pub equalizer: EqualizerKind,
    pub equalizer_taps: usize,
    pub step_size: f64,
    pub forgetting: f64,
    pub initial_p_scale: f64,
    /// Overrides the centered default decision delay.
    pub decision_delay: Option<usize>,
    pub num_runs_for_mse: u64,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: ChannelSpec::Preset(Preset::RxTx1),
            channel_taps: 1,
            normalization: Normalization::MeanPower,
            snr_grid_db: (0..=6).map(|i| 2.0 * i as f64).collect(),
            stream_length: 1000,
            num_streams: 10_000,
            min_errors: 100,
            training_length: 1000,
            equalizer: EqualizerKind::Lms,
            equalizer_taps: 16,
            step_size: 0.04,
            forgetting: 0.999,
            initial_p_scale: 1.0,
            decision_delay: None,
            num_runs_for_mse: 100,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// K for the configured channel.
    pub fn tap_count(&self) -> usize {
        match &self.channel {
            ChannelSpec::Fixed(taps) => taps.len(),
            _ => self.channel_taps,
        }
    }

    /// Per-tap fading law, `None` for fixed channels.
    pub fn tap_law(&self) -> Result<Option<AlphaMuParams>> {
        let k = self.channel_taps;
        match &self.channel {
            ChannelSpec::Fixed(_) => Ok(None),
            ChannelSpec::Preset(p) => p.params_for_taps(k).map(Some),
            ChannelSpec::Custom { alpha, mu, beta: Some(b) } => AlphaMuParams::new(*alpha, *mu, *b).map(Some),
            ChannelSpec::Custom { alpha, mu, beta: None } => {
                if k == 0 {
                    return Err(Error::invalid("channel_taps", "must be at least 1"));
                }
                AlphaMuParams::with_mean_power(*alpha, *mu, 1.0 / k as f64).map(Some)
            }
        }
    }

    /// Decision delay used by the equalizer (0 when bypassed).
    pub fn delay(&self) -> usize {
        match self.equalizer {
            EqualizerKind::None => 0,
            _ => self
                .decision_delay
                .unwrap_or_else(|| zf::default_delay(self.equalizer_taps, self.tap_count())),
        }
    }

    /// Adaptive algorithm, if the equalizer is LMS or RLS.
    pub fn algorithm(&self) -> Result<Option<Algorithm>> {
        let order = self.equalizer_taps.saturating_sub(1);
        Ok(match self.equalizer {
            EqualizerKind::Lms => Some(Algorithm::Lms(LmsConfig::new(self.step_size, order)?)),
            EqualizerKind::Rls => Some(Algorithm::Rls(RlsConfig::new(self.forgetting, order, self.initial_p_scale)?)),
            _ => None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::invalid("snr", "grid must not be empty"));
        }
        if self.snr_grid_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::invalid("snr", "grid values must be numbers or +inf"));
        }
        if self.stream_length == 0 {
            return Err(Error::invalid("stream_length", "must be at least 1"));
        }
        if self.num_streams == 0 {
            return Err(Error::invalid("num_streams", "must be at least 1"));
        }
        if self.training_length == 0 {
            return Err(Error::invalid("training_length", "must be at least 1"));
        }
        if self.equalizer_taps == 0 {
            return Err(Error::invalid("equalizer_taps", "must be at least 1"));
        }
        if self.num_runs_for_mse == 0 {
            return Err(Error::invalid("num_runs_for_mse", "must be at least 1"));
        }
        match &self.channel {
            ChannelSpec::Fixed(taps) => {
                ChannelRealization::from_taps(taps.clone())?;
            }
            _ => {
                if self.channel_taps == 0 {
                    return Err(Error::invalid("channel_taps", "must be at least 1"));
                }
                self.tap_law()?;
            }
        }
        self.algorithm()?;
        if self.equalizer != EqualizerKind::None && self.delay() >= self.equalizer_taps + self.tap_count() - 1 {
            return Err(Error::invalid("decision_delay", "must be below equalizer_taps + K − 1"));
        }
        if let Some(alg) = self.algorithm()? {
            if self.training_length < alg.order() + 1 {
                return Err(Error::invalid("training_length", "must cover at least one filter length"));
            }
        }
        Ok(())
    }
}

/// One point of a BER or MSE curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// SNR in dB, or the iteration index for convergence curves.
    pub x: f64,
    pub y: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Bit errors (BER curves only, else 0).
    pub n_errors: u64,
    /// Bits counted (BER curves only, else 0).
    pub n_bits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub points: Vec<CurvePoint>,
    /// Streams attempted per point, excluded ones included.
    pub trials: Vec<u64>,
    /// Streams dropped per point after an RLS breakdown.
    pub excluded: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    pub points: Vec<CurvePoint>,
    pub runs: u64,
    pub excluded: u64,
}

/// Wilson score interval at 95% for `errors` out of `n`.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = errors as f64 / nf;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = (center - half).max(0.0).min(p);
    let high = (center + half).min(1.0).max(p);
    (low, high)
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-trial seed:
/// `s(master, i, t) = m(m(m(master) ⊕ i) ⊕ t)` with `m` the SplitMix64
/// output function.
pub fn trial_seed(master_seed: u64, snr_index: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ snr_index) ^ trial_index)
}

/// Independent random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum TrialStream {
    Channel = 0,
    PilotBits = 1,
    PilotNoise = 2,
    PayloadBits = 3,
    PayloadNoise = 4,
}

pub fn trial_rng(seed: u64, stream: TrialStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Runs trial closures, possibly in parallel. Results come back in index
/// order.
pub trait Executor {
    fn map<T, F>(&self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs every trial on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        range.map(f).collect()
    }
}

/// Resolved, validated pieces shared by all trials of a campaign.
struct Plan<'a> {
    cfg: &'a ExperimentConfig,
    law: Option<AlphaMuParams>,
    fixed: Option<ChannelRealization>,
    algorithm: Option<Algorithm>,
    delay: usize,
}

impl<'a> Plan<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let fixed = match &cfg.channel {
            ChannelSpec::Fixed(taps) => Some(ChannelRealization::from_taps(taps.clone())?),
            _ => None,
        };
        Ok(Plan {
            cfg,
            law: cfg.tap_law()?,
            fixed,
            algorithm: cfg.algorithm()?,
            delay: cfg.delay(),
        })
    }

    fn channel(&self, seed: u64) -> Result<ChannelRealization> {
        if let Some(ch) = &self.fixed {
            return Ok(ch.clone());
        }
        let law = self.law.as_ref().expect("fading law resolved for random channels");
        let mut rng = trial_rng(seed, TrialStream::Channel);
        let mut ch = signal::draw_channel(law, self.cfg.channel_taps, &mut rng)?;
        if self.cfg.normalization == Normalization::PerRealization {
            ch.normalize_energy();
        }
        Ok(ch)
    }

    fn train(&self, alg: &Algorithm, ch: &ChannelRealization, snr_db: f64, seed: u64) -> Result<adaptive::TrainingRecord> {
        let pilot = SymbolStream::random(&mut trial_rng(seed, TrialStream::PilotBits), self.cfg.training_length)?;
        let rx = signal::add_awgn(&ch.apply(pilot.symbols()), snr_db, &mut trial_rng(seed, TrialStream::PilotNoise))?;
        adaptive::train(alg, pilot.symbols(), &rx.samples, self.delay)
    }

    /// Bit errors over the counted part of one payload stream.
    fn ber_trial(&self, snr_db: f64, seed: u64) -> Result<u64> {
        let ch = self.channel(seed)?;
        let n = self.cfg.stream_length;
        // guard symbols keep every counted symbol inside a full window
        let frame = n + self.delay;
        let payload = SymbolStream::random(&mut trial_rng(seed, TrialStream::PayloadBits), frame)?;
        let rx = signal::add_awgn(&ch.apply(payload.symbols()), snr_db, &mut trial_rng(seed, TrialStream::PayloadNoise))?;
        let estimate = match (self.cfg.equalizer, &self.algorithm) {
            (EqualizerKind::None, _) => rx.samples,
            (EqualizerKind::Zf, _) => {
                let eq = ZfEqualizer::design(&ch, self.cfg.equalizer_taps, Some(self.delay))?;
                eq.equalize(&rx.samples)
            }
            (_, Some(alg)) => {
                let rec = self.train(alg, &ch, snr_db, seed)?;
                adaptive::equalize(&rec.weights, &rx.samples, self.delay)
            }
            (_, None) => unreachable!("adaptive equalizer without algorithm"),
        };
        let bits = signal::bpsk_demodulate(&estimate[..n]);
        Ok(signal::count_bit_errors(&bits, &payload.bits()[..n]))
    }
}

fn is_excludable(e: &Error) -> bool {
    matches!(e, Error::NumericalBreakdown(_))
}

/// BER at every SNR in the grid.
pub fn run_ber_experiment<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<BerCurve> {
    let plan = Plan::new(cfg)?;
    let mut curve = BerCurve {
        points: Vec::with_capacity(cfg.snr_grid_db.len()),
        trials: Vec::with_capacity(cfg.snr_grid_db.len()),
        excluded: Vec::with_capacity(cfg.snr_grid_db.len()),
    };
    for (snr_index, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let mut errors = 0u64;
        let mut good = 0u64;
        let mut excluded = 0u64;
        let mut done = 0u64;
        while done < cfg.num_streams {
            let end = (done + BATCH_SIZE).min(cfg.num_streams);
            let outcomes = exec.map(done..end, |t| plan.ber_trial(snr_db, trial_seed(cfg.master_seed, snr_index as u64, t)));
            for o in outcomes {
                match o {
                    Ok(e) => {
                        errors += e;
                        good += 1;
                    }
                    Err(e) if is_excludable(&e) => excluded += 1,
                    Err(e) => return Err(e),
                }
            }
            done = end;
            if cfg.min_errors > 0 && errors >= cfg.min_errors {
                break;
            }
        }
        let n_bits = good * cfg.stream_length as u64;
        let y = if n_bits == 0 { 0.0 } else { errors as f64 / n_bits as f64 };
        let (ci_low, ci_high) = wilson_interval(errors, n_bits);
        curve.points.push(CurvePoint {
            x: snr_db,
            y,
            ci_low,
            ci_high,
            n_errors: errors,
            n_bits,
        });
        curve.trials.push(done);
        curve.excluded.push(excluded);
    }
    Ok(curve)
}

/// Ensemble-averaged training MSE |e(n)|² at the first SNR of the grid.
pub fn run_convergence_experiment<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<ConvergenceCurve> {
    let plan = Plan::new(cfg)?;
    let alg = plan
        .algorithm
        .ok_or(Error::invalid("equalizer", "convergence needs lms or rls"))?;
    let snr_db = cfg.snr_grid_db[0];
    let traces = exec.map(0..cfg.num_runs_for_mse, |r| {
        let seed = trial_seed(cfg.master_seed, 0, r);
        let ch = plan.channel(seed)?;
        plan.train(&alg, &ch, snr_db, seed).map(|rec| rec.squared_error)
    });
    let len = cfg.training_length;
    let mut sum = vec![0.0f64; len];
    let mut sum_sq = vec![0.0f64; len];
    let mut runs = 0u64;
    let mut excluded = 0u64;
    for t in traces {
        match t {
            Ok(trace) => {
                for ((s, q), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(&trace) {
                    *s += v;
                    *q += v * v;
                }
                runs += 1;
            }
            Err(e) if is_excludable(&e) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if runs == 0 {
        return Err(Error::NumericalBreakdown(0.0));
    }
    let n = runs as f64;
    let points = sum
        .iter()
        .zip(&sum_sq)
        .enumerate()
        .map(|(i, (s, q))| {
            let mean = s / n;
            let var = if runs > 1 { ((q - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            let half = Z_95 * (var / n).sqrt();
            CurvePoint {
                x: i as f64,
                y: mean,
                ci_low: (mean - half).max(0.0),
                ci_high: mean + half,
                n_errors: 0,
                n_bits: 0,
            }
        })
        .collect();
    Ok(ConvergenceCurve { points, runs, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    TrainingLength,
    EqualizerTaps,
    Preset,
    ChannelTaps,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::TrainingLength => "training_length",
            SweepParam::EqualizerTaps => "equalizer_taps",
            SweepParam::Preset => "preset",
            SweepParam::ChannelTaps => "channel_taps",
        }
    }

    pub fn from_key(s: &str) -> Option<Self> {
        [
            SweepParam::TrainingLength,
            SweepParam::EqualizerTaps,
            SweepParam::Preset,
            SweepParam::ChannelTaps,
        ]
        .into_iter()
        .find(|p| p.key() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepValue {
    Count(usize),
    Preset(Preset),
}

/// `base` with one parameter replaced.
pub fn apply_sweep_value(base: &ExperimentConfig, param: SweepParam, value: SweepValue) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match (param, value) {
        (SweepParam::TrainingLength, SweepValue::Count(n)) => cfg.training_length = n,
        (SweepParam::EqualizerTaps, SweepValue::Count(n)) => cfg.equalizer_taps = n,
        (SweepParam::ChannelTaps, SweepValue::Count(n)) => cfg.channel_taps = n,
        (SweepParam::Preset, SweepValue::Preset(p)) => cfg.channel = ChannelSpec::Preset(p),
        _ => return Err(Error::invalid("sweep", "value type does not match the swept parameter")),
    }
    Ok(cfg)
}

/// One BER curve per value; seeds are shared so only `param` varies.
pub fn run_sweep<E: Executor>(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[SweepValue],
    exec: &E,
) -> Result<Vec<(SweepValue, BerCurve)>> {
    if values.is_empty() {
        return Err(Error::invalid("sweep", "no values given"));
    }
    values
        .iter()
        .map(|&v| {
            let cfg = apply_sweep_value(base, param, v)?;
            run_ber_experiment(&cfg, exec).map(|c| (v, c))
        })
        .collect()
}

/// Centered moving average, shrinking the window at the edges.
pub fn smooth(trace: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let mut prefix = Vec::with_capacity(trace.len() + 1);
    prefix.push(0.0);
    for v in trace {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..trace.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(trace.len());
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Mean of the last quarter of a trace.
pub fn mse_floor(trace: &[f64]) -> f64 {
    let tail = &trace[trace.len() - (trace.len() / 4).max(1)..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// First iteration from which the smoothed trace stays within
/// `tolerance_db` of its floor; `None` if it never settles.
pub fn convergence_iteration(trace: &[f64], window: usize, tolerance_db: f64) -> Option<usize> {
    if trace.is_empty() {
        return None;
    }
    let s = smooth(trace, window);
    let threshold = mse_floor(&s) * 10f64.powf(tolerance_db / 10.0);
    match s.iter().rposition(|v| *v > threshold) {
        None => Some(0),
        Some(i) if i + 1 < s.len() => Some(i + 1),
        Some(_) => None,
    }
}
