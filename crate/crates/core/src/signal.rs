//! BPSK modem, multipath channel and AWGN.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::alpha_mu::AlphaMuParams;
use crate::{Error, Result, C64};

/// Unit-energy BPSK symbols together with the bits they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    symbols: Vec<C64>,
    bits: Vec<u8>,
}

impl SymbolStream {
    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `n` uniformly random bits, modulated.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self> {
        let bits: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
        bpsk_modulate(&bits)
    }
}

/// Maps bit 0 to +1 and bit 1 to −1.
pub fn bpsk_modulate(bits: &[u8]) -> Result<SymbolStream> {
    if bits.is_empty() {
        return Err(Error::Precondition("bit vector must be non-empty"));
    }
    let symbols = bits
        .iter()
        .map(|&b| match b {
            0 => Ok(C64::new(1.0, 0.0)),
            1 => Ok(C64::new(-1.0, 0.0)),
            _ => Err(Error::Domain("bits must be 0 or 1")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolStream {
        symbols,
        bits: bits.to_vec(),
    })
}

/// Hard decision on the real part; exactly zero decides 0.
pub fn bpsk_demodulate(samples: &[C64]) -> Vec<u8> {
    samples.iter().map(|s| if s.re >= 0.0 { 0 } else { 1 }).collect()
}

pub fn count_bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// One block-static multipath channel: K complex taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    taps: Vec<C64>,
    params: Option<AlphaMuParams>,
}

impl ChannelRealization {
    /// A known, deterministic channel.
    pub fn from_taps(taps: Vec<C64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("taps", "channel needs at least one tap"));
        }
        if taps.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
            return Err(Error::invalid("taps", "taps must be finite"));
        }
        Ok(ChannelRealization { taps, params: None })
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn is_flat(&self) -> bool {
        self.taps.len() == 1
    }

    /// Fading law the tap magnitudes were drawn from, if any.
    pub fn params(&self) -> Option<&AlphaMuParams> {
        self.params.as_ref()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// Rescales the taps so that Σ|h(k)|² = 1.
    pub fn normalize_energy(&mut self) {
        let e = self.energy();
        if e > 0.0 {
            let s = 1.0 / e.sqrt();
            for t in &mut self.taps {
                *t *= s;
            }
        }
    }

    /// Same-length causal convolution `y(n) = Σ_k h(k) u(n−k)` with zero
    /// prehistory.
    pub fn apply(&self, input: &[C64]) -> Vec<C64> {
        convolve_same(&self.taps, input)
    }
}

/// `n` taps with α–µ magnitudes and uniform phases.
pub fn draw_channel<R: Rng + ?Sized>(
    params: &AlphaMuParams,
    k: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if k == 0 {
        return Err(Error::invalid("k", "channel needs at least one tap"));
    }
    let taps = (0..k)
        .map(|_| {
            let r = params.sample_one(rng);
            let phase = rng.random::<f64>() * core::f64::consts::TAU;
            C64::from_polar(r, phase)
        })
        .collect();
    Ok(ChannelRealization {
        taps,
        params: Some(*params),
    })
}

pub fn apply_channel(input: &[C64], channel: &ChannelRealization) -> Vec<C64> {
    channel.apply(input)
}

pub(crate) fn convolve_same(taps: &[C64], input: &[C64]) -> Vec<C64> {
    (0..input.len())
        .map(|n| {
            let mut acc = taps[0] * input[n];
            for (k, h) in taps.iter().enumerate().skip(1).take(n) {
                acc += h * input[n - k];
            }
            acc
        })
        .collect()
}

/// Received samples plus the noise that was added to them.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySignal {
    pub samples: Vec<C64>,
    /// Total complex noise variance σ².
    pub noise_variance: f64,
    pub snr_db: f64,
}

/// Total complex noise variance for unit symbol energy; zero at +∞ dB.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Adds circularly-symmetric complex Gaussian noise at `snr_db` (Es = 1).
///
/// `f64::INFINITY` disables noise and leaves the samples untouched.
pub fn add_awgn<R: Rng + ?Sized>(samples: &[C64], snr_db: f64, rng: &mut R) -> Result<NoisySignal> {
    if samples.is_empty() {
        return Err(Error::Precondition("sample vector must be non-empty"));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::invalid("snr_db", "must be a number or +inf"));
    }
    let variance = noise_variance(snr_db);
    let mut out = samples.to_vec();
    if variance > 0.0 {
        let sigma = (variance / 2.0).sqrt();
        for s in &mut out {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *s += C64::new(sigma * re, sigma * im);
        }
    }
    Ok(NoisySignal {
        samples: out,
        noise_variance: variance,
        snr_db,
    })
}
