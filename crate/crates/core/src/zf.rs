//! Zero-forcing equalization with a finite-length inverse.
//!
//! The exact channel inverse `1/H(f)` has an infinite impulse response, so
//! the equalizer is the length-`L` FIR `g` that minimizes
//! `‖h ∗ g − δ_D‖₂`, solved through the normal equations.

use alloc::vec;
use alloc::vec::Vec;


use crate::linalg::{cholesky_solve, CMatrix};
use crate::signal::ChannelRealization;
use crate::{Error, Result, C64};

/// Pivot tolerance on the normal equations, relative to their largest
/// diagonal entry.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ZfEqualizer {
    taps: Vec<C64>,
    delay: usize,
}

/// Centered decision delay `(num_taps + channel_len − 1) / 2`.
pub fn default_delay(num_taps: usize, channel_len: usize) -> usize {
    (num_taps + channel_len).saturating_sub(1) / 2
}

impl ZfEqualizer {
    /// Designs the least-squares truncated inverse of `channel`.
    ///
    /// `delay` defaults to [`default_delay`].
    pub fn design(channel: &ChannelRealization, num_taps: usize, delay: Option<usize>) -> Result<Self> {
        Self::design_from_taps(channel.taps(), num_taps, delay)
    }

    pub fn design_from_taps(h: &[C64], num_taps: usize, delay: Option<usize>) -> Result<Self> {
        if num_taps == 0 {
            return Err(Error::invalid("num_taps", "must be at least 1"));
        }
        if h.is_empty() {
            return Err(Error::invalid("channel", "needs at least one tap"));
        }
        let k = h.len();
        let delay = delay.unwrap_or_else(|| default_delay(num_taps, k));
        if delay >= num_taps + k - 1 {
            return Err(Error::invalid("delay", "must be below num_taps + K − 1"));
        }

        // Normal equations of the (num_taps + K − 1) × num_taps convolution
        // matrix: Toeplitz in the channel autocorrelation.
        let autocorr = |lag: isize| -> C64 {
            // r(l) = Σ_k conj(h[k]) h[k + l]
            let mut acc = C64::new(0.0, 0.0);
            for (i, hi) in h.iter().enumerate() {
                let j = i as isize + lag;
                if j >= 0 && (j as usize) < k {
                    acc += hi.conj() * h[j as usize];
                }
            }
            acc
        };
        let mut normal = CMatrix::zeros(num_taps);
        for i in 0..num_taps {
            for j in 0..num_taps {
                normal[(i, j)] = autocorr(i as isize - j as isize);
            }
        }
        let rhs: Vec<C64> = (0..num_taps)
            .map(|i| match delay.checked_sub(i) {
                Some(m) if m < k => h[m].conj(),
                _ => C64::new(0.0, 0.0),
            })
            .collect();
        let taps = cholesky_solve(&normal, &rhs, RANK_TOLERANCE)?;
        Ok(ZfEqualizer { taps, delay })
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    /// ‖g‖₂², the white-noise power gain of the equalizer.
    pub fn noise_gain(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// ‖h ∗ g − δ_delay‖₂ for the given channel.
    pub fn residual(&self, h: &[C64]) -> f64 {
        residual(h, &self.taps, self.delay)
    }

    /// Filters `received` and shifts by the decision delay, so that output
    /// `n` estimates transmitted symbol `n`. Samples past either end of
    /// `received` are taken as zero.
    pub fn equalize(&self, received: &[C64]) -> Vec<C64> {
        let len = received.len() as isize;
        (0..received.len())
            .map(|n| {
                let base = (n + self.delay) as isize;
                let mut acc = C64::new(0.0, 0.0);
                for (j, g) in self.taps.iter().enumerate() {
                    let idx = base - j as isize;
                    if idx >= 0 && idx < len {
                        acc += g * received[idx as usize];
                    }
                }
                acc
            })
            .collect()
    }
}

/// ‖h ∗ g − δ_delay‖₂ over the full convolution.
pub fn residual(h: &[C64], g: &[C64], delay: usize) -> f64 {
    let mut full = vec![C64::new(0.0, 0.0); h.len() + g.len() - 1];
    for (i, a) in h.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            full[i + j] += a * b;
        }
    }
    if let Some(d) = full.get_mut(delay) {
        *d -= C64::new(1.0, 0.0);
    }
    full.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{add_awgn, bpsk_demodulate, count_bit_errors, SymbolStream};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn scalar_inverse() {
        let eq = ZfEqualizer::design_from_taps(&[c(2.0)], 1, Some(0)).unwrap();
        assert_eq!(eq.taps(), &[c(0.5)]);
        let eq = ZfEqualizer::design_from_taps(&[C64::new(0.0, 2.0)], 1, Some(0)).unwrap();
        assert!((eq.taps()[0] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn flat_channel_inverse_at_any_delay() {
        let h = C64::new(0.3, -1.1);
        let eq = ZfEqualizer::design_from_taps(&[h], 16, None).unwrap();
        assert_eq!(eq.delay(), 8);
        for (j, g) in eq.taps().iter().enumerate() {
            let expected = if j == 8 { 1.0 / h } else { c(0.0) };
            assert!((g - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn two_tap_channel_approaches_geometric_series() {
        let eq = ZfEqualizer::design_from_taps(&[c(1.0), c(0.5)], 8, Some(0)).unwrap();
        // numpy lstsq on the 9×8 convolution matrix
        let lstsq = [
            0.999_988_56, -0.499_971_39, 0.249_939_92, -0.124_878_41,
            0.062_256_1, -0.030_761_84, 0.014_648_49, -0.005_859_4,
        ];
        for (j, g) in eq.taps().iter().enumerate() {
            assert!((g.re - lstsq[j]).abs() < 1e-8, "tap {j}: {g}");
            assert!(g.im.abs() < 1e-14);
            let series = (-0.5f64).powi(j as i32);
            assert!((g.re - series).abs() < 0.01);
        }
        assert!((eq.residual(&[c(1.0), c(0.5)]) - 0.003_382_918_185_943_494).abs() < 1e-10);
    }

    #[test]
    fn residual_shrinks_with_length() {
        let h = [c(1.0), c(0.5)];
        // numpy lstsq residuals for 2, 4, 8, 16 taps
        let oracle = [0.218_217_890_235_992_36, 0.054_153_036_107_388_23, 0.003_382_918_185_943_494, 1.321_449_895_949_773_1e-5];
        let mut prev = f64::INFINITY;
        for (n, expect) in [2usize, 4, 8, 16].into_iter().zip(oracle) {
            let r = ZfEqualizer::design_from_taps(&h, n, Some(0)).unwrap().residual(&h);
            assert!((r - expect).abs() < 1e-9 * expect.max(1e-3), "{n}: {r}");
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn design_errors() {
        assert!(matches!(
            ZfEqualizer::design_from_taps(&[c(0.0), c(0.0)], 4, None),
            Err(Error::SingularChannel)
        ));
        assert!(ZfEqualizer::design_from_taps(&[c(1.0)], 0, None).is_err());
        assert!(ZfEqualizer::design_from_taps(&[c(1.0), c(0.5)], 4, Some(5)).is_err());
        assert!(ZfEqualizer::design_from_taps(&[c(1.0), c(0.5)], 4, Some(4)).is_ok());
    }

    #[test]
    fn least_squares_local_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = [C64::new(0.8, 0.2), C64::new(-0.4, 0.5), C64::new(0.1, -0.3)];
        let eq = ZfEqualizer::design_from_taps(&h, 12, None).unwrap();
        let base = eq.residual(&h);
        for _ in 0..20 {
            let j = rng.random_range(0..12);
            let dir = match rng.random_range(0..4) {
                0 => c(1e-3),
                1 => c(-1e-3),
                2 => C64::new(0.0, 1e-3),
                _ => C64::new(0.0, -1e-3),
            };
            let mut g = eq.taps().to_vec();
            g[j] += dir;
            assert!(residual(&h, &g, eq.delay()) >= base);
        }
    }

    #[test]
    fn flat_channel_equalization_is_exact() {
        let tap = C64::new(-0.7, 0.45);
        let ch = ChannelRealization::from_taps(alloc::vec![tap]).unwrap();
        let s = SymbolStream::random(&mut ChaCha8Rng::seed_from_u64(1), 1000).unwrap();
        let eq = ZfEqualizer::design(&ch, 16, None).unwrap();
        let out = eq.equalize(&ch.apply(s.symbols()));
        for (y, x) in out.iter().zip(s.symbols()) {
            assert!((y - x).norm() < 1e-10);
        }
        assert_eq!(bpsk_demodulate(&out), s.bits());
    }

    #[test]
    fn minimum_phase_channel_has_zero_ber_noise_free() {
        let ch = ChannelRealization::from_taps(alloc::vec![c(1.0), c(0.5)]).unwrap();
        let s = SymbolStream::random(&mut ChaCha8Rng::seed_from_u64(2), 10_000).unwrap();
        let eq = ZfEqualizer::design(&ch, 16, Some(0)).unwrap();
        let bits = bpsk_demodulate(&eq.equalize(&ch.apply(s.symbols())));
        assert_eq!(count_bit_errors(&bits, s.bits()), 0);
    }

    #[test]
    fn zero_in_zero_out() {
        let eq = ZfEqualizer::design_from_taps(&[c(1.0), c(0.5)], 8, None).unwrap();
        assert!(eq.equalize(&[c(0.0); 50]).iter().all(|y| *y == c(0.0)));
    }

    #[test]
    fn noise_amplification_is_tap_energy() {
        let h = [c(1.0), c(0.9)];
        let eq = ZfEqualizer::design_from_taps(&h, 16, None).unwrap();
        let n = 1_000_000;
        let snr_db = 3.0;
        let noise = add_awgn(&alloc::vec![c(0.0); n], snr_db, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let out = eq.equalize(&noise.samples);
        // skip the edges where the filter window is partially outside
        let body = &out[32..n - 32];
        let measured = body.iter().map(|y| y.norm_sqr()).sum::<f64>() / body.len() as f64;
        let predicted = noise.noise_variance * eq.noise_gain();
        assert!(((measured - predicted) / predicted).abs() < 0.02, "{measured} vs {predicted}");
    }
}
