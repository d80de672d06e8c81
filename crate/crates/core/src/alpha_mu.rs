//! The α–µ envelope distribution.
//!
//! Density
//!
//! ```text
//! f(x) = α µ^µ (x/β)^(αµ−1) exp(−µ (x/β)^α) / (β Γ(µ)),   x ≥ 0
//! ```
//!
//! with cumulative distribution `F(x) = P(µ, µ (x/β)^α)` (regularized lower
//! incomplete gamma) and `β = E[X^α]^(1/α)`. α = 2 gives Nakagami-m with
//! m = µ, and α = 2, µ = 1 gives Rayleigh.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::special::{gamma_p, ln_gamma};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMuParams {
    alpha: f64,
    mu: f64,
    beta: f64,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be positive and finite"))
    }
}

impl AlphaMuParams {
    pub fn new(alpha: f64, mu: f64, beta: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("mu", mu)?;
        check_positive("beta", beta)?;
        Ok(AlphaMuParams { alpha, mu, beta })
    }

    /// Picks β so that the envelope has `E[X²] = mean_power`.
    pub fn with_mean_power(alpha: f64, mu: f64, mean_power: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("mu", mu)?;
        check_positive("mean_power", mean_power)?;
        // E[X²] = β² Γ(µ + 2/α) / (µ^{2/α} Γ(µ))
        let ln_ratio = ln_gamma(mu + 2.0 / alpha) - ln_gamma(mu) - (2.0 / alpha) * mu.ln();
        let beta = (0.5 * (mean_power.ln() - ln_ratio)).exp();
        Self::new(alpha, mu, beta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Raw moment `E[X^order]` for `order > −αµ`.
    pub fn moment(&self, order: f64) -> f64 {
        let (a, m, b) = (self.alpha, self.mu, self.beta);
        (order * b.ln() + ln_gamma(m + order / a) - ln_gamma(m) - (order / a) * m.ln()).exp()
    }

    /// Probability density at `x`.
    ///
    /// At `x = 0` the density is 0 when αµ > 1, finite when αµ = 1, and
    /// `+inf` when αµ < 1.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain("pdf argument must be non-negative"));
        }
        let (a, m, b) = (self.alpha, self.mu, self.beta);
        let shape = a * m;
        if x == 0.0 {
            return Ok(if shape > 1.0 {
                0.0
            } else if shape == 1.0 {
                (a.ln() + m * m.ln() - b.ln() - ln_gamma(m)).exp()
            } else {
                f64::INFINITY
            });
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let z = x / b;
        let ln_f = a.ln() + m * m.ln() + (shape - 1.0) * z.ln() - m * z.powf(a) - b.ln() - ln_gamma(m);
        Ok(ln_f.exp())
    }

    /// Cumulative distribution function at `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain("cdf argument must be non-negative"));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let z = x / self.beta;
        Ok(gamma_p(self.mu, self.mu * z.powf(self.alpha)))
    }

    /// One envelope draw: `β (G/µ)^(1/α)` with `G ~ Gamma(µ, 1)`.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.gamma_law().sample(rng);
        self.beta * (g / self.mu).powf(1.0 / self.alpha)
    }

    /// `n` i.i.d. envelope draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let law = self.gamma_law();
        let inv_alpha = 1.0 / self.alpha;
        (0..n)
            .map(|_| {
                let g: f64 = law.sample(rng);
                self.beta * (g / self.mu).powf(inv_alpha)
            })
            .collect()
    }

    fn gamma_law(&self) -> Gamma<f64> {
        // µ > 0 and scale 1 were validated at construction.
        Gamma::new(self.mu, 1.0).expect("validated gamma shape")
    }
}

/// `β = E[X^α]^(1/α)`.
pub fn beta_from_moment(alpha: f64, moment: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    if !(moment > 0.0) || !moment.is_finite() {
        return Err(Error::Domain("moment must be positive and finite"));
    }
    Ok(moment.powf(1.0 / alpha))
}

/// Measured sub-THz link fits (LOS and NLOS transmitter/receiver pairs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    RxTx1,
    RxTx2,
    RxTx5,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::RxTx1, Preset::RxTx2, Preset::RxTx5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::RxTx1 => "RX-TX1",
            Preset::RxTx2 => "RX-TX2",
            Preset::RxTx5 => "RX-TX5",
        }
    }

    /// Lower-case identifier used in config files and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Preset::RxTx1 => "rxtx1",
            Preset::RxTx2 => "rxtx2",
            Preset::RxTx5 => "rxtx5",
        }
    }

    pub fn from_key(s: &str) -> Option<Preset> {
        let norm: alloc::string::String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        Preset::ALL.into_iter().find(|p| p.key() == norm)
    }

    pub fn alpha(self) -> f64 {
        match self {
            Preset::RxTx1 => 3.21,
            Preset::RxTx2 => 3.13,
            Preset::RxTx5 => 2.64,
        }
    }

    pub fn mu(self) -> f64 {
        match self {
            Preset::RxTx1 => 7.81,
            Preset::RxTx2 => 3.76,
            Preset::RxTx5 => 0.71,
        }
    }

    /// Line-of-sight status, where the measurement reports it.
    pub fn los(self) -> Option<bool> {
        match self {
            Preset::RxTx1 => Some(true),
            Preset::RxTx2 => None,
            Preset::RxTx5 => Some(false),
        }
    }

    /// Parameters with an explicit β.
    pub fn params(self, beta: f64) -> Result<AlphaMuParams> {
        AlphaMuParams::new(self.alpha(), self.mu(), beta)
    }

    /// Parameters for one tap of a `taps`-tap channel with unit mean energy.
    pub fn params_for_taps(self, taps: usize) -> Result<AlphaMuParams> {
        if taps == 0 {
            return Err(Error::invalid("taps", "must be at least 1"));
        }
        AlphaMuParams::with_mean_power(self.alpha(), self.mu(), 1.0 / taps as f64)
    }

    pub fn link(self, beta: f64) -> Result<PresetLink> {
        Ok(PresetLink {
            preset: self,
            params: self.params(beta)?,
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named preset bound to a concrete β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetLink {
    pub preset: Preset,
    pub params: AlphaMuParams,
}

impl PresetLink {
    pub fn los(&self) -> Option<bool> {
        self.preset.los()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::vec;

    fn rayleigh() -> AlphaMuParams {
        AlphaMuParams::new(2.0, 1.0, 1.0).unwrap()
    }

    /// Adaptive Simpson quadrature, kept independent of the cdf code path.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                left + right + delta / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    /// Integrate the density on [0, x] by splitting into unit panels.
    fn integral(p: &AlphaMuParams, x: f64) -> f64 {
        let f = |t: f64| p.pdf(t).unwrap();
        let panels = (x.ceil() as usize * 8).max(8);
        let h = x / panels as f64;
        (0..panels)
            .map(|i| simpson(&f, i as f64 * h, (i + 1) as f64 * h, 1e-13))
            .sum()
    }

    #[test]
    fn rayleigh_pdf_examples() {
        let p = rayleigh();
        assert!((p.pdf(1.0).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(p.pdf(0.0).unwrap(), 0.0);
        assert!((p.pdf(1.0).unwrap() - 0.735_758_882_342_884_6).abs() < 1e-15);
    }

    #[test]
    fn rx_tx1_pdf_matches_high_precision_value() {
        // mpmath (40 digits) evaluation of the density.
        let p = Preset::RxTx1.params(1.0).unwrap();
        let v = p.pdf(0.9).unwrap();
        assert!((v - 2.636_445_388_156_766).abs() < 1e-12, "{v}");
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(rayleigh().cdf(0.0).unwrap(), 0.0);
        assert!((rayleigh().cdf(1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let p = AlphaMuParams::new(2.64, 0.71, 1.0).unwrap();
        let oracle = integral(&p, 1.5);
        // mpmath quad of the density on [0, 1.5]
        assert!((oracle - 0.927_891_896_677_168).abs() < 1e-8);
        assert!((p.cdf(1.5).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn pdf_and_cdf_reject_negative_argument() {
        assert!(matches!(rayleigh().pdf(-0.1), Err(Error::Domain(_))));
        assert!(matches!(rayleigh().cdf(-1e-9), Err(Error::Domain(_))));
        assert!(rayleigh().pdf(f64::NAN).is_err());
    }

    #[test]
    fn construction_rejects_non_positive() {
        assert!(AlphaMuParams::new(0.0, 1.0, 1.0).is_err());
        assert!(AlphaMuParams::new(2.0, -1.0, 1.0).is_err());
        assert!(AlphaMuParams::new(2.0, 1.0, 0.0).is_err());
        assert!(AlphaMuParams::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn density_at_origin() {
        // αµ = 1: exponential-like finite value; αµ < 1: unbounded.
        let p = AlphaMuParams::new(1.0, 1.0, 1.0).unwrap();
        assert!((p.pdf(0.0).unwrap() - 1.0).abs() < 1e-14);
        let q = AlphaMuParams::new(1.0, 0.5, 1.0).unwrap();
        assert!(q.pdf(0.0).unwrap().is_infinite());
    }

    #[test]
    fn density_integrates_to_one() {
        let mut cases = vec![rayleigh()];
        cases.extend(Preset::ALL.iter().map(|p| p.params(1.0).unwrap()));
        for p in cases {
            // tail beyond 8β is far below 1e-12 for every case
            let total = integral(&p, 8.0);
            assert!((total - 1.0).abs() < 1e-6, "{p:?}: {total}");
        }
    }

    #[test]
    fn cdf_is_antiderivative_of_pdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for preset in Preset::ALL {
            let p = preset.params(1.0).unwrap();
            for _ in 0..100 {
                let x = rng.random_range(0.0..2.5);
                let err = (p.cdf(x).unwrap() - integral(&p, x)).abs();
                assert!(err < 1e-8, "{preset} x={x} err={err}");
            }
        }
    }

    #[test]
    fn rayleigh_reduction() {
        let p = rayleigh();
        let mut worst = 0.0f64;
        for i in 0..=5000 {
            let x = i as f64 * 1e-3;
            let expected = 2.0 * x * (-x * x).exp();
            worst = worst.max((p.pdf(x).unwrap() - expected).abs());
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn nakagami_reduction() {
        // α = 2: Nakagami-m with m = µ and Ω = β².
        let (m, omega) = (2.5f64, 1.7f64);
        let p = AlphaMuParams::new(2.0, m, omega.sqrt()).unwrap();
        for i in 1..50 {
            let x = i as f64 * 0.07;
            let nak = 2.0 * m.powf(m) / (crate::special::gamma(m) * omega.powf(m))
                * x.powf(2.0 * m - 1.0)
                * (-m * x * x / omega).exp();
            assert!((p.pdf(x).unwrap() - nak).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_power_normalization() {
        for preset in Preset::ALL {
            for k in [1usize, 2, 3] {
                let p = preset.params_for_taps(k).unwrap();
                assert!((p.moment(2.0) - 1.0 / k as f64).abs() < 1e-13);
                // β is the α-root of E[X^α]
                let b = beta_from_moment(p.alpha(), p.moment(p.alpha())).unwrap();
                assert!((b - p.beta()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn beta_from_moment_examples() {
        assert_eq!(beta_from_moment(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(beta_from_moment(2.0, 4.0).unwrap(), 2.0);
        let b = beta_from_moment(3.21, 0.5).unwrap();
        assert!((b.powf(3.21) - 0.5).abs() < 1e-15);
        assert!(beta_from_moment(2.0, 0.0).is_err());
        assert!(beta_from_moment(-1.0, 1.0).is_err());
    }

    #[test]
    fn rayleigh_sample_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs = rayleigh().sample(&mut rng, n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let expected = core::f64::consts::PI.sqrt() / 2.0;
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let p = Preset::RxTx2.params(1.0).unwrap();
        let a = p.sample(&mut ChaCha8Rng::seed_from_u64(5), 100_000);
        let b = p.sample(&mut ChaCha8Rng::seed_from_u64(5), 100_000);
        assert_eq!(a, b);
    }

    fn ks_statistic(p: &AlphaMuParams, mut xs: Vec<f64>) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = p.cdf(x).unwrap();
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn rx_tx2_sampler_passes_ks() {
        let p = Preset::RxTx2.params(1.0).unwrap();
        let xs = p.sample(&mut ChaCha8Rng::seed_from_u64(3), 100_000);
        let d = ks_statistic(&p, xs);
        assert!(d < 0.01, "{d}");
    }

    #[test]
    fn preset_table() {
        assert_eq!((Preset::RxTx1.alpha(), Preset::RxTx1.mu()), (3.21, 7.81));
        assert_eq!((Preset::RxTx2.alpha(), Preset::RxTx2.mu()), (3.13, 3.76));
        assert_eq!((Preset::RxTx5.alpha(), Preset::RxTx5.mu()), (2.64, 0.71));
        assert_eq!(Preset::RxTx1.los(), Some(true));
        assert_eq!(Preset::RxTx5.los(), Some(false));
        assert_eq!(Preset::from_key("RX-TX5"), Some(Preset::RxTx5));
        assert_eq!(Preset::from_key("rxtx1"), Some(Preset::RxTx1));
        assert_eq!(Preset::from_key("rxtx3"), None);
        assert!(Preset::RxTx1.params_for_taps(0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn scale_equivariance(c in 0.05f64..20.0, x in 0.0f64..5.0, preset in 0usize..3) {
            let preset = Preset::ALL[preset];
            let unit = preset.params(1.0).unwrap();
            let scaled = preset.params(c).unwrap();
            let lhs = scaled.pdf(x).unwrap();
            let rhs = unit.pdf(x / c).unwrap() / c;
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn cdf_monotone(a in 0.0f64..4.0, b in 0.0f64..4.0, preset in 0usize..3) {
            let p = Preset::ALL[preset].params(1.0).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (fl, fh) = (p.cdf(lo).unwrap(), p.cdf(hi).unwrap());
            proptest::prop_assert!(fl <= fh);
            proptest::prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        }
    }
}
