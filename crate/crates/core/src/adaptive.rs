//! Pilot-trained LMS and RLS equalizers.
//!
//! Both filters use the output convention `y(n) = bᴴ x(n)` where
//! `x(n) = [x(n), x(n−1), …, x(n−L)]` holds the newest sample first.
//! Training runs the per-sample recursion over a pilot; afterwards the
//! weights are frozen and applied to the payload without further
//! adaptation.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Below this magnitude the RLS gain denominator is treated as collapsed.
pub const BREAKDOWN_THRESHOLD: f64 = 1e-14;

/// Weights and input window shared by both algorithms, each of length L+1.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveFilterState {
    weights: Vec<C64>,
    window: Vec<C64>,
}

impl AdaptiveFilterState {
    /// All-zero weights and an empty (zero) window for filter order `order`.
    pub fn new(order: usize) -> Self {
        AdaptiveFilterState {
            weights: vec![ZERO; order + 1],
            window: vec![ZERO; order + 1],
        }
    }

    pub fn with_weights(weights: Vec<C64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weights", "need at least one weight"));
        }
        let n = weights.len();
        Ok(AdaptiveFilterState {
            weights,
            window: vec![ZERO; n],
        })
    }

    pub fn order(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    /// Current input vector, newest sample first.
    pub fn window(&self) -> &[C64] {
        &self.window
    }

    pub fn push(&mut self, x_new: C64) {
        self.window.rotate_right(1);
        self.window[0] = x_new;
    }

    /// `bᴴ x` for the current window.
    pub fn output(&self) -> C64 {
        inner(&self.weights, &self.window)
    }
}

/// `aᴴ b`
fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmsConfig {
    step_size: f64,
    order: usize,
}

impl LmsConfig {
    pub fn new(step_size: f64, order: usize) -> Result<Self> {
        if !(step_size > 0.0) || !step_size.is_finite() {
            return Err(Error::invalid("step_size", "must be positive and finite"));
        }
        Ok(LmsConfig { step_size, order })
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Mean-square stability bound `2 / (P·(L+1))` for input power `P`.
    pub fn stability_bound(&self, input_power: f64) -> f64 {
        2.0 / (input_power * (self.order + 1) as f64)
    }

    /// Whether the step size is inside the stability bound. Advisory only.
    pub fn is_stable_for(&self, input_power: f64) -> bool {
        self.step_size < self.stability_bound(input_power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlsConfig {
    forgetting: f64,
    order: usize,
    initial_p_scale: f64,
}

impl RlsConfig {
    pub fn new(forgetting: f64, order: usize, initial_p_scale: f64) -> Result<Self> {
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::invalid("forgetting", "must lie in (0, 1]"));
        }
        if !(initial_p_scale > 0.0) || !initial_p_scale.is_finite() {
            return Err(Error::invalid("initial_p_scale", "must be positive and finite"));
        }
        Ok(RlsConfig {
            forgetting,
            order,
            initial_p_scale,
        })
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn initial_p_scale(&self) -> f64 {
        self.initial_p_scale
    }
}

/// Least-mean-squares filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Lms {
    state: AdaptiveFilterState,
    cfg: LmsConfig,
}

impl Lms {
    pub fn new(cfg: LmsConfig) -> Self {
        Lms {
            state: AdaptiveFilterState::new(cfg.order),
            cfg,
        }
    }

    pub fn from_state(state: AdaptiveFilterState, cfg: LmsConfig) -> Result<Self> {
        if state.order() != cfg.order {
            return Err(Error::Precondition("state order does not match config"));
        }
        Ok(Lms { state, cfg })
    }

    pub fn state(&self) -> &AdaptiveFilterState {
        &self.state
    }

    /// Shifts `x_new` in, computes `e = d − bᴴx` and applies
    /// `b ← b + η x e*`. Returns `e`.
    pub fn step(&mut self, x_new: C64, desired: C64) -> C64 {
        self.state.push(x_new);
        let e = desired - self.state.output();
        let scale = e.conj() * self.cfg.step_size;
        for (b, x) in self.state.weights.iter_mut().zip(&self.state.window) {
            *b += x * scale;
        }
        e
    }
}

/// Exponentially weighted recursive least squares filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Rls {
    state: AdaptiveFilterState,
    p: CMatrix,
    gain: Vec<C64>,
    cfg: RlsConfig,
}

impl Rls {
    /// Zero weights and `P(0) = initial_p_scale · I`.
    pub fn new(cfg: RlsConfig) -> Self {
        let n = cfg.order + 1;
        Rls {
            state: AdaptiveFilterState::new(cfg.order),
            p: CMatrix::scaled_identity(n, cfg.initial_p_scale),
            gain: vec![ZERO; n],
            cfg,
        }
    }

    pub fn from_parts(state: AdaptiveFilterState, p: CMatrix, cfg: RlsConfig) -> Result<Self> {
        if state.order() != cfg.order || p.dim() != cfg.order + 1 {
            return Err(Error::Precondition("state dimensions do not match config"));
        }
        let n = p.dim();
        Ok(Rls {
            state,
            p,
            gain: vec![ZERO; n],
            cfg,
        })
    }

    pub fn state(&self) -> &AdaptiveFilterState {
        &self.state
    }

    /// Inverse correlation estimate `P(n)`.
    pub fn p_matrix(&self) -> &CMatrix {
        &self.p
    }

    /// Gain vector `k(n)` from the most recent step.
    pub fn gain(&self) -> &[C64] {
        &self.gain
    }

    /// One RLS iteration; returns the a-priori error `e = d − bᴴ(n−1) x(n)`.
    pub fn step(&mut self, x_new: C64, desired: C64) -> Result<C64> {
        self.state.push(x_new);
        let inv_gamma = 1.0 / self.cfg.forgetting;
        let x = &self.state.window;

        let px = self.p.mul_vec(x);
        let denom = C64::new(1.0, 0.0) + inner(x, &px) * inv_gamma;
        if denom.norm() < BREAKDOWN_THRESHOLD || !denom.re.is_finite() {
            return Err(Error::NumericalBreakdown(denom.norm()));
        }
        for (k, v) in self.gain.iter_mut().zip(&px) {
            *k = v * inv_gamma / denom;
        }

        let e = desired - inner(&self.state.weights, x);
        let ec = e.conj();
        for (b, k) in self.state.weights.iter_mut().zip(&self.gain) {
            *b += k * ec;
        }

        // P ← γ⁻¹ (P − k xᴴ P)
        let xh_p = self.p.left_mul_conj(x);
        let n = self.p.dim();
        for i in 0..n {
            let ki = self.gain[i];
            for j in 0..n {
                let v = self.p[(i, j)] - ki * xh_p[j];
                self.p[(i, j)] = v * inv_gamma;
            }
        }
        self.p.hermitianize();
        Ok(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Lms(LmsConfig),
    Rls(RlsConfig),
}

impl Algorithm {
    pub fn order(&self) -> usize {
        match self {
            Algorithm::Lms(c) => c.order(),
            Algorithm::Rls(c) => c.order(),
        }
    }
}

/// Outcome of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRecord {
    /// |e(n)|² for every pilot sample consumed.
    pub squared_error: Vec<f64>,
    /// Frozen weights after the last pilot sample.
    pub weights: Vec<C64>,
}

/// Runs the adaptive recursion over a pilot.
///
/// The desired response at step `n` is `pilot[n − delay]`, or zero for
/// `n < delay`.
pub fn train(algorithm: &Algorithm, pilot: &[C64], received_pilot: &[C64], delay: usize) -> Result<TrainingRecord> {
    if pilot.len() != received_pilot.len() {
        return Err(Error::Precondition("pilot and received pilot differ in length"));
    }
    if pilot.len() < algorithm.order() + 1 {
        return Err(Error::Precondition("pilot shorter than the filter length"));
    }
    let desired = |n: usize| n.checked_sub(delay).map_or(ZERO, |i| pilot[i]);
    let mut squared_error = Vec::with_capacity(pilot.len());
    let weights = match algorithm {
        Algorithm::Lms(cfg) => {
            let mut f = Lms::new(*cfg);
            for (n, &x) in received_pilot.iter().enumerate() {
                squared_error.push(f.step(x, desired(n)).norm_sqr());
            }
            f.state.weights
        }
        Algorithm::Rls(cfg) => {
            let mut f = Rls::new(*cfg);
            for (n, &x) in received_pilot.iter().enumerate() {
                squared_error.push(f.step(x, desired(n))?.norm_sqr());
            }
            f.state.weights
        }
    };
    Ok(TrainingRecord {
        squared_error,
        weights,
    })
}

/// Applies frozen weights to a payload: output `n` is `bᴴ x(n + delay)`,
/// with samples outside `received` taken as zero.
pub fn equalize(weights: &[C64], received: &[C64], delay: usize) -> Vec<C64> {
    let len = received.len();
    (0..len)
        .map(|n| {
            let newest = n + delay;
            let mut acc = ZERO;
            for (j, b) in weights.iter().enumerate() {
                if let Some(idx) = newest.checked_sub(j) {
                    if idx < len {
                        acc += b.conj() * received[idx];
                    }
                }
            }
            acc
        })
        .collect()
}
