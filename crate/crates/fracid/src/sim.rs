//! Forward simulation of fractional-order models.
//!
//! The transfer function `1 / (a1*s^alpha + a2*s^beta + a3)` maps to the
//! time-domain relation
//!
//! ```text
//! u(t) = a1 * D^alpha c(t) + a2 * D^beta c(t) + a3 * c(t)
//! ```
//!
//! which, discretized with the Grunwald-Letnikov weights and full history as
//! memory, can be rearranged into an explicit update for the newest sample:
//!
//! ```text
//! c_k = (u_k - a1*T^-alpha * sum_{j>=1} b_j^(alpha) c_{k-j}
//!            - a2*T^-beta  * sum_{j>=1} b_j^(beta)  c_{k-j})
//!       / (a1*T^-alpha + a2*T^-beta + a3)
//! ```
//!
//! The system is at rest before t = 0, so the history before the first
//! sample is zero. Full-history memory makes this stepping the exact
//! discrete inverse of the identification sums in [`crate::ident`].

use crate::differint::gl_weights;
use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Divergence guard applied when no explicit limit is given.
pub const DEFAULT_DIVERGENCE_LIMIT: f64 = 1e6;

/// The five parameters of `1 / (a1*s^alpha + a2*s^beta + a3)`.
///
/// The dc gain is folded into the coefficients, so there is no separate gain
/// parameter. `alpha > beta > 0` and the leading and dc coefficients must be
/// nonzero; `a2` may be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalModel {
    a1: f64,
    a2: f64,
    a3: f64,
    alpha: f64,
    beta: f64,
}

impl FractionalModel {
    pub fn new(a1: f64, a2: f64, a3: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [
            ("a1", a1),
            ("a2", a2),
            ("a3", a3),
            ("alpha", alpha),
            ("beta", beta),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if a1 == 0.0 {
            return Err(Error::InvalidModel(
                "leading coefficient a1 must be nonzero".into(),
            ));
        }
        if a3 == 0.0 {
            return Err(Error::InvalidModel(
                "dc coefficient a3 must be nonzero".into(),
            ));
        }
        if beta <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "beta must be positive, got {beta}"
            )));
        }
        if alpha <= beta {
            return Err(Error::InvalidModel(format!(
                "alpha must exceed beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            a1,
            a2,
            a3,
            alpha,
            beta,
        })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Parameters in the order (alpha, beta, a1, a2, a3).
    pub fn as_array(&self) -> [f64; 5] {
        [self.alpha, self.beta, self.a1, self.a2, self.a3]
    }
}

impl std::fmt::Display for FractionalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "1/({} s^{} + {} s^{} + {})",
            self.a1, self.alpha, self.a2, self.beta, self.a3
        )
    }
}

/// Test inputs: unit step 1, unit ramp t, unit parabola t^2/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    UnitStep,
    UnitRamp,
    UnitParabola,
}

impl InputKind {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            InputKind::UnitStep => 1.0,
            InputKind::UnitRamp => t,
            InputKind::UnitParabola => t * t / 2.0,
        }
    }
}

/// Unit-step response of `model` sampled every `sample_period` seconds over
/// `[0, duration]`.
pub fn simulate_step_response(
    model: &FractionalModel,
    duration: f64,
    sample_period: f64,
) -> Result<SampledSignal> {
    simulate_response(model, InputKind::UnitStep, duration, sample_period)
}

/// Response of `model` to one of the canonical inputs.
pub fn simulate_response(
    model: &FractionalModel,
    input: InputKind,
    duration: f64,
    sample_period: f64,
) -> Result<SampledSignal> {
    simulate_response_with_limit(
        model,
        input,
        duration,
        sample_period,
        DEFAULT_DIVERGENCE_LIMIT,
    )
}

/// Same as [`simulate_response`] with an explicit divergence guard: the run
/// aborts as soon as any |c_k| exceeds `limit`.
pub fn simulate_response_with_limit(
    model: &FractionalModel,
    input: InputKind,
    duration: f64,
    sample_period: f64,
    limit: f64,
) -> Result<SampledSignal> {
    if !(sample_period.is_finite() && sample_period > 0.0) {
        return Err(Error::Config(format!(
            "sample period must be a positive finite number, got {sample_period}"
        )));
    }
    if !(duration.is_finite() && duration >= 10.0 * sample_period) {
        return Err(Error::Config(format!(
            "duration must cover at least ten sample periods, got {duration} at T = {sample_period}"
        )));
    }
    if !(limit.is_finite() && limit > 0.0) {
        return Err(Error::Config(format!(
            "divergence limit must be a positive finite number, got {limit}"
        )));
    }

    let steps = ((duration / sample_period) * (1.0 + 1e-9) + 1e-9).floor() as usize;
    let n = steps + 1;
    let w_alpha = gl_weights(model.alpha, n);
    let w_beta = gl_weights(model.beta, n);
    let scale_alpha = sample_period.powf(-model.alpha);
    let scale_beta = sample_period.powf(-model.beta);
    let denom = model.a1 * scale_alpha + model.a2 * scale_beta + model.a3;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::InvalidModel(format!(
            "implicit update denominator a1*T^-alpha + a2*T^-beta + a3 = {denom} at T = {sample_period}"
        )));
    }

    let wa = w_alpha.weights();
    let wb = w_beta.weights();
    let na = w_alpha.effective_len();
    let nb = w_beta.effective_len();
    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * sample_period;
        let mut hist = 0.0;
        for j in 1..na.min(k + 1) {
            hist += model.a1 * scale_alpha * wa[j] * c[k - j];
        }
        for j in 1..nb.min(k + 1) {
            hist += model.a2 * scale_beta * wb[j] * c[k - j];
        }
        let ck = (input.value_at(t) - hist) / denom;
        if !ck.is_finite() || ck.abs() > limit {
            return Err(Error::Diverged {
                time: t,
                value: ck,
                limit,
            });
        }
        c.push(ck);
    }
    SampledSignal::from_origin(c, sample_period)
}
