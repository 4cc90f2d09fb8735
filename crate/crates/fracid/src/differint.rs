//! Grunwald-Letnikov differintegration of sampled signals.
//!
//! The differintegral of order `a` (derivative for `a > 0`, integral for
//! `a < 0`, identity for `a = 0`) is approximated by the short-memory sum
//!
//! ```text
//! D^a f(t) ~= T^(-a) * sum_{j=0..m} b_j * f(t - j*T),      m = floor(L / T)
//! ```
//!
//! where `T` is the sample period, `L` the memory length, and the weights
//! follow the recursion `b_0 = 1`, `b_j = (1 - (1 + a) / j) * b_{j-1}`.
//! The sum includes the sample at `t - m*T`, so a window of `L = m*T`
//! seconds covers `m + 1` samples.

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Weight sequence `b_0 .. b_{m}` for one derivation order.
#[derive(Debug, Clone, PartialEq)]
pub struct GlWeights {
    order: f64,
    weights: Vec<f64>,
}

impl GlWeights {
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Length with trailing exact zeros dropped.
    ///
    /// For a non-negative integer order k every weight beyond index k is an
    /// exact zero, so convolutions can stop early without changing the sum.
    pub(crate) fn effective_len(&self) -> usize {
        let mut n = self.weights.len();
        while n > 0 && self.weights[n - 1] == 0.0 {
            n -= 1;
        }
        n
    }
}

/// Computes the first `count` recursive binomial weights for `order`.
///
/// Any real order is valid, including zero and negative values.
pub fn gl_weights(order: f64, count: usize) -> GlWeights {
    assert!(count >= 1, "weight count must be at least 1");
    let mut weights = Vec::with_capacity(count);
    weights.push(1.0);
    for j in 1..count {
        let prev = weights[j - 1];
        weights.push((1.0 - (1.0 + order) / j as f64) * prev);
    }
    GlWeights { order, weights }
}

/// One differintegral evaluation: order, instant and memory length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferintegralRequest {
    /// Derivation order; negative means integration.
    pub order: f64,
    /// Instant of evaluation; must sit on the sample grid.
    pub eval_time: f64,
    /// Length of memory in seconds; the window `[eval_time - L, eval_time]`
    /// must be covered by the signal.
    pub memory_length: f64,
}

/// Number of backward steps covered by a memory of `memory_length` seconds.
///
/// `floor(L / T)` with a one-part-per-billion relative guard so that exact
/// integer ratios survive binary rounding of either operand.
fn memory_steps(memory_length: f64, sample_period: f64) -> usize {
    let ratio = memory_length / sample_period;
    (ratio * (1.0 + 1e-9) + 1e-9).floor() as usize
}

fn validate_memory_length(memory_length: f64) -> Result<()> {
    if !(memory_length.is_finite() && memory_length > 0.0) {
        return Err(Error::Config(format!(
            "memory length must be a positive finite number, got {memory_length}"
        )));
    }
    Ok(())
}

/// Evaluates one short-memory differintegral of `signal`.
///
/// Errors when `eval_time` does not snap to a sample instant of the record
/// or when the memory window `[eval_time - L, eval_time]` reaches before
/// the first sample.
pub fn differintegrate(signal: &SampledSignal, req: &DifferintegralRequest) -> Result<f64> {
    validate_memory_length(req.memory_length)?;
    let k = signal.index_at_time(req.eval_time)?;
    let m = memory_steps(req.memory_length, signal.sample_period());
    if k < m {
        return Err(Error::WindowOutOfRange {
            window_start: req.eval_time - req.memory_length,
            eval_time: req.eval_time,
            signal_start: signal.start_time(),
        });
    }
    let weights = gl_weights(req.order, m + 1);
    Ok(apply_at(
        signal.samples(),
        &weights,
        k,
        signal.sample_period(),
    ))
}

/// Evaluates the differintegral at every sample instant.
///
/// Instants closer than `memory_length` to the origin use all available
/// history (the window truncates at the first sample); later instants use
/// the full window. The signal must span at least `memory_length`.
pub fn differintegrate_series(
    signal: &SampledSignal,
    order: f64,
    memory_length: f64,
) -> Result<SampledSignal> {
    validate_memory_length(memory_length)?;
    let period = signal.sample_period();
    if signal.duration() + period / 2.0 < memory_length {
        return Err(Error::WindowOutOfRange {
            window_start: signal.end_time() - memory_length,
            eval_time: signal.end_time(),
            signal_start: signal.start_time(),
        });
    }
    let m = memory_steps(memory_length, period);
    let weights = gl_weights(order, m + 1);
    let samples = signal.samples();
    let out: Vec<f64> = (0..samples.len())
        .map(|k| apply_at(samples, &weights, k, period))
        .collect();
    SampledSignal::new(out, period, signal.start_time())
}

/// `T^(-order) * sum_j w_j * s[k - j]`, truncated to the available history.
fn apply_at(samples: &[f64], weights: &GlWeights, k: usize, period: f64) -> f64 {
    let terms = weights.effective_len().min(k + 1);
    let mut acc = 0.0;
    for (j, w) in weights.weights()[..terms].iter().enumerate() {
        acc += w * samples[k - j];
    }
    period.powf(-weights.order()) * acc
}
