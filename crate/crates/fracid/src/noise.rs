//! Seeded uniform measurement corruption.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Bounded uniform noise: samples are drawn independently from
/// `[-amplitude, amplitude]`. The same seed reproduces the same sequence
/// within one build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    amplitude: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "noise amplitude must be non-negative and finite, got {amplitude}"
            )));
        }
        Ok(Self { amplitude, seed })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws `length` independent samples uniform in `[-A, A]`, starting at t = 0.
///
/// Amplitude zero yields an exactly-zero signal.
pub fn generate_noise(
    length: usize,
    sample_period: f64,
    spec: &NoiseSpec,
) -> Result<SampledSignal> {
    if length == 0 {
        return Err(Error::Config("noise length must be at least 1".into()));
    }
    let a = spec.amplitude;
    let samples = if a == 0.0 {
        vec![0.0; length]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        (0..length).map(|_| rng.random_range(-a..=a)).collect()
    };
    SampledSignal::from_origin(samples, sample_period)
}

/// Adds a fresh noise sequence to `signal`, preserving period and origin.
pub fn corrupt(signal: &SampledSignal, spec: &NoiseSpec) -> Result<SampledSignal> {
    let noise = generate_noise(signal.len(), signal.sample_period(), spec)?;
    let samples = signal
        .samples()
        .iter()
        .zip(noise.samples())
        .map(|(s, e)| s + e)
        .collect();
    SampledSignal::new(samples, signal.sample_period(), signal.start_time())
}
