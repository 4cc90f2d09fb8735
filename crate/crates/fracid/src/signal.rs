//! Uniformly sampled real-valued time series.

use crate::error::{Error, Result};

/// A uniformly sampled signal: values, sample period and origin time.
///
/// Sample `k` is taken at `start_time + k * sample_period`. The sample
/// period is strictly positive and the sample vector is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_period: f64,
    start_time: f64,
}

impl SampledSignal {
    /// Builds a signal, validating the structural invariants.
    pub fn new(samples: Vec<f64>, sample_period: f64, start_time: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSignal("signal must be non-empty".into()));
        }
        if !(sample_period.is_finite() && sample_period > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "sample period must be a positive finite number, got {sample_period}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "start time must be finite, got {start_time}"
            )));
        }
        if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!("sample {bad} is not finite")));
        }
        Ok(Self {
            samples,
            sample_period,
            start_time,
        })
    }

    /// A signal starting at t = 0.
    pub fn from_origin(samples: Vec<f64>, sample_period: f64) -> Result<Self> {
        Self::new(samples, sample_period, 0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    /// Time of sample `index`.
    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.sample_period
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.time_at(self.len() - 1)
    }

    /// Time spanned between the first and last sample.
    pub fn duration(&self) -> f64 {
        (self.len() - 1) as f64 * self.sample_period
    }

    /// Maps a time to the nearest sample index.
    ///
    /// Times snap to the closest sample instant; anything farther than half
    /// a period from every instant (that is, beyond either end of the
    /// record) is an error.
    pub fn index_at_time(&self, time: f64) -> Result<usize> {
        let out_of_range = || Error::TimeOutOfRange {
            time,
            start: self.start_time,
            end: self.end_time(),
        };
        if !time.is_finite() {
            return Err(out_of_range());
        }
        let k = ((time - self.start_time) / self.sample_period).round();
        if k < 0.0 || k > (self.len() - 1) as f64 {
            return Err(out_of_range());
        }
        Ok(k as usize)
    }

    /// Keeps every `stride`-th sample, starting from the first.
    pub fn decimate(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Config("decimation stride must be >= 1".into()));
        }
        let samples: Vec<f64> = self.samples.iter().copied().step_by(stride).collect();
        Self::new(samples, self.sample_period * stride as f64, self.start_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_signal() {
        assert!(matches!(
            SampledSignal::from_origin(vec![], 0.1),
            Err(Error::InvalidSignal(_))
        ));
    }

    #[test]
    fn rejects_non_positive_period() {
        assert!(SampledSignal::from_origin(vec![1.0], 0.0).is_err());
        assert!(SampledSignal::from_origin(vec![1.0], -1.0).is_err());
        assert!(SampledSignal::from_origin(vec![1.0], f64::NAN).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        assert!(SampledSignal::from_origin(vec![1.0, f64::INFINITY], 0.1).is_err());
    }

    #[test]
    fn sample_times_follow_the_grid() {
        let s = SampledSignal::new(vec![0.0; 11], 0.5, 2.0).unwrap();
        assert_eq!(s.time_at(0), 2.0);
        assert_eq!(s.time_at(10), 7.0);
        assert_eq!(s.end_time(), 7.0);
        assert_eq!(s.duration(), 5.0);
    }

    #[test]
    fn index_snaps_to_the_nearest_instant() {
        let s = SampledSignal::from_origin(vec![0.0; 101], 0.1).unwrap();
        assert_eq!(s.index_at_time(5.0).unwrap(), 50);
        assert_eq!(s.index_at_time(5.04).unwrap(), 50);
        assert_eq!(s.index_at_time(5.06).unwrap(), 51);
    }

    #[test]
    fn times_beyond_the_record_are_errors() {
        let s = SampledSignal::from_origin(vec![0.0; 11], 0.1).unwrap();
        // Up to half a period beyond either end still snaps to the edge.
        assert_eq!(s.index_at_time(1.04).unwrap(), 10);
        assert_eq!(s.index_at_time(-0.04).unwrap(), 0);
        for t in [2.0, 1.06, -0.06, f64::NAN] {
            assert!(
                matches!(s.index_at_time(t), Err(Error::TimeOutOfRange { .. })),
                "t = {t}"
            );
        }
    }

    #[test]
    fn decimation_keeps_grid_metadata() {
        let s = SampledSignal::from_origin((0..11).map(f64::from).collect(), 0.01).unwrap();
        let d = s.decimate(5).unwrap();
        assert_eq!(d.samples(), &[0.0, 5.0, 10.0]);
        assert_eq!(d.sample_period(), 0.05);
        assert_eq!(d.start_time(), 0.0);
    }
}
