//! Piecewise-constant voltage waveforms on a uniform sampling grid.

use crate::error::{Error, Result};

/// A sample-and-hold voltage waveform: `samples[k]` is applied over
/// `[k * sample_interval, (k + 1) * sample_interval)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    /// Uniform sampling interval (s).
    pub sample_interval: f64,
    /// Voltage levels (V), one per interval.
    pub samples: Vec<f64>,
}

impl Stimulus {
    /// Builds a stimulus from raw samples, validating the invariants:
    /// positive interval, at least two samples, all levels finite.
    pub fn new(sample_interval: f64, samples: Vec<f64>) -> Result<Self> {
        if sample_interval <= 0.0 || !sample_interval.is_finite() {
            return Err(Error::InvalidStimulus(format!(
                "sample interval must be positive and finite, got {sample_interval}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidStimulus(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidStimulus(format!(
                "non-finite voltage level {bad}"
            )));
        }
        Ok(Self {
            sample_interval,
            samples,
        })
    }

    /// Expands `(duration_s, level_V)` segments to samples at spacing
    /// `dt`. Each duration is rounded to the nearest multiple of `dt`,
    /// ties rounding up; a segment shorter than `dt / 2` contributes no
    /// samples.
    pub fn from_segments(segments: &[(f64, f64)], dt: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidStimulus("empty segment list".into()));
        }
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidStimulus(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        let mut samples = Vec::new();
        for &(duration, level) in segments {
            if duration <= 0.0 || !duration.is_finite() {
                return Err(Error::InvalidStimulus(format!(
                    "segment duration must be positive and finite, got {duration}"
                )));
            }
            let n = (duration / dt + 0.5).floor() as usize; // nearest, ties up
            samples.extend(std::iter::repeat_n(level, n));
        }
        Self::new(dt, samples)
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total waveform duration (s).
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.sample_interval
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_expansion_counts() {
        let stim = Stimulus::from_segments(&[(20e-3, 3.0), (80e-3, -1.0)], 10e-6).unwrap();
        assert_eq!(stim.len(), 10_000);
        assert!(stim.samples[..2000].iter().all(|&v| v == 3.0));
        assert!(stim.samples[2000..].iter().all(|&v| v == -1.0));
    }

    #[test]
    fn one_second_at_half_second_dt_gives_two_samples() {
        let stim = Stimulus::from_segments(&[(1.0, 0.0)], 0.5).unwrap();
        assert_eq!(stim.samples, vec![0.0, 0.0]);
    }

    #[test]
    fn empty_segment_list_is_rejected() {
        assert!(Stimulus::from_segments(&[], 1e-3).is_err());
    }

    #[test]
    fn ties_round_up() {
        // 2.5 * dt rounds to 3 samples
        let stim = Stimulus::from_segments(&[(2.5, 1.0), (4.0, 0.0)], 1.0).unwrap();
        assert_eq!(stim.len(), 7);
        assert_eq!(stim.samples[2], 1.0);
        assert_eq!(stim.samples[3], 0.0);
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(Stimulus::new(0.0, vec![0.0, 0.0]).is_err());
        assert!(Stimulus::new(1e-3, vec![0.0]).is_err());
        assert!(Stimulus::new(1e-3, vec![0.0, f64::NAN]).is_err());
        assert!(Stimulus::from_segments(&[(-1.0, 0.0)], 1e-3).is_err());
    }
}
