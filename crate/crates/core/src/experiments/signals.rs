use std::f64::consts::PI;

use num_complex::Complex64;

use super::ExperimentSpec;
use crate::error::{invalid, Result};

/// A finite sampled signal, `samples[m]` for `m = 0..len`. Real signals are
/// stored with zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn from_real(samples: &[f64]) -> Self {
        Self::new(samples.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }
}

/// `g(m) = a1 cos(2 pi f1 m) + a2 sin(2 pi f2 m)`, `m = 0..M`.
pub fn make_two_sine(spec: &ExperimentSpec) -> Result<Signal> {
    spec.validate()?;
    let (f1, f2) = spec.frequencies;
    let (a1, a2) = spec.amplitudes;
    Ok(Signal::from_real(
        &(0..spec.signal_len)
            .map(|m| {
                let t = m as f64;
                a1 * (2.0 * PI * f1 * t).cos() + a2 * (2.0 * PI * f2 * t).sin()
            })
            .collect::<Vec<_>>(),
    ))
}

/// Synthetic linear chirp used in place of a recorded echolocation pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpSpec {
    pub len: usize,
    /// Normalized start and end frequency (cycles per sample).
    pub f_start: f64,
    pub f_end: f64,
    pub amplitude: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub segment_len: usize,
}

impl Default for ChirpSpec {
    fn default() -> Self {
        Self {
            len: 400,
            f_start: 0.05,
            f_end: 0.35,
            amplitude: 0.5,
            noise_sigma: 0.05,
            seed: 2017,
            segment_len: crate::operators::StftFrameOperator::DEFAULT_SEGMENT_LEN,
        }
    }
}

impl ChirpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(invalid("len", "chirp needs at least 2 samples"));
        }
        for (name, f) in [("f_start", self.f_start), ("f_end", self.f_end)] {
            if !(f > 0.0 && f < 0.5) {
                return Err(invalid(name, format!("must lie in (0, 0.5), got {f}")));
            }
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(invalid("noise_sigma", "must be >= 0"));
        }
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        Ok(())
    }
}

/// `a cos(2 pi (f0 n + (f1 - f0) n^2 / (2 (L - 1))))`: instantaneous frequency
/// sweeps linearly from `f0` at `n = 0` to `f1` at `n = L - 1`.
pub fn make_chirp(spec: &ChirpSpec) -> Result<Signal> {
    spec.validate()?;
    let rate = (spec.f_end - spec.f_start) / (spec.len - 1) as f64;
    Ok(Signal::from_real(
        &(0..spec.len)
            .map(|n| {
                let t = n as f64;
                spec.amplitude * (2.0 * PI * (spec.f_start * t + 0.5 * rate * t * t)).cos()
            })
            .collect::<Vec<_>>(),
    ))
}
