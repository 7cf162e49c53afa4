use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::LinearOperator;
use crate::error::{invalid, Result};

/// Inverse STFT as a synthesis operator: maps time-frequency coefficients
/// (frame-major, `frames x segment_len`) to a time signal.
///
/// Segments of length `R` start every `R / 4` samples (75% overlap), with the
/// first segment starting at `-(R - R/4)` so every sample is covered by the
/// same number of segments. Out-of-range samples are dropped on synthesis and
/// read as zero on analysis. The window is a periodic square-root Hann scaled
/// so that `A A^H = I`.
#[derive(Clone)]
pub struct StftFrameOperator {
    signal_len: usize,
    segment_len: usize,
    hop: usize,
    frames: usize,
    window: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for StftFrameOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StftFrameOperator")
            .field("signal_len", &self.signal_len)
            .field("segment_len", &self.segment_len)
            .field("hop", &self.hop)
            .field("frames", &self.frames)
            .finish()
    }
}

impl StftFrameOperator {
    pub const DEFAULT_SEGMENT_LEN: usize = 64;

    pub fn new(signal_len: usize, segment_len: usize) -> Result<Self> {
        if signal_len == 0 {
            return Err(invalid("signal_len", "must be positive"));
        }
        if segment_len < 4 || !segment_len.is_multiple_of(4) {
            return Err(invalid(
                "segment_len",
                format!("must be a positive multiple of 4, got {segment_len}"),
            ));
        }
        let hop = segment_len / 4;
        // starts: -(R - H), -(R - H) + H, ..., last start <= signal_len - 1
        let frames = (signal_len - 1 + segment_len - hop) / hop + 1;

        let hann: Vec<f64> = (0..segment_len)
            .map(|n| 0.5 * (1.0 - (2.0 * PI * n as f64 / segment_len as f64).cos()))
            .collect();
        // Overlap-add of the squared window; constant (= 2) for hop R/4.
        let overlap: f64 = (0..4).map(|k| hann[k * hop]).sum();
        let c0 = 1.0 / (segment_len as f64 * overlap).sqrt();
        let window = hann.iter().map(|h| h.sqrt() * c0).collect();

        let mut planner = FftPlanner::new();
        Ok(Self {
            signal_len,
            segment_len,
            hop,
            frames,
            window,
            fwd: planner.plan_fft_forward(segment_len),
            inv: planner.plan_fft_inverse(segment_len),
        })
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn segment_len(&self) -> usize {
        self.segment_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    fn frame_start(&self, k: usize) -> isize {
        (k * self.hop) as isize - (self.segment_len - self.hop) as isize
    }

    /// Range of in-signal offsets `n` (within the segment) for frame `k`.
    fn valid_offsets(&self, k: usize) -> (isize, std::ops::Range<usize>) {
        let start = self.frame_start(k);
        let lo = (-start).max(0) as usize;
        let hi = (self.signal_len as isize - start).min(self.segment_len as isize) as usize;
        (start, lo..hi)
    }
}

impl LinearOperator<Complex64> for StftFrameOperator {
    fn domain_dim(&self) -> usize {
        self.frames * self.segment_len
    }

    fn codomain_dim(&self) -> usize {
        self.signal_len
    }

    fn forward_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let mut buf = vec![Complex64::new(0.0, 0.0); self.segment_len];
        for (k, coefs) in x.chunks_exact(self.segment_len).enumerate() {
            buf.copy_from_slice(coefs);
            self.inv.process(&mut buf);
            let (start, range) = self.valid_offsets(k);
            for n in range {
                out[(start + n as isize) as usize] += buf[n] * self.window[n];
            }
        }
    }

    fn adjoint_into(&self, y: &[Complex64], out: &mut [Complex64]) {
        for (k, coefs) in out.chunks_exact_mut(self.segment_len).enumerate() {
            coefs.fill(Complex64::new(0.0, 0.0));
            let (start, range) = self.valid_offsets(k);
            for n in range {
                coefs[n] = y[(start + n as isize) as usize] * self.window[n];
            }
            self.fwd.process(coefs);
        }
    }
}
