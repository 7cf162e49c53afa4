//! Seeded white Gaussian noise.
//!
//! Uniforms come from ChaCha20 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and positioned with `set_stream(stream)`, so each
//! realization of a sweep draws from its own counter-addressed stream.
//! Normals are produced by the Box-Muller transform, both outputs used:
//!
//! ```text
//! u1 = 1 - U[0,1)   (in (0, 1])
//! u2 = U[0,1)
//! r  = sqrt(-2 ln u1)
//! z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::Signal;
use crate::error::{invalid, Result};

/// `len` i.i.d. `N(0, sigma^2)` samples from stream `stream` of `seed`.
pub fn gaussian_noise(len: usize, sigma: f64, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        let u1 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        out.push(sigma * r * c);
        out.push(sigma * r * s);
    }
    out.truncate(len);
    out
}

/// Add real-valued white Gaussian noise to the real part of every sample.
pub fn add_awgn(signal: &Signal, sigma: f64, seed: u64) -> Result<Signal> {
    add_awgn_stream(signal, sigma, seed, 0)
}

pub fn add_awgn_stream(signal: &Signal, sigma: f64, seed: u64, stream: u64) -> Result<Signal> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid(
            "sigma",
            format!("must be finite and >= 0, got {sigma}"),
        ));
    }
    if sigma == 0.0 {
        return Ok(signal.clone());
    }
    let noise = gaussian_noise(signal.len(), sigma, seed, stream);
    Ok(Signal::new(
        signal
            .samples()
            .iter()
            .zip(noise)
            .map(|(z, e)| z + e)
            .collect(),
    ))
}
