use num_complex::Complex64;
use rayon::prelude::*;

use super::{add_awgn_stream, denoise_frame, make_two_sine, rmse, Signal};
use crate::csvio::{
    aggregate, quantize_sig9, write_aggregates_csv, write_records_csv, Aggregate, Method,
    SweepRecord,
};
use crate::error::{invalid, Result};
use crate::operators::{estimate_gram_norm, DftFrameOperator, LinearOperator};
use crate::solvers::IterOptions;

/// Parameters of the frequency-domain denoising study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub signal_len: usize,
    pub coef_len: usize,
    pub frequencies: (f64, f64),
    pub amplitudes: (f64, f64),
    pub noise_sigma: f64,
    pub realizations: usize,
    pub lambda_grid: Vec<f64>,
    pub gamma: f64,
    pub seed: u64,
    pub opts: IterOptions,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            signal_len: 100,
            coef_len: 256,
            frequencies: (0.1, 0.22),
            amplitudes: (2.0, 1.0),
            noise_sigma: 1.0,
            realizations: 20,
            lambda_grid: (0..13).map(|i| 0.5 + 0.25 * i as f64).collect(),
            gamma: 0.8,
            seed: 0,
            opts: IterOptions {
                tol: 1e-9,
                max_iter: 100_000,
                ..IterOptions::default()
            },
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.signal_len == 0 {
            return Err(invalid("signal_len", "must be positive"));
        }
        if self.coef_len < self.signal_len {
            return Err(invalid("coef_len", "must be >= signal_len"));
        }
        for f in [self.frequencies.0, self.frequencies.1] {
            if !(f > 0.0 && f < 0.5) {
                return Err(invalid(
                    "frequencies",
                    format!("must lie in (0, 0.5), got {f}"),
                ));
            }
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(invalid("noise_sigma", "must be finite and >= 0"));
        }
        if self.realizations == 0 {
            return Err(invalid("realizations", "must be at least 1"));
        }
        if self.lambda_grid.is_empty() {
            return Err(invalid("lambda_grid", "must not be empty"));
        }
        if self.lambda_grid.windows(2).any(|w| w[1] <= w[0]) || self.lambda_grid[0] <= 0.0 {
            return Err(invalid(
                "lambda_grid",
                "must be positive and strictly increasing",
            ));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid(
                "gamma",
                format!("must lie in [0, 1), got {}", self.gamma),
            ));
        }
        Ok(())
    }
}

/// A sweep cell whose solve failed or did not converge.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub method: Method,
    pub lambda: f64,
    pub realization: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by method, then lambda, then realization. RMSE values are
    /// rounded to the 9 significant digits written to CSV.
    pub records: Vec<SweepRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<CellFailure>,
}

impl SweepResult {
    pub fn records_csv(&self) -> String {
        write_records_csv(&self.records)
    }

    pub fn aggregates_csv(&self) -> String {
        write_aggregates_csv(&self.aggregates)
    }
}

/// `(lambda, rmse_mean)` with the smallest mean RMSE for `method`.
pub fn best_lambda(aggregates: &[Aggregate], method: Method) -> Option<(f64, f64)> {
    aggregates
        .iter()
        .filter(|a| a.method == method && a.rmse_mean.is_finite())
        .min_by(|a, b| a.rmse_mean.total_cmp(&b.rmse_mean))
        .map(|a| (a.lambda, a.rmse_mean))
}

/// Run every method at every lambda on every noise realization.
///
/// Realization `r` uses noise stream `r` of `spec.seed`. Cells run in
/// parallel; results are ordered deterministically afterwards.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let frame = DftFrameOperator::new(spec.signal_len, spec.coef_len)?;
    let mut opts = spec.opts.clone();
    if opts.a_gram_norm.is_none() {
        opts.a_gram_norm = Some(estimate_gram_norm(&frame, 1e-12, 1000)?);
    }
    let clean = make_two_sine(spec)?;
    let noisy: Vec<Signal> = (0..spec.realizations)
        .map(|r| add_awgn_stream(&clean, spec.noise_sigma, spec.seed, r as u64))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..spec.realizations)
        .flat_map(|r| (0..spec.lambda_grid.len()).map(move |l| (r, l)))
        .collect();
    let outcomes: Vec<Vec<(usize, SweepRecord, Option<CellFailure>)>> = cells
        .par_iter()
        .map(|&(r, l)| {
            let lam = spec.lambda_grid[l];
            Method::ALL
                .iter()
                .map(|&method| {
                    let (record, failure) =
                        run_cell(&frame, &clean, &noisy[r], method, lam, spec.gamma, &opts, r);
                    (l, record, failure)
                })
                .collect()
        })
        .collect();

    let mut rows: Vec<(usize, SweepRecord, Option<CellFailure>)> =
        outcomes.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.1.method, a.0, a.1.realization).cmp(&(b.1.method, b.0, b.1.realization))
    });
    let failures = rows.iter().filter_map(|r| r.2.clone()).collect();
    let records: Vec<SweepRecord> = rows.into_iter().map(|r| r.1).collect();
    let aggregates = aggregate(&records);
    Ok(SweepResult {
        records,
        aggregates,
        failures,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    frame: &DftFrameOperator,
    clean: &Signal,
    noisy: &Signal,
    method: Method,
    lam: f64,
    gamma: f64,
    opts: &IterOptions,
    realization: usize,
) -> (SweepRecord, Option<CellFailure>) {
    let fail = |reason: String| CellFailure {
        method,
        lambda: lam,
        realization,
        reason,
    };
    match denoise_frame(noisy, frame, method, lam, gamma, opts) {
        Ok(out) => {
            let err = rmse(&out.reconstruction, clean).unwrap_or(f64::NAN);
            let failure = (!out.converged)
                .then(|| fail(format!("not converged after {} iterations", out.iterations)));
            let record = SweepRecord {
                method,
                lambda: lam,
                realization,
                rmse: quantize_sig9(err),
                nnz: out.nnz(),
            };
            (record, failure)
        }
        Err(e) => (
            SweepRecord {
                method,
                lambda: lam,
                realization,
                rmse: f64::NAN,
                nnz: 0,
            },
            Some(fail(e.to_string())),
        ),
    }
}

/// Amplitude estimates of the sinusoidal components present in DFT-frame
/// coefficients, largest first.
///
/// Non-zero bins (relative threshold `rel`) in the positive-frequency half
/// are grouped into clusters of bins at most `gap` apart. Each cluster,
/// together with its mirror bins `N - k`, is synthesized on its own and its
/// amplitude is taken as `sqrt(2)` times the RMS of that partial
/// reconstruction.
pub fn sinusoid_amplitudes(
    coefs: &[Complex64],
    frame: &DftFrameOperator,
    rel: f64,
    gap: usize,
) -> Result<Vec<f64>> {
    let n = frame.coef_len();
    if coefs.len() != n {
        return Err(crate::error::Error::DimensionMismatch {
            expected: n,
            actual: coefs.len(),
        });
    }
    let peak = coefs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(Vec::new());
    }
    let active: Vec<usize> = (1..=n / 2)
        .filter(|&k| coefs[k].norm() > rel * peak || coefs[n - k].norm() > rel * peak)
        .collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in active {
        match clusters.last_mut() {
            Some(c) if k - c[c.len() - 1] <= gap => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    let mut amps = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let mut part = vec![Complex64::new(0.0, 0.0); n];
        for &k in &cluster {
            part[k] = coefs[k];
            part[n - k] = coefs[n - k];
        }
        let synth = frame.apply_forward(&part)?;
        let ms = synth.iter().map(|z| z.norm_sqr()).sum::<f64>() / synth.len() as f64;
        amps.push((2.0 * ms).sqrt());
    }
    amps.sort_by(|a, b| b.total_cmp(a));
    Ok(amps)
}
