use rayon::prelude::*;

use super::{add_awgn, denoise_frame, make_chirp, rmse, ChirpSpec, Denoised, Signal};
use crate::csvio::{fmt_sig9, Method};
use crate::error::{invalid, Result};
use crate::operators::StftFrameOperator;
use crate::solvers::IterOptions;

/// One l1 and one GMC denoising of the same noisy chirp.
#[derive(Debug, Clone, PartialEq)]
pub struct StftReport {
    pub lam_l1: f64,
    pub lam_gmc: f64,
    pub rmse_l1: f64,
    pub rmse_gmc: f64,
    pub nnz_l1: usize,
    pub nnz_gmc: usize,
    pub converged: bool,
}

struct Setup {
    frame: StftFrameOperator,
    clean: Signal,
    noisy: Signal,
    opts: IterOptions,
}

fn setup(spec: &ChirpSpec, opts: &IterOptions) -> Result<Setup> {
    spec.validate()?;
    let frame = StftFrameOperator::new(spec.len, spec.segment_len)?;
    let clean = make_chirp(spec)?;
    let noisy = add_awgn(&clean, spec.noise_sigma, spec.seed)?;
    let mut opts = opts.clone();
    // normalized tight frame
    opts.a_gram_norm.get_or_insert(1.0);
    Ok(Setup {
        frame,
        clean,
        noisy,
        opts,
    })
}

impl Setup {
    fn run(&self, method: Method, lam: f64, gamma: f64) -> Result<(Denoised, f64)> {
        let out = denoise_frame(&self.noisy, &self.frame, method, lam, gamma, &self.opts)?;
        let err = rmse(&out.reconstruction, &self.clean)?;
        Ok((out, err))
    }
}

/// Denoise the noisy chirp with the l1 norm at `lam_l1` and with the GMC
/// penalty at `lam_gmc`, reporting RMSE and time-frequency sparsity.
pub fn run_stft_demo(
    spec: &ChirpSpec,
    lam_l1: f64,
    lam_gmc: f64,
    gamma: f64,
    opts: &IterOptions,
) -> Result<StftReport> {
    let s = setup(spec, opts)?;
    let (l1, gmc) = rayon::join(
        || s.run(Method::L1, lam_l1, 0.0),
        || s.run(Method::Gmc, lam_gmc, gamma),
    );
    let ((l1, rmse_l1), (gmc, rmse_gmc)) = (l1?, gmc?);
    Ok(StftReport {
        lam_l1,
        lam_gmc,
        rmse_l1,
        rmse_gmc,
        nnz_l1: l1.nnz(),
        nnz_gmc: gmc.nnz(),
        converged: l1.converged && gmc.converged,
    })
}

/// Result of comparing both penalties at (approximately) equal RMSE.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedComparison {
    pub report: StftReport,
    /// `|rmse_gmc - rmse_l1| / rmse_l1`
    pub rmse_gap: f64,
    /// RMSE curves over the supplied grids, `(lambda, rmse)`.
    pub l1_curve: Vec<(f64, f64)>,
    pub gmc_curve: Vec<(f64, f64)>,
}

impl MatchedComparison {
    /// Both RMSE curves as `method,lambda,rmse` rows.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("method,lambda,rmse\n");
        for (method, curve) in [(Method::L1, &self.l1_curve), (Method::Gmc, &self.gmc_curve)] {
            for &(lam, err) in curve {
                out.push_str(&format!("{method},{},{}\n", fmt_sig9(lam), fmt_sig9(err)));
            }
        }
        out
    }
}

/// Pick the RMSE-optimal lambda for l1 on `l1_grid`, then the largest GMC
/// lambda whose RMSE matches it.
///
/// GMC candidates are taken from `gmc_grid` at or above the GMC RMSE optimum.
/// If no grid point lies within `tol_rel` of the l1 RMSE, the bracketing
/// interval is bisected.
pub fn matched_rmse_comparison(
    spec: &ChirpSpec,
    gamma: f64,
    l1_grid: &[f64],
    gmc_grid: &[f64],
    tol_rel: f64,
    opts: &IterOptions,
) -> Result<MatchedComparison> {
    if l1_grid.is_empty() || gmc_grid.is_empty() {
        return Err(invalid("grid", "lambda grids must not be empty"));
    }
    let s = setup(spec, opts)?;
    let curve = |method: Method, grid: &[f64]| -> Result<Vec<(f64, f64, usize, bool)>> {
        grid.par_iter()
            .map(|&lam| {
                let (out, err) = s.run(method, lam, gamma)?;
                Ok((lam, err, out.nnz(), out.converged))
            })
            .collect()
    };
    let l1 = curve(Method::L1, l1_grid)?;
    let gmc = curve(Method::Gmc, gmc_grid)?;

    let best_l1 = l1
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .copied()
        .expect("non-empty grid");
    let target = best_l1.1;
    let gmc_opt = gmc
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty grid");

    let within = |e: f64| (e - target).abs() <= tol_rel * target;
    let mut chosen = gmc[gmc_opt..]
        .iter()
        .rev()
        .find(|c| within(c.1))
        .map(|&(lam, err, nnz, conv)| (lam, err, nnz, conv));
    if chosen.is_none() {
        // bracket [lo, hi] with rmse(lo) < target < rmse(hi)
        if let Some(i) =
            (gmc_opt..gmc.len() - 1).find(|&i| gmc[i].1 < target && gmc[i + 1].1 > target)
        {
            let (mut lo, mut hi) = (gmc[i].0, gmc[i + 1].0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let (out, err) = s.run(Method::Gmc, mid, gamma)?;
                if within(err) {
                    chosen = Some((mid, err, out.nnz(), out.converged));
                    break;
                }
                if err < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    // Fall back to the GMC optimum so the caller can inspect the gap.
    let g = chosen.unwrap_or(gmc[gmc_opt]);
    Ok(MatchedComparison {
        report: StftReport {
            lam_l1: best_l1.0,
            lam_gmc: g.0,
            rmse_l1: best_l1.1,
            rmse_gmc: g.1,
            nnz_l1: best_l1.2,
            nnz_gmc: g.2,
            converged: best_l1.3 && g.3,
        },
        rmse_gap: (g.1 - target).abs() / target,
        l1_curve: l1.iter().map(|c| (c.0, c.1)).collect(),
        gmc_curve: gmc.iter().map(|c| (c.0, c.1)).collect(),
    })
}
