use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gmc::csvio::{fmt_sig9, parse_lambda_grid, parse_signal_csv, write_signal_csv, Method};
use gmc::experiments::{
    add_awgn, best_lambda, denoise_frame, make_chirp, make_two_sine, rmse, run_sweep, ChirpSpec,
    ExperimentSpec, Signal,
};
use gmc::multivariate_penalties::GmcPenalty;
use gmc::operators::{DenseOperator, DftFrameOperator, LinearOperator, StftFrameOperator};
use gmc::scalar_penalties::{firm, soft, FirmParams};
use gmc::solvers::IterOptions;
use gmc::{Complex64, Error};

use crate::CliError;

type CliResult<T> = Result<T, CliError>;

/// Parameter errors are usage errors; everything else is a runtime failure.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidParameter { .. } | Error::Parse { .. } | Error::DimensionMismatch { .. } => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Convergence tolerance on the sup-norm iterate change
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

impl SolverFlags {
    fn opts(&self) -> CliResult<IterOptions> {
        if !(self.tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be positive".into()));
        }
        Ok(IterOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..IterOptions::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 100)]
    pub signal_len: usize,
    #[arg(long, default_value_t = 256)]
    pub coef_len: usize,
    #[arg(long, default_value_t = 0.1)]
    pub f1: f64,
    #[arg(long, default_value_t = 0.22)]
    pub f2: f64,
    /// Noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 20)]
    pub realizations: usize,
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    /// `start:step:stop` or a comma-separated list
    #[arg(long = "lambda", default_value = "0.5:0.25:3.5")]
    pub lambda: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for records.csv and aggregates.csv
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let spec = ExperimentSpec {
        signal_len: args.signal_len,
        coef_len: args.coef_len,
        frequencies: (args.f1, args.f2),
        noise_sigma: args.sigma,
        realizations: args.realizations,
        lambda_grid: parse_lambda_grid(&args.lambda).map_err(classify)?,
        gamma: args.gamma,
        seed: args.seed,
        opts: args.solver.opts()?,
        ..ExperimentSpec::default()
    };
    spec.validate().map_err(classify)?;
    let result = run_sweep(&spec).map_err(classify)?;
    write_file(&args.out.join("records.csv"), &result.records_csv())?;
    write_file(&args.out.join("aggregates.csv"), &result.aggregates_csv())?;
    for method in Method::ALL {
        if let Some((lam, mean)) = best_lambda(&result.aggregates, method) {
            println!(
                "{method}: best lambda {} (mean rmse {})",
                fmt_sig9(lam),
                fmt_sig9(mean)
            );
        }
    }
    if result.failures.is_empty() {
        Ok(())
    } else {
        for f in &result.failures {
            eprintln!(
                "cell {} lambda={} realization={}: {}",
                f.method, f.lambda, f.realization, f.reason
            );
        }
        Err(CliError::Runtime(format!(
            "{} sweep cells failed",
            result.failures.len()
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    L1,
    #[value(name = "l1-debiased", alias = "l1_debiased")]
    L1Debiased,
    Gmc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::L1 => Method::L1,
            MethodArg::L1Debiased => Method::L1Debiased,
            MethodArg::Gmc => Method::Gmc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Dft,
    Stft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinSignal {
    TwoSine,
    Chirp,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Signal CSV (one real per line, or `re,im` per line); built-in signal when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in clean signal, corrupted with `--sigma` noise
    #[arg(long, value_enum, default_value_t = BuiltinSignal::TwoSine)]
    pub signal: BuiltinSignal,
    #[arg(long, value_enum, default_value_t = MethodArg::Gmc)]
    pub method: MethodArg,
    #[arg(long = "lambda", default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    /// Noise added to the built-in signal (default 1.0 for two-sine, 0.05 for chirp)
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Frame; defaults to dft for two-sine and stft for chirp or file input
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Number of DFT-frame coefficients
    #[arg(long, default_value_t = 256)]
    pub coef_len: usize,
    #[arg(long, default_value_t = StftFrameOperator::DEFAULT_SEGMENT_LEN)]
    pub segment_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for reconstruction.csv and coefficients.csv
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

pub fn cmd_denoise(args: &DenoiseArgs) -> CliResult<()> {
    let (observed, clean, default_frame) = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            let data = parse_signal_csv(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            (Signal::new(data.to_complex()), None, FrameArg::Stft)
        }
        None => {
            let (clean, sigma, frame) = match args.signal {
                BuiltinSignal::TwoSine => (
                    make_two_sine(&ExperimentSpec::default()).map_err(classify)?,
                    args.sigma.unwrap_or(1.0),
                    FrameArg::Dft,
                ),
                BuiltinSignal::Chirp => (
                    make_chirp(&ChirpSpec::default()).map_err(classify)?,
                    args.sigma.unwrap_or(0.05),
                    FrameArg::Stft,
                ),
            };
            let noisy = add_awgn(&clean, sigma, args.seed).map_err(classify)?;
            (noisy, Some(clean), frame)
        }
    };
    let frame: Box<dyn LinearOperator<Complex64>> = match args.frame.unwrap_or(default_frame) {
        FrameArg::Dft => {
            Box::new(DftFrameOperator::new(observed.len(), args.coef_len).map_err(classify)?)
        }
        FrameArg::Stft => {
            Box::new(StftFrameOperator::new(observed.len(), args.segment_len).map_err(classify)?)
        }
    };
    let method = Method::from(args.method);
    if method == Method::Gmc && !(0.0..1.0).contains(&args.gamma) {
        return Err(CliError::Usage(format!(
            "--gamma must lie in [0, 1), got {}",
            args.gamma
        )));
    }
    let mut opts = args.solver.opts()?;
    // both frames are normalized tight frames
    opts.a_gram_norm = Some(1.0);
    let out = denoise_frame(
        &observed,
        frame.as_ref(),
        method,
        args.lambda,
        args.gamma,
        &opts,
    )
    .map_err(classify)?;

    write_file(
        &args.out.join("reconstruction.csv"),
        &write_signal_csv(out.reconstruction.samples()),
    )?;
    let mut mags = String::from("index,magnitude\n");
    for (i, z) in out.coefs.iter().enumerate() {
        mags.push_str(&format!("{i},{}\n", fmt_sig9(z.norm())));
    }
    write_file(&args.out.join("coefficients.csv"), &mags)?;

    println!(
        "method {method} lambda {} nnz {}",
        fmt_sig9(args.lambda),
        out.nnz()
    );
    match clean {
        Some(c) => println!(
            "rmse {}",
            fmt_sig9(rmse(&out.reconstruction, &c).map_err(classify)?)
        ),
        None => println!(
            "residual rmse {}",
            fmt_sig9(rmse(&out.reconstruction, &observed).map_err(classify)?)
        ),
    }
    if !out.converged {
        return Err(CliError::Runtime(format!(
            "solver did not converge in {} iterations",
            out.iterations
        )));
    }
    Ok(())
}

/// `lo:hi` range flag.
fn parse_range(text: &str, name: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("--{name} must be lo:hi with lo < hi, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Matrix B as CSV, one row per line; must have 2 columns
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub x1_range: String,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub x2_range: String,
    /// Grid points per axis
    #[arg(long, default_value_t = 61)]
    pub steps: usize,
    #[arg(long, default_value = "eval.csv")]
    pub out: PathBuf,
}

pub fn cmd_eval(args: &EvalArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.b)
        .map_err(|e| CliError::Usage(format!("reading {}: {e}", args.b.display())))?;
    let b = DenseOperator::from_csv_str(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    if b.cols() != 2 {
        return Err(CliError::Usage(format!(
            "grid evaluation needs a 2-column B, got {} columns",
            b.cols()
        )));
    }
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let (r1, r2) = (
        parse_range(&args.x1_range, "x1-range")?,
        parse_range(&args.x2_range, "x2-range")?,
    );
    let pen = GmcPenalty::new(std::sync::Arc::new(b)).map_err(classify)?;
    let axis = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (args.steps - 1) as f64;
    let mut out = String::from("x1,x2,S_B,psi_B\n");
    for i in 0..args.steps {
        for j in 0..args.steps {
            let x = [axis(r1, i), axis(r2, j)];
            let s = pen.eval_generalized_huber(&x).map_err(classify)?.value;
            let psi = x[0].abs() + x[1].abs() - s;
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig9(x[0]),
                fmt_sig9(x[1]),
                fmt_sig9(s),
                fmt_sig9(psi)
            ));
        }
    }
    write_file(&args.out, &out)
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long = "lambda", default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    pub mu: f64,
    /// Curves cover y in [-y_max, y_max]
    #[arg(long, default_value_t = 4.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 801)]
    pub steps: usize,
    #[arg(long, default_value = "threshold.csv")]
    pub out: PathBuf,
}

pub fn cmd_threshold(args: &ThresholdArgs) -> CliResult<()> {
    let params = FirmParams::new(args.lambda, args.mu).map_err(classify)?;
    if !(args.y_max > 0.0) || args.steps < 2 {
        return Err(CliError::Usage(
            "--y-max must be positive and --steps at least 2".into(),
        ));
    }
    let mut out = String::from("y,firm,soft\n");
    for i in 0..args.steps {
        let y = -args.y_max + 2.0 * args.y_max * i as f64 / (args.steps - 1) as f64;
        let s = soft(y, args.lambda).map_err(classify)?;
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig9(y),
            fmt_sig9(firm(y, &params)),
            fmt_sig9(s)
        ));
    }
    write_file(&args.out, &out)
}
