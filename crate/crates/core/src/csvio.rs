//! Text formats: signal and matrix CSV input, sweep record/aggregate CSV
//! output, and lambda-grid specifications.
//!
//! Every parser here takes untrusted text and must return an error rather
//! than panic on malformed input.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Header of the per-cell record CSV.
pub const RECORDS_HEADER: &str = "method,lambda,realization,rmse,nnz";
/// Header of the aggregate CSV.
pub const AGGREGATES_HEADER: &str = "method,lambda,rmse_mean,rmse_std";

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let t = field.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {t:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {t:?}")));
    }
    Ok(v)
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Format with 9 significant digits, shortest form (like C's `%.9g`).
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to the value that [`fmt_sig9`] round-trips to.
pub fn quantize_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_sig9(x).parse().expect("formatted float parses")
}

/// A signal read from CSV: one real per line, or `re,im` per line.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl SignalData {
    pub fn len(&self) -> usize {
        match self {
            SignalData::Real(v) => v.len(),
            SignalData::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            SignalData::Real(v) => v.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            SignalData::Complex(v) => v.clone(),
        }
    }
}

pub fn parse_signal_csv(text: &str) -> Result<SignalData> {
    let mut real = Vec::new();
    let mut complex = Vec::new();
    let mut width = None;
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split(',').collect();
        match (width, fields.len()) {
            (None, w @ (1 | 2)) => width = Some(w),
            (Some(w), n) if w == n => {}
            (None, n) => return Err(parse_err(line, format!("expected 1 or 2 columns, got {n}"))),
            (Some(w), n) => return Err(parse_err(line, format!("expected {w} columns, got {n}"))),
        }
        if fields.len() == 1 {
            real.push(parse_f64(fields[0], line)?);
        } else {
            complex.push(Complex64::new(
                parse_f64(fields[0], line)?,
                parse_f64(fields[1], line)?,
            ));
        }
    }
    match width {
        None => Err(parse_err(0, "empty signal")),
        Some(1) => Ok(SignalData::Real(real)),
        Some(_) => Ok(SignalData::Complex(complex)),
    }
}

/// Complex samples as `re,im` lines; real-valued input (all imaginary parts
/// zero) is written one value per line.
pub fn write_signal_csv(samples: &[Complex64]) -> String {
    let real = samples.iter().all(|z| z.im == 0.0);
    let mut out = String::new();
    for z in samples {
        if real {
            let _ = writeln!(out, "{}", fmt_sig9(z.re));
        } else {
            let _ = writeln!(out, "{},{}", fmt_sig9(z.re), fmt_sig9(z.im));
        }
    }
    out
}

/// Real matrix, one row per line, comma separated; rows must agree in length.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(',')
            .map(|f| parse_f64(f, line))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    line,
                    format!("row has {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "empty matrix"));
    }
    Ok(rows)
}

/// Lambda grid: either `start:step:stop` (inclusive) or a comma list. The
/// result must be non-empty, positive and strictly increasing.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    const MAX_POINTS: usize = 100_000;
    let t = text.trim();
    let grid = if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(parse_err(1, "range must be start:step:stop"));
        }
        let (start, step, stop) = (
            parse_f64(parts[0], 1)?,
            parse_f64(parts[1], 1)?,
            parse_f64(parts[2], 1)?,
        );
        if !(step > 0.0) {
            return Err(parse_err(1, "step must be positive"));
        }
        if stop < start {
            return Err(parse_err(1, "stop is below start"));
        }
        let span = ((stop - start) / step + 1e-9).floor();
        if !(span < MAX_POINTS as f64) {
            return Err(parse_err(1, format!("more than {MAX_POINTS} grid points")));
        }
        (0..=span as usize)
            .map(|i| start + i as f64 * step)
            .collect()
    } else {
        t.split(',')
            .map(|f| parse_f64(f, 1))
            .collect::<Result<Vec<f64>>>()?
    };
    if grid.is_empty() {
        return Err(parse_err(1, "empty grid"));
    }
    if grid[0] <= 0.0 {
        return Err(parse_err(1, "lambda values must be positive"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(parse_err(1, "lambda values must be strictly increasing"));
    }
    Ok(grid)
}

/// Regularization method of a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    L1,
    L1Debiased,
    Gmc,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::L1, Method::L1Debiased, Method::Gmc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::L1 => "l1",
            Method::L1Debiased => "l1_debiased",
            Method::Gmc => "gmc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "l1" => Ok(Method::L1),
            "l1_debiased" | "l1-debiased" => Ok(Method::L1Debiased),
            "gmc" => Ok(Method::Gmc),
            other => Err(parse_err(0, format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub method: Method,
    pub lambda: f64,
    pub realization: usize,
    pub rmse: f64,
    pub nnz: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub method: Method,
    pub lambda: f64,
    pub rmse_mean: f64,
    pub rmse_std: f64,
}

pub fn write_records_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.method,
            fmt_sig9(r.lambda),
            r.realization,
            fmt_sig9(r.rmse),
            r.nnz
        );
    }
    out
}

fn check_header(text: &str, header: &str) -> Result<()> {
    match text.lines().next() {
        Some(h) if h.trim() == header => Ok(()),
        _ => Err(parse_err(1, format!("expected header {header:?}"))),
    }
}

fn fields<const K: usize>(l: &str, line: usize) -> Result<[&str; K]> {
    let parts: Vec<&str> = l.split(',').collect();
    parts
        .try_into()
        .map_err(|p: Vec<&str>| parse_err(line, format!("expected {K} fields, got {}", p.len())))
}

pub fn parse_records_csv(text: &str) -> Result<Vec<SweepRecord>> {
    check_header(text, RECORDS_HEADER)?;
    content_lines(text)
        .skip(1)
        .map(|(line, l)| {
            let [m, lam, real, rmse, nnz] = fields::<5>(l, line)?;
            Ok(SweepRecord {
                method: m
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad method {m:?}")))?,
                lambda: parse_f64(lam, line)?,
                realization: real
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad realization {real:?}")))?,
                rmse: parse_rmse(rmse, line)?,
                nnz: nnz
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad nnz {nnz:?}")))?,
            })
        })
        .collect()
}

/// RMSE fields may hold `NaN` for failed cells.
fn parse_rmse(field: &str, line: usize) -> Result<f64> {
    if field.trim() == "NaN" {
        Ok(f64::NAN)
    } else {
        parse_f64(field, line)
    }
}

pub fn write_aggregates_csv(aggs: &[Aggregate]) -> String {
    let mut out = String::from(AGGREGATES_HEADER);
    out.push('\n');
    for a in aggs {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            a.method,
            fmt_sig9(a.lambda),
            fmt_sig9(a.rmse_mean),
            fmt_sig9(a.rmse_std)
        );
    }
    out
}

pub fn parse_aggregates_csv(text: &str) -> Result<Vec<Aggregate>> {
    check_header(text, AGGREGATES_HEADER)?;
    content_lines(text)
        .skip(1)
        .map(|(line, l)| {
            let [m, lam, mean, std] = fields::<4>(l, line)?;
            Ok(Aggregate {
                method: m
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad method {m:?}")))?,
                lambda: parse_f64(lam, line)?,
                rmse_mean: parse_rmse(mean, line)?,
                rmse_std: parse_rmse(std, line)?,
            })
        })
        .collect()
}

/// Mean and sample standard deviation of RMSE per `(method, lambda)`, in
/// method order then first-appearance order of lambda.
pub fn aggregate(records: &[SweepRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(m, l)| m == r.method && l == r.lambda) {
            keys.push((r.method, r.lambda));
        }
    }
    keys.sort_by_key(|&(m, _)| m);
    keys.into_iter()
        .map(|(method, lambda)| {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method && r.lambda == lambda)
                .map(|r| r.rmse)
                .collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let std = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            Aggregate {
                method,
                lambda,
                rmse_mean: mean,
                rmse_std: std,
            }
        })
        .collect()
}
