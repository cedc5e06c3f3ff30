//! Effective sample size and chain summaries.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::format_float;

/// Stored draws of one chain, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub parameter_names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    /// `(kernel name, attempts, accepts)` for every Metropolis kernel.
    pub acceptance: Vec<AcceptanceCount>,
    pub seed: u64,
    pub stream_id: u64,
    pub sweep_kind: String,
    pub prior_tag: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AcceptanceCount {
    pub name: String,
    pub attempts: u64,
    pub accepts: u64,
}

impl AcceptanceCount {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            f64::NAN
        } else {
            self.accepts as f64 / self.attempts as f64
        }
    }
}

impl ChainOutput {
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.parameter_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn acceptance_rate(&self, name: &str) -> Option<f64> {
        self.acceptance
            .iter()
            .find(|a| a.name == name)
            .map(AcceptanceCount::rate)
    }

    /// Fails on ragged columns or non-finite draws.
    pub fn validate(&self) -> Result<()> {
        if self.columns.len() != self.parameter_names.len() {
            return Err(Error::Data("column count does not match parameter names".into()));
        }
        let n = self.len();
        for (name, col) in self.parameter_names.iter().zip(&self.columns) {
            if col.len() != n {
                return Err(Error::Data(format!(
                    "column {name} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(format!("column {name} has non-finite draws")));
            }
        }
        Ok(())
    }

    /// One row per kept draw, one column per parameter.
    pub fn write_draws_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.parameter_names)?;
        for i in 0..self.len() {
            w.write_record(self.columns.iter().map(|c| format_float(c[i])))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Effective sample size by non-overlapping batch means with batch size `⌊√N⌋`.
///
/// `ESS = N s² / σ²_bm`, clipped to `[1, N]`. A constant series has no
/// autocorrelation to speak of and returns `N`.
pub fn ess_batch_means(series: &[f64]) -> f64 {
    ess_batch_means_flagged(series).0
}

/// Like [`ess_batch_means`], also reporting whether the series was constant.
pub fn ess_batch_means_flagged(series: &[f64]) -> (f64, bool) {
    let n = series.len();
    if n < 2 {
        return (n as f64, true);
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let s2 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    if s2 == 0.0 || !s2.is_finite() {
        return (nf, true);
    }
    let b = (nf.sqrt().floor() as usize).max(1);
    let a = n / b;
    if a < 2 {
        return (nf, false);
    }
    let batch_means: Vec<f64> = series[..a * b]
        .chunks_exact(b)
        .map(|c| c.iter().sum::<f64>() / b as f64)
        .collect();
    let grand = batch_means.iter().sum::<f64>() / a as f64;
    let sigma2_bm = b as f64 / (a as f64 - 1.0) * batch_means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>();
    if sigma2_bm <= 0.0 {
        return (nf, false);
    }
    ((nf * s2 / sigma2_bm).clamp(1.0, nf), false)
}

/// `(ess_method - ess_baseline) / ess_baseline × 100`.
pub fn percent_improvement(ess_method: f64, ess_baseline: f64) -> Result<f64> {
    if !(ess_baseline > 0.0) {
        return Err(Error::param("ess_baseline", ess_baseline, "must be > 0"));
    }
    if !(ess_method > 0.0) {
        return Err(Error::param("ess_method", ess_method, "must be > 0"));
    }
    Ok((ess_method - ess_baseline) / ess_baseline * 100.0)
}

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = prob * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-parameter summary row.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    /// At 2.5, 25, 50, 75 and 97.5 percent.
    pub quantiles: [f64; 5],
    pub ess: f64,
    /// `None` for parameters drawn exactly from their full conditionals.
    pub acceptance_rate: Option<f64>,
}

pub const SUMMARY_PROBS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];

pub fn summarize(chain: &ChainOutput) -> Result<Vec<ParameterSummary>> {
    if chain.is_empty() {
        return Err(Error::Data("cannot summarize an empty chain".into()));
    }
    Ok(chain
        .parameter_names
        .iter()
        .zip(&chain.columns)
        .map(|(name, col)| {
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = if col.len() > 1 {
                col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let mut sorted = col.clone();
            sorted.sort_by(f64::total_cmp);
            ParameterSummary {
                name: name.clone(),
                mean,
                sd: var.sqrt(),
                quantiles: SUMMARY_PROBS.map(|p| quantile(&sorted, p)),
                ess: ess_batch_means(col),
                acceptance_rate: chain.acceptance_rate(name),
            }
        })
        .collect())
}

pub fn write_summary_csv(path: &Path, rows: &[ParameterSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "parameter",
        "mean",
        "sd",
        "q2.5",
        "q25",
        "q50",
        "q75",
        "q97.5",
        "ess",
        "acceptance_rate",
    ])?;
    for r in rows {
        let mut rec = vec![r.name.clone(), format_float(r.mean), format_float(r.sd)];
        rec.extend(r.quantiles.iter().map(|q| format_float(*q)));
        rec.push(format_float(r.ess));
        rec.push(r.acceptance_rate.map(format_float).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
