#![allow(dead_code)]

use benet::diagnostics::ess_batch_means;
use benet::model::RegressionData;
use benet::oracle::{ks_critical, ks_test, oracle_cdf, KsResult};
use benet::sim::{replicate_dataset, SimDesign};
use benet::Result;

/// KS statistic of `draws` against the quadrature-normalized `exp(log_f)`.
pub fn ks_against<F: Fn(f64) -> f64>(draws: &[f64], log_f: F, lo: f64, hi: f64, hint: f64) -> KsResult {
    let table = oracle_cdf(log_f, lo, hi, hint).expect("quadrature oracle");
    ks_test(draws, &table)
}

/// Asymptotic KS critical value that keeps a family of `m` tests at the 1% level.
pub fn family_critical(n: usize, m: usize) -> f64 {
    if m <= 1 {
        return ks_critical(n);
    }
    let alpha = 0.01 / m as f64;
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

pub fn collect<F: FnMut() -> Result<f64>>(n: usize, mut f: F) -> Vec<f64> {
    (0..n).map(|_| f().expect("sampler")).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mean and its Monte Carlo standard error from the batch-means ESS.
pub fn mean_and_mcse(xs: &[f64]) -> (f64, f64) {
    let ess = ess_batch_means(xs).max(1.0);
    (mean(xs), (variance(xs) / ess).sqrt())
}

pub fn simulation_one(seed: u64) -> RegressionData {
    replicate_dataset(&SimDesign::new(1).expect("design 1"), seed, 0).expect("dataset")
}

pub fn normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}
