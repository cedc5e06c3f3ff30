//! Simulation designs and the replicate × sampler experiment grid.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::diagnostics::{ess_batch_means, percent_improvement, ChainOutput};
use crate::error::{Error, Result};
use crate::kernels::{run_chain, Algorithm, ChainConfig, MhStepSizes, SweepKind};
use crate::model::{center_data, format_float, PriorSpec, RegressionData};
use crate::rng::RngStream;

/// One of the four regression designs.
#[derive(Clone, Debug, PartialEq)]
pub struct SimDesign {
    pub id: u8,
    pub n: usize,
    pub p: usize,
    pub beta_true: DVector<f64>,
    pub sigma_true: f64,
    pub covariance: DMatrix<f64>,
}

impl SimDesign {
    pub fn new(id: u8) -> Result<Self> {
        let (n, p, beta, sigma, cov) = match id {
            1 | 2 => {
                let beta = if id == 1 {
                    DVector::from_vec(vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0])
                } else {
                    DVector::from_element(8, 0.85)
                };
                let cov = DMatrix::from_fn(8, 8, |i, j| 0.5f64.powi((i as i32 - j as i32).abs()));
                (20, 8, beta, 3.0, cov)
            }
            3 => {
                let beta = DVector::from_fn(40, |j, _| if j < 10 || (20..30).contains(&j) { 2.0 } else { 0.0 });
                let cov = DMatrix::from_fn(40, 40, |i, j| if i == j { 1.0 } else { 0.5 });
                (100, 40, beta, 15.0, cov)
            }
            4 => {
                let beta = DVector::from_fn(40, |j, _| if j < 15 { 3.0 } else { 0.0 });
                let cov = DMatrix::from_fn(40, 40, |i, j| {
                    if i < 15 && j < 15 && i / 5 == j / 5 {
                        if i == j {
                            1.01
                        } else {
                            1.0
                        }
                    } else if i == j {
                        1.0
                    } else {
                        0.0
                    }
                });
                (100, 40, beta, 1.0, cov)
            }
            other => {
                return Err(Error::Config(format!(
                    "simulation design must be 1, 2, 3 or 4 (got {other})"
                )));
            }
        };
        Ok(Self {
            id,
            n,
            p,
            beta_true: beta,
            sigma_true: sigma,
            covariance: cov,
        })
    }
}

/// A matrix `F` with `F Fᵀ = V`: Cholesky when it succeeds, otherwise the
/// symmetric eigendecomposition with negative eigenvalues clipped at 0.
pub fn covariance_factor(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(c) = v.clone().cholesky() {
        return Ok(c.l());
    }
    let eig = v.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::Factorization("covariance eigendecomposition failed".into()));
    }
    let scale = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|e| e.max(0.0).sqrt()));
    Ok(eig.eigenvectors * DMatrix::from_diagonal(&scale))
}

/// Rows of `X` are iid `N(0, V)` and `y = Xβ + ε` with `ε ~ N(0, σ² I)`.
/// Nothing is centered here and no intercept column is added.
pub fn generate_dataset<R: Rng + ?Sized>(design: &SimDesign, rng: &mut R) -> Result<(Vec<f64>, DMatrix<f64>)> {
    generate_dataset_n(design, design.n, rng)
}

/// [`generate_dataset`] with a custom row count.
pub fn generate_dataset_n<R: Rng + ?Sized>(
    design: &SimDesign,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let f = covariance_factor(&design.covariance)?;
    let z = DMatrix::from_fn(n, design.p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = z * f.transpose();
    let mean = &x * &design.beta_true;
    let y = mean
        .iter()
        .map(|m| m + design.sigma_true * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((y, x))
}

/// Named hyperprior strengths used by the experiments (`νa = νb = 1` in both).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PriorPreset {
    Weak,
    Strong,
}

impl PriorPreset {
    pub fn spec(self, kind: SweepKind) -> PriorSpec {
        match self {
            PriorPreset::Weak => PriorSpec::weak(kind.form, kind.representation),
            PriorPreset::Strong => PriorSpec::strong(kind.form, kind.representation),
        }
    }
}

impl fmt::Display for PriorPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorPreset::Weak => "weak",
            PriorPreset::Strong => "strong",
        })
    }
}

impl FromStr for PriorPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(PriorPreset::Weak),
            "strong" => Ok(PriorPreset::Strong),
            other => Err(Error::Config(format!("unknown prior preset '{other}' (weak|strong)"))),
        }
    }
}

/// Which chain each sampler's ESS is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// The MH sampler with the same prior form and representation.
    MatchingMh,
    Fixed(SweepKind),
}

impl Baseline {
    fn for_kind(self, kind: SweepKind) -> SweepKind {
        match self {
            Baseline::MatchingMh => SweepKind {
                algorithm: Algorithm::Mh,
                ..kind
            },
            Baseline::Fixed(k) => k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub designs: Vec<u8>,
    pub samplers: Vec<SweepKind>,
    pub priors: Vec<PriorPreset>,
    pub replicates: usize,
    pub iterations: usize,
    pub burnin: usize,
    pub seed: u64,
    pub steps: MhStepSizes,
    pub baseline: Baseline,
    /// Write `wall_ms`; off makes the results file reproducible byte for byte.
    pub record_timing: bool,
    /// When set, every chain's draws go to `<dir>/draws_d{design}_{prior}_r{rep}_{sampler}.csv`.
    pub draws_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            designs: vec![1],
            samplers: vec![
                "rs-differential-da".parse().expect("valid"),
                "mh-differential-da".parse().expect("valid"),
            ],
            priors: vec![PriorPreset::Weak],
            replicates: 50,
            iterations: 10_100,
            burnin: 100,
            seed: 1,
            steps: MhStepSizes::default(),
            baseline: Baseline::MatchingMh,
            record_timing: true,
            draws_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub design: u8,
    pub sampler: SweepKind,
    pub prior: PriorPreset,
    pub replicate: usize,
    pub parameter: String,
    pub ess: f64,
    pub pct_improvement: Option<f64>,
    pub acceptance_rate: Option<f64>,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub design: u8,
    pub prior: PriorPreset,
    pub replicate: usize,
    pub sampler: Option<SweepKind>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentResults {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

pub const RESULTS_HEADER: [&str; 9] = [
    "design",
    "sampler",
    "prior",
    "replicate",
    "parameter",
    "ess",
    "pct_improvement",
    "acceptance_rate",
    "wall_ms",
];

impl ExperimentResults {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(RESULTS_HEADER)?;
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.design.to_string(),
                r.sampler.to_string(),
                r.prior.to_string(),
                r.replicate.to_string(),
                r.parameter.clone(),
                format_float(r.ess),
                opt(r.pct_improvement),
                opt(r.acceptance_rate),
                opt(r.wall_ms),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Median percent improvement for one (design, sampler, prior, parameter).
    pub fn median_improvement(
        &self,
        design: u8,
        sampler: SweepKind,
        prior: PriorPreset,
        parameter: &str,
    ) -> Option<f64> {
        let mut v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.design == design && r.sampler == sampler && r.prior == prior && r.parameter == parameter)
            .filter_map(|r| r.pct_improvement)
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        })
    }
}

/// Stream id of the dataset for `(design, replicate)`; shared across priors
/// and samplers so that every sampler sees the same data.
pub fn data_stream_id(design: u8, replicate: usize) -> u64 {
    (u64::from(design) << 40) | replicate as u64
}

/// Stream id of one chain.
pub fn chain_stream_id(design: u8, prior_index: usize, sampler_index: usize, replicate: usize) -> u64 {
    (1 << 63)
        | (u64::from(design) << 48)
        | ((prior_index as u64) << 40)
        | ((sampler_index as u64) << 32)
        | replicate as u64
}

/// Generate and center the dataset of one replicate.
pub fn replicate_dataset(design: &SimDesign, seed: u64, replicate: usize) -> Result<RegressionData> {
    let mut rng = RngStream::new(seed, data_stream_id(design.id, replicate));
    let (y, x) = generate_dataset(design, &mut rng)?;
    center_data(&y, &x)
}

struct CellOutput {
    rows: Vec<ResultRow>,
    failures: Vec<CellFailure>,
}

/// Run every (design, prior, replicate) cell in parallel. A failing chain is
/// recorded in `failures` and its rows are omitted; the grid always finishes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    if cfg.samplers.is_empty() || cfg.priors.is_empty() || cfg.designs.is_empty() {
        return Err(Error::Config("experiment grid is empty".into()));
    }
    if cfg.burnin >= cfg.iterations {
        return Err(Error::Config("burn-in must be smaller than iterations".into()));
    }
    let designs: Vec<SimDesign> = cfg.designs.iter().map(|&d| SimDesign::new(d)).collect::<Result<_>>()?;
    if let Some(dir) = &cfg.draws_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut cells = Vec::new();
    for design in &designs {
        for (pi, &prior) in cfg.priors.iter().enumerate() {
            for rep in 0..cfg.replicates {
                cells.push((design, pi, prior, rep));
            }
        }
    }
    let outputs: Vec<CellOutput> = cells
        .par_iter()
        .map(|&(design, pi, prior, rep)| run_cell(cfg, design, pi, prior, rep))
        .collect();
    let mut res = ExperimentResults::default();
    for o in outputs {
        res.rows.extend(o.rows);
        res.failures.extend(o.failures);
    }
    Ok(res)
}

fn run_cell(cfg: &ExperimentConfig, design: &SimDesign, pi: usize, prior: PriorPreset, rep: usize) -> CellOutput {
    let fail = |sampler: Option<SweepKind>, e: Error| CellFailure {
        design: design.id,
        prior,
        replicate: rep,
        sampler,
        message: e.to_string(),
    };
    let data = match replicate_dataset(design, cfg.seed, rep) {
        Ok(d) => d,
        Err(e) => {
            return CellOutput {
                rows: vec![],
                failures: vec![fail(None, e)],
            }
        }
    };
    let mut failures = Vec::new();
    let mut chains: Vec<(SweepKind, ChainOutput, f64)> = Vec::new();
    for (si, &kind) in cfg.samplers.iter().enumerate() {
        let chain_cfg = ChainConfig {
            kind,
            prior: prior.spec(kind),
            steps: cfg.steps,
            iterations: cfg.iterations,
            burnin: cfg.burnin,
            thin: 1,
            seed: cfg.seed,
            stream_id: chain_stream_id(design.id, pi, si, rep),
        };
        let start = Instant::now();
        let chain = run_chain(&data, &chain_cfg).and_then(|mut c| {
            c.prior_tag = prior.to_string();
            if let Some(dir) = &cfg.draws_dir {
                let path = dir.join(format!("draws_d{}_{prior}_r{rep}_{kind}.csv", design.id));
                c.write_draws_csv(&path)?;
            }
            Ok(c)
        });
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match chain {
            Ok(c) => chains.push((kind, c, ms)),
            Err(e) => failures.push(fail(Some(kind), e)),
        }
    }
    let ess: Vec<Vec<f64>> = chains
        .iter()
        .map(|(_, c, _)| c.columns.iter().map(|col| ess_batch_means(col)).collect())
        .collect();
    let mut rows = Vec::new();
    for (i, (kind, chain, ms)) in chains.iter().enumerate() {
        let base_kind = cfg.baseline.for_kind(*kind);
        let base = chains.iter().position(|(k, _, _)| *k == base_kind);
        for (j, name) in chain.parameter_names.iter().enumerate() {
            let pct = match base {
                Some(b) if b != i => percent_improvement(ess[i][j], ess[b][j]).ok(),
                _ => None,
            };
            rows.push(ResultRow {
                design: design.id,
                sampler: *kind,
                prior,
                replicate: rep,
                parameter: name.clone(),
                ess: ess[i][j],
                pct_improvement: pct,
                acceptance_rate: chain.acceptance_rate(name),
                wall_ms: cfg.record_timing.then_some(*ms),
            });
        }
    }
    CellOutput { rows, failures }
}
