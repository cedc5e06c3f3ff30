//! Full-conditional updates and Gibbs sweeps.
//!
//! Every sweep updates β first (one coordinate at a time for the direct
//! representation, as a block for data augmentation), then the latent `τ²`
//! (data augmentation only), then the scale parameters:
//!
//! | algorithm | form | scale updates |
//! |---|---|---|
//! | RS | common | `u1 ~ GIG`, `u2 ~ MHN`, `θ ~ tilted` |
//! | RS | differential | `σ²` (MHN in `1/σ` or inverse gamma), `u2 ~ MHN`, `θ ~ tilted` |
//! | MH | either | random-walk Metropolis on `log σ²`, `log λ1`, `log λ2` |
//!
//! Natural and transformed parameters are re-synchronized after each update.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{AcceptanceCount, ChainOutput};
use crate::distributions::{
    sample_gig, sample_inverse_gamma, sample_inverse_gaussian, sample_mhn, sample_truncated_normal, Side,
};
use crate::error::{require_positive, Error, Result};
use crate::model::{
    log_joint_given_rss, sample_tau2_prior, ModelState, PriorForm, PriorSpec, RegressionData, Representation,
    TAU2_COMMON_MAX,
};
use crate::rng::RngStream;
use crate::special::log_std_normal_cdf;
use crate::tilted::{sample_tilted, TiltedDensityParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Exact draws of every scale parameter.
    Rs,
    /// Random-walk Metropolis on the log scale for `σ²`, `λ1`, `λ2`.
    Mh,
}

/// Algorithm, prior form and representation of a sweep, written like
/// `rs-differential-da` or `mh-common-direct`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SweepKind {
    pub algorithm: Algorithm,
    pub form: PriorForm,
    pub representation: Representation,
}

impl SweepKind {
    pub fn new(algorithm: Algorithm, form: PriorForm, representation: Representation) -> Self {
        Self {
            algorithm,
            form,
            representation,
        }
    }

    pub fn all() -> Vec<SweepKind> {
        let mut v = Vec::with_capacity(8);
        for algorithm in [Algorithm::Rs, Algorithm::Mh] {
            for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
                for representation in [Representation::Direct, Representation::DataAugmentation] {
                    v.push(SweepKind::new(algorithm, form, representation));
                }
            }
        }
        v
    }

    /// Refuses a prior whose form or representation differs from the sweep,
    /// and the direct RS sweep when `L < 1` (non-log-concave `θ` conditional).
    pub fn check_prior(&self, prior: &PriorSpec) -> Result<()> {
        if prior.form != self.form || prior.representation != self.representation {
            return Err(Error::Config(format!(
                "sampler {self} does not match prior ({}, {})",
                prior.form, prior.representation
            )));
        }
        if self.algorithm == Algorithm::Rs && self.representation == Representation::Direct && prior.l < 1.0 {
            return Err(Error::DirectRequiresL { l: prior.l });
        }
        Ok(())
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alg = match self.algorithm {
            Algorithm::Rs => "rs",
            Algorithm::Mh => "mh",
        };
        write!(f, "{alg}-{}-{}", self.form, self.representation)
    }
}

impl FromStr for SweepKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('-').collect();
        let [alg, form, rep] = parts.as_slice() else {
            return Err(Error::Config(format!(
                "sampler '{s}' should look like rs-differential-da ({{rs,mh}}-{{common,differential}}-{{direct,da}})"
            )));
        };
        let algorithm = match *alg {
            "rs" => Algorithm::Rs,
            "mh" => Algorithm::Mh,
            other => return Err(Error::Config(format!("unknown algorithm '{other}' (rs|mh)"))),
        };
        Ok(SweepKind::new(algorithm, form.parse()?, rep.parse()?))
    }
}

/// Random-walk innovation standard deviations on the log scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MhStepSizes {
    pub s_sigma2: f64,
    pub s_lambda1: f64,
    pub s_lambda2: f64,
}

impl MhStepSizes {
    pub fn new(s_sigma2: f64, s_lambda1: f64, s_lambda2: f64) -> Result<Self> {
        require_positive("s_sigma2", s_sigma2)?;
        require_positive("s_lambda1", s_lambda1)?;
        require_positive("s_lambda2", s_lambda2)?;
        Ok(Self {
            s_sigma2,
            s_lambda1,
            s_lambda2,
        })
    }
}

impl Default for MhStepSizes {
    fn default() -> Self {
        Self {
            s_sigma2: 1.0,
            s_lambda1: 1.0,
            s_lambda2: 1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// β updates

/// Parameters of the one-dimensional orthant-normal conditional of `β_j`:
/// `N⁺(mu_pos, s2)` on `[0, ∞)` and `N⁻(mu_neg, s2)` on `(-∞, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateConditional {
    pub mu_pos: f64,
    pub mu_neg: f64,
    pub s2: f64,
}

/// Maps `(r_j, xⱼᵀxⱼ + λ2, t, σ²)` to the orthant-normal parameters, where
/// `r_j = xⱼᵀy - xⱼᵀX₋ⱼβ₋ⱼ` and `t` is the ℓ1 coefficient on the `1/σ²` scale.
pub type CoordinateParamsFn = fn(f64, f64, f64, f64) -> CoordinateConditional;

pub fn coordinate_conditional(r: f64, denom: f64, t: f64, sigma2: f64) -> CoordinateConditional {
    CoordinateConditional {
        mu_pos: (r - t) / denom,
        mu_neg: (r + t) / denom,
        s2: sigma2 / denom,
    }
}

/// `λ1/2` (common) or `σ λ1` (differential).
pub fn l1_shift(form: PriorForm, sigma2: f64, lambda1: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => 0.5 * lambda1,
        PriorForm::DifferentialScaled => sigma2.sqrt() * lambda1,
    }
}

/// Probability that `β_j` falls on the nonnegative side.
pub fn positive_side_probability(c: &CoordinateConditional) -> f64 {
    let s = c.s2.sqrt();
    let log_pos = log_std_normal_cdf(c.mu_pos / s) + 0.5 * c.mu_pos * c.mu_pos / c.s2;
    let log_neg = log_std_normal_cdf(-c.mu_neg / s) + 0.5 * c.mu_neg * c.mu_neg / c.s2;
    1.0 / (1.0 + (log_neg - log_pos).exp())
}

/// One scan over `j = 1..p` of exact draws from the `β_j` full conditionals.
pub fn update_beta_coordinate<R: Rng + ?Sized>(
    data: &RegressionData,
    state: &mut ModelState,
    rng: &mut R,
) -> Result<()> {
    update_beta_coordinate_with(data, state, coordinate_conditional, rng)
}

/// [`update_beta_coordinate`] with a replaceable parameter map (used to check
/// that the validation battery detects a wrong conditional).
pub fn update_beta_coordinate_with<R: Rng + ?Sized>(
    data: &RegressionData,
    state: &mut ModelState,
    params: CoordinateParamsFn,
    rng: &mut R,
) -> Result<()> {
    let t = l1_shift(state.form, state.sigma2, state.lambda1);
    for j in 0..data.p {
        let xtx_jj = data.col_sq_norms[j];
        let r = data.xty[j] - data.xtx.column(j).dot(&state.beta) + xtx_jj * state.beta[j];
        let c = params(r, xtx_jj + state.lambda2, t, state.sigma2);
        let positive = rng.random::<f64>() < positive_side_probability(&c);
        state.beta[j] = if positive {
            sample_truncated_normal(c.mu_pos, c.s2, Side::NonNegative, rng)?
        } else {
            sample_truncated_normal(c.mu_neg, c.s2, Side::Negative, rng)?
        };
    }
    Ok(())
}

/// Diagonal added to `XᵀX` in the block precision: `λ2/(1-τ²)` (common) or
/// `1/τ² + λ2` (differential).
pub fn block_prior_precision(form: PriorForm, tau2: f64, lambda2: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => lambda2 / (1.0 - tau2),
        PriorForm::DifferentialScaled => 1.0 / tau2 + lambda2,
    }
}

/// Draw `β ~ N(A⁻¹Xᵀy, σ² A⁻¹)` with `A = XᵀX + diag(prior precision)`.
pub fn update_beta_block<R: Rng + ?Sized>(data: &RegressionData, state: &mut ModelState, rng: &mut R) -> Result<()> {
    let tau2 = state
        .tau2
        .as_ref()
        .ok_or_else(|| Error::Config("block update needs latent variances".into()))?;
    let mut a = data.xtx.clone();
    for j in 0..data.p {
        a[(j, j)] += block_prior_precision(state.form, tau2[j], state.lambda2);
    }
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Factorization("β precision is not positive definite".into()))?;
    let mean = chol.solve(&data.xty);
    let z = DVector::from_fn(data.p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = chol
        .l()
        .tr_solve_lower_triangular(&z)
        .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
    state.beta = mean + noise * state.sigma2.sqrt();
    Ok(())
}

/// Exact draws of each `τ_j²` through an inverse Gaussian `ζ_j`.
pub fn update_tau2<R: Rng + ?Sized>(state: &mut ModelState, rng: &mut R) -> Result<()> {
    let sigma = state.sigma2.sqrt();
    let (l1, l2) = (state.lambda1, state.lambda2);
    let form = state.form;
    let beta = &state.beta;
    let tau2 = state
        .tau2
        .as_mut()
        .ok_or_else(|| Error::Config("τ² update needs latent variances".into()))?;
    for (t, b) in tau2.iter_mut().zip(beta.iter()) {
        let abs_b = b.abs().max(1e-12 * sigma);
        *t = match form {
            PriorForm::CommonScaled => {
                let zeta = sample_inverse_gaussian(l1 / (2.0 * l2 * abs_b), l1 * l1 / (4.0 * l2 * state.sigma2), rng)?;
                (zeta / (1.0 + zeta)).clamp(f64::MIN_POSITIVE, TAU2_COMMON_MAX)
            }
            PriorForm::DifferentialScaled => {
                let zeta = sample_inverse_gaussian(sigma * l1 / abs_b, l1 * l1, rng)?;
                (1.0 / zeta).clamp(f64::MIN_POSITIVE, f64::MAX)
            }
        };
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scale-parameter conditionals

/// `(λ, ψ, χ)` of a GIG law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GigParams {
    pub lambda: f64,
    pub psi: f64,
    pub chi: f64,
}

/// `(α, β, γ)` of an MHN law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MhnParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Full conditional of `σ²` under the differential form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sigma2Conditional {
    /// `1/σ ~ MHN`.
    InvSigmaMhn(MhnParams),
    /// `σ² ~ Inv-Gamma(shape, scale)`.
    InvGamma { shape: f64, scale: f64 },
}

fn sum_sq(v: &DVector<f64>) -> f64 {
    v.dot(v)
}

fn require_tau2(state: &ModelState) -> Result<&DVector<f64>> {
    state
        .tau2
        .as_ref()
        .ok_or_else(|| Error::Config("data-augmentation conditional needs latent variances".into()))
}

/// `u1 = σ²` given everything else, common form (same for both representations).
pub fn u1_conditional(n: usize, rss: f64, prior: &PriorSpec, state: &ModelState) -> GigParams {
    GigParams {
        lambda: prior.r + prior.l - 0.5 * (prior.nu_a + n as f64 - 1.0),
        psi: state.u2 * state.u2 * prior.nu2 + 2.0 * state.u2 * state.theta * prior.nu1,
        chi: rss + prior.nu_b,
    }
}

/// `u2` given everything else.
pub fn u2_conditional(prior: &PriorSpec, state: &ModelState) -> Result<MhnParams> {
    let p = state.beta.len() as f64;
    let bb = sum_sq(&state.beta);
    let l1 = state.beta.abs().sum();
    let alpha = 2.0 * prior.r + prior.l + p;
    Ok(match (state.form, prior.representation) {
        (PriorForm::CommonScaled, Representation::Direct) => MhnParams {
            alpha,
            beta: 0.5 * (state.u1 * prior.nu2 + bb),
            gamma: state.theta * (state.u1 * prior.nu1 + l1),
        },
        (PriorForm::CommonScaled, Representation::DataAugmentation) => {
            let tau2 = require_tau2(state)?;
            let weighted: f64 = state.beta.iter().zip(tau2.iter()).map(|(b, t)| b * b / (1.0 - t)).sum();
            MhnParams {
                alpha,
                beta: 0.5 * (state.u1 * prior.nu2 + weighted),
                gamma: state.u1 * state.theta * prior.nu1,
            }
        }
        (PriorForm::DifferentialScaled, Representation::Direct) => {
            let sigma = state.sigma2.sqrt();
            MhnParams {
                alpha,
                beta: 0.5 * (bb / state.sigma2 + prior.nu2),
                gamma: state.theta * (l1 / sigma + 0.5 * prior.nu1),
            }
        }
        (PriorForm::DifferentialScaled, Representation::DataAugmentation) => {
            let tau_sum = require_tau2(state)?.sum();
            MhnParams {
                alpha: alpha + p,
                beta: 0.5 * (bb / state.sigma2 + prior.nu2 + state.theta * state.theta * tau_sum),
                gamma: 0.5 * state.theta * prior.nu1,
            }
        }
    })
}

/// `θ` given everything else, as a member of the tilted family with `q = p`.
pub fn theta_conditional(prior: &PriorSpec, state: &ModelState) -> Result<TiltedDensityParams> {
    let p = state.beta.len();
    let pf = p as f64;
    let q = u32::try_from(p).map_err(|_| Error::Data("too many coefficients".into()))?;
    let l1 = state.beta.abs().sum();
    Ok(match (state.form, prior.representation) {
        (PriorForm::CommonScaled, Representation::Direct) => {
            TiltedDensityParams::new(q, prior.l, 0.5 * pf, state.u2 * (state.u1 * prior.nu1 + l1), 0.0)
        }
        (PriorForm::CommonScaled, Representation::DataAugmentation) => {
            let inv_sum: f64 = require_tau2(state)?.iter().map(|t| 1.0 / t).sum();
            TiltedDensityParams::new(q, pf + prior.l, 0.5 * inv_sum, state.u1 * state.u2 * prior.nu1, 0.0)
        }
        (PriorForm::DifferentialScaled, Representation::Direct) => TiltedDensityParams::new(
            q,
            prior.l,
            0.5 * pf,
            state.u2 * (l1 / state.sigma2.sqrt() + 0.5 * prior.nu1),
            0.0,
        ),
        (PriorForm::DifferentialScaled, Representation::DataAugmentation) => {
            let tau_sum = require_tau2(state)?.sum();
            TiltedDensityParams::new(
                q,
                pf + prior.l,
                0.5 * (pf + state.u2 * state.u2 * tau_sum),
                0.5 * state.u2 * prior.nu1,
                0.0,
            )
        }
    })
}

/// `σ²` given everything else, differential form.
pub fn sigma2_conditional(n: usize, rss: f64, prior: &PriorSpec, state: &ModelState) -> Result<Sigma2Conditional> {
    let p = state.beta.len() as f64;
    let bb = sum_sq(&state.beta);
    let lambda2 = state.u2 * state.u2;
    Ok(match prior.representation {
        Representation::Direct => Sigma2Conditional::InvSigmaMhn(MhnParams {
            alpha: prior.nu_a + p + n as f64 - 1.0,
            beta: 0.5 * (rss + lambda2 * bb + prior.nu_b),
            gamma: state.theta * state.u2 * state.beta.abs().sum(),
        }),
        Representation::DataAugmentation => {
            let tau2 = require_tau2(state)?;
            let weighted: f64 = state
                .beta
                .iter()
                .zip(tau2.iter())
                .map(|(b, t)| b * b * (1.0 / t + lambda2))
                .sum();
            Sigma2Conditional::InvGamma {
                shape: 0.5 * (p + prior.nu_a + n as f64 - 1.0),
                scale: 0.5 * (prior.nu_b + rss + weighted),
            }
        }
    })
}

pub fn update_u1<R: Rng + ?Sized>(
    n: usize,
    rss: f64,
    prior: &PriorSpec,
    state: &mut ModelState,
    rng: &mut R,
) -> Result<()> {
    let g = u1_conditional(n, rss, prior, state);
    let u1 = sample_gig(g.lambda, g.psi, g.chi, rng)?;
    state.set_transformed(u1, state.u2, state.theta)
}

pub fn update_u2<R: Rng + ?Sized>(prior: &PriorSpec, state: &mut ModelState, rng: &mut R) -> Result<()> {
    let m = u2_conditional(prior, state)?;
    let u2 = sample_mhn(m.alpha, m.beta, m.gamma, rng)?;
    state.set_transformed(state.u1, u2, state.theta)
}

pub fn update_theta<R: Rng + ?Sized>(prior: &PriorSpec, state: &mut ModelState, rng: &mut R) -> Result<()> {
    let t = theta_conditional(prior, state)?;
    let theta = sample_tilted(&t, rng)?;
    state.set_transformed(state.u1, state.u2, theta)
}

pub fn update_sigma2<R: Rng + ?Sized>(
    n: usize,
    rss: f64,
    prior: &PriorSpec,
    state: &mut ModelState,
    rng: &mut R,
) -> Result<()> {
    let sigma2 = match sigma2_conditional(n, rss, prior, state)? {
        Sigma2Conditional::InvSigmaMhn(m) => {
            let x = sample_mhn(m.alpha, m.beta, m.gamma, rng)?;
            1.0 / (x * x)
        }
        Sigma2Conditional::InvGamma { shape, scale } => sample_inverse_gamma(shape, scale, rng)?,
    };
    state.set_natural(sigma2, state.lambda1, state.lambda2)
}

/// One random-walk Metropolis step on `log x` for a target density in `x`.
///
/// The log-scale proposal contributes the Jacobian `x*/x` to the ratio.
pub fn mh_update_log_scale<F, R>(target_log_density: F, current: f64, step_sd: f64, rng: &mut R) -> (f64, bool)
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let z: f64 = rng.sample(StandardNormal);
    let proposal = current * (step_sd * z).exp();
    let log_ratio = target_log_density(proposal) - target_log_density(current) + proposal.ln() - current.ln();
    let u: f64 = rng.random();
    if u.ln() < log_ratio || log_ratio.is_nan() && proposal == current {
        (proposal, true)
    } else {
        (current, false)
    }
}

// ---------------------------------------------------------------------------
// Sweeps and chains

/// Attempts and acceptances of the three Metropolis kernels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MhCounts {
    pub sigma2: (u64, u64),
    pub lambda1: (u64, u64),
    pub lambda2: (u64, u64),
}

impl MhCounts {
    pub fn as_acceptance(&self) -> Vec<AcceptanceCount> {
        [
            ("sigma2", self.sigma2),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ]
        .into_iter()
        .map(|(name, (attempts, accepts))| AcceptanceCount {
            name: name.to_string(),
            attempts,
            accepts,
        })
        .collect()
    }
}

/// A validated sweep: kind, prior and MH step sizes.
#[derive(Clone, Debug)]
pub struct Sweeper {
    pub kind: SweepKind,
    pub prior: PriorSpec,
    pub steps: MhStepSizes,
    pub counts: MhCounts,
}

impl Sweeper {
    pub fn new(kind: SweepKind, prior: PriorSpec, steps: MhStepSizes) -> Result<Self> {
        kind.check_prior(&prior)?;
        Ok(Self {
            kind,
            prior,
            steps,
            counts: MhCounts::default(),
        })
    }

    /// One full scan.
    pub fn sweep<R: Rng + ?Sized>(&mut self, data: &RegressionData, state: &mut ModelState, rng: &mut R) -> Result<()> {
        let prior = self.prior;
        match prior.representation {
            Representation::Direct => update_beta_coordinate(data, state, rng)?,
            Representation::DataAugmentation => {
                update_beta_block(data, state, rng)?;
                update_tau2(state, rng)?;
            }
        }
        let rss = data.rss(&state.beta);
        match (self.kind.algorithm, prior.form) {
            (Algorithm::Rs, PriorForm::CommonScaled) => {
                update_u1(data.n, rss, &prior, state, rng)?;
                update_u2(&prior, state, rng)?;
                update_theta(&prior, state, rng)?;
            }
            (Algorithm::Rs, PriorForm::DifferentialScaled) => {
                update_sigma2(data.n, rss, &prior, state, rng)?;
                update_u2(&prior, state, rng)?;
                update_theta(&prior, state, rng)?;
            }
            (Algorithm::Mh, _) => self.mh_scales(data.n, rss, state, rng)?,
        }
        Ok(())
    }

    fn mh_scales<R: Rng + ?Sized>(&mut self, n: usize, rss: f64, state: &mut ModelState, rng: &mut R) -> Result<()> {
        let prior = self.prior;
        let beta = state.beta.clone();
        let tau2 = state.tau2.clone();
        let joint = |s2: f64, l1: f64, l2: f64| {
            log_joint_given_rss(
                &prior,
                n,
                rss,
                beta.as_slice(),
                tau2.as_ref().map(|t| t.as_slice()),
                s2,
                l1,
                l2,
            )
        };
        let (l1, l2) = (state.lambda1, state.lambda2);
        let (s2, acc) = mh_update_log_scale(|x| joint(x, l1, l2), state.sigma2, self.steps.s_sigma2, rng);
        tally(&mut self.counts.sigma2, acc);
        let (l1, acc) = mh_update_log_scale(|x| joint(s2, x, l2), l1, self.steps.s_lambda1, rng);
        tally(&mut self.counts.lambda1, acc);
        let (l2, acc) = mh_update_log_scale(|x| joint(s2, l1, x), l2, self.steps.s_lambda2, rng);
        tally(&mut self.counts.lambda2, acc);
        state.set_natural(s2, l1, l2)
    }
}

fn tally(c: &mut (u64, u64), accepted: bool) {
    c.0 += 1;
    c.1 += accepted as u64;
}

/// One sweep with default MH step sizes.
pub fn run_sweep<R: Rng + ?Sized>(
    kind: SweepKind,
    data: &RegressionData,
    prior: &PriorSpec,
    state: &mut ModelState,
    rng: &mut R,
) -> Result<()> {
    Sweeper::new(kind, *prior, MhStepSizes::default())?.sweep(data, state, rng)
}

/// Start values: `β = 0`, `σ²` the sample variance of `y`, `λ1 = λ2 = 1`, and
/// for data augmentation `τ²` drawn from its mixing law at those values.
pub fn initial_state<R: Rng + ?Sized>(data: &RegressionData, prior: &PriorSpec, rng: &mut R) -> Result<ModelState> {
    let mut sigma2 = data.yty / (data.n as f64 - 1.0);
    if !(sigma2 > 0.0) {
        sigma2 = 1.0;
    }
    let tau2 = match prior.representation {
        Representation::Direct => None,
        Representation::DataAugmentation => Some(DVector::from_fn(data.p, |_, _| {
            sample_tau2_prior(prior.form, sigma2, 1.0, 1.0, rng)
        })),
    };
    ModelState::new(prior.form, DVector::zeros(data.p), sigma2, 1.0, 1.0, tau2)
}

/// Everything needed to run one chain.
#[derive(Clone, Copy, Debug)]
pub struct ChainConfig {
    pub kind: SweepKind,
    pub prior: PriorSpec,
    pub steps: MhStepSizes,
    /// Total sweeps, burn-in included.
    pub iterations: usize,
    pub burnin: usize,
    pub thin: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl ChainConfig {
    pub fn kept(&self) -> usize {
        (self.iterations.saturating_sub(self.burnin)) / self.thin.max(1)
    }
}

/// Column names of a chain over `p` coefficients.
///
/// `lambda = λ1 + √λ2` and `alpha = λ1/(λ1 + √λ2)` follow the exchange-sampler
/// parameterization; `alpha_l2 = λ2/(λ1 + λ2)` is the ridge share of the penalty.
pub fn parameter_names(p: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=p).map(|j| format!("beta_{j}")).collect();
    for s in ["sigma2", "lambda1", "lambda2", "lambda", "alpha", "alpha_l2"] {
        names.push(s.to_string());
    }
    names
}

/// Run a chain from [`initial_state`], keeping every `thin`-th post-burn-in sweep.
pub fn run_chain(data: &RegressionData, cfg: &ChainConfig) -> Result<ChainOutput> {
    if cfg.burnin >= cfg.iterations {
        return Err(Error::Config(format!(
            "burn-in ({}) must be smaller than the number of iterations ({})",
            cfg.burnin, cfg.iterations
        )));
    }
    if cfg.thin == 0 {
        return Err(Error::Config("thin must be at least 1".into()));
    }
    let mut rng = RngStream::new(cfg.seed, cfg.stream_id);
    let mut sweeper = Sweeper::new(cfg.kind, cfg.prior, cfg.steps)?;
    let mut state = initial_state(data, &cfg.prior, &mut rng)?;
    let names = parameter_names(data.p);
    let kept = cfg.kept();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(kept); names.len()];
    for it in 0..cfg.iterations {
        sweeper.sweep(data, &mut state, &mut rng)?;
        if it < cfg.burnin || (it - cfg.burnin + 1) % cfg.thin != 0 {
            continue;
        }
        let (l1, l2) = (state.lambda1, state.lambda2);
        let sl2 = l2.sqrt();
        let row = state
            .beta
            .iter()
            .copied()
            .chain([state.sigma2, l1, l2, l1 + sl2, l1 / (l1 + sl2), l2 / (l1 + l2)]);
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    let acceptance = match cfg.kind.algorithm {
        Algorithm::Mh => sweeper.counts.as_acceptance(),
        Algorithm::Rs => Vec::new(),
    };
    let out = ChainOutput {
        parameter_names: names,
        columns,
        acceptance,
        seed: cfg.seed,
        stream_id: cfg.stream_id,
        sweep_kind: cfg.kind.to_string(),
        prior_tag: String::new(),
    };
    out.validate()?;
    Ok(out)
}
