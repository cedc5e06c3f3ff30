//! Named pass/fail checks of every sampler against the quadrature oracles.
//!
//! Each `check_*` function draws `n` independent variates from one sampler or
//! kernel and runs a KS test against a CDF table built from a log density
//! written out here, not taken from the sampler.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{grid2d, ks_test, oracle_cdf, ridge_moments, KsResult};
use crate::distributions::{
    sample_gig, sample_inverse_gamma, sample_inverse_gaussian, sample_mhn, sample_std_normal_tail,
    sample_truncated_normal, Side,
};
use crate::error::{Error, Result};
use crate::kernels::{
    coordinate_conditional, update_beta_block, update_beta_coordinate_with, update_sigma2, update_tau2, update_theta,
    update_u1, update_u2, Algorithm, CoordinateParamsFn, SweepKind,
};
use crate::logconcave::LogDensity;
use crate::model::{
    center_data, da_conditional_variance, elastic_net_objective, from_transformed, l1_coefficient, log_joint_given_rss,
    log_mixing_density, log_posterior_unnorm, log_prior_beta, sample_beta_hierarchical, to_transformed, ModelState,
    PriorForm, PriorSpec, RegressionData, Representation,
};
use crate::rng::RngStream;
use crate::special::{log_std_normal_cdf, mills_ratio, LN_SQRT_2PI};
use crate::tilted::{bisect_mode, prop1_logconcavity_check, prop2_mode_bounds, TiltedDensityParams};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_ks(name: impl Into<String>, ks: KsResult) -> Self {
        Self {
            name: name.into(),
            passed: ks.pass,
            detail: format!("D = {:.5} (critical {:.5}, N = {})", ks.d, ks.critical, ks.n),
        }
    }

    fn error(name: impl Into<String>, e: &Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn collect<F: FnMut() -> Result<f64>>(n: usize, mut f: F) -> Result<Vec<f64>> {
    (0..n).map(|_| f()).collect()
}

fn ks_check<F: Fn(f64) -> f64>(
    name: String,
    draws: &[f64],
    log_f: F,
    lo: f64,
    hi: f64,
    hint: f64,
) -> Result<CheckOutcome> {
    let table = oracle_cdf(log_f, lo, hi, hint)?;
    Ok(CheckOutcome::from_ks(name, ks_test(draws, &table)))
}

pub fn check_truncated_normal<R: Rng + ?Sized>(
    m: f64,
    s2: f64,
    side: Side,
    n: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let draws = collect(n, || sample_truncated_normal(m, s2, side, rng))?;
    let log_f = |x: f64| -(x - m) * (x - m) / (2.0 * s2);
    let s = s2.sqrt();
    let name = format!("truncated normal m={m} s2={s2} {side:?}");
    match side {
        Side::NonNegative => ks_check(
            name,
            &draws,
            log_f,
            0.0,
            f64::INFINITY,
            if m > 0.0 { m } else { 0.1 * s },
        ),
        Side::Negative => ks_check(
            name,
            &draws,
            log_f,
            f64::NEG_INFINITY,
            0.0,
            if m < 0.0 { m } else { -0.1 * s },
        ),
    }
}

pub fn check_std_normal_tail<R: Rng + ?Sized>(a: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws: Vec<f64> = (0..n).map(|_| sample_std_normal_tail(a, rng)).collect();
    ks_check(
        format!("normal tail above {a}"),
        &draws,
        |x| -0.5 * x * x,
        a,
        f64::INFINITY,
        a + 1.0 / a.max(1.0),
    )
}

pub fn check_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws = collect(n, || sample_inverse_gamma(shape, scale, rng))?;
    let log_f = |x: f64| -(shape + 1.0) * x.ln() - scale / x;
    ks_check(
        format!("inverse gamma ({shape}, {scale})"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        scale / (shape + 1.0),
    )
}

pub fn check_inverse_gaussian<R: Rng + ?Sized>(mu: f64, lambda: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws = collect(n, || sample_inverse_gaussian(mu, lambda, rng))?;
    let log_f = |x: f64| -1.5 * x.ln() - lambda * (x - mu) * (x - mu) / (2.0 * mu * mu * x);
    ks_check(
        format!("inverse gaussian ({mu}, {lambda})"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        mu,
    )
}

pub fn check_gig<R: Rng + ?Sized>(lambda: f64, psi: f64, chi: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws = collect(n, || sample_gig(lambda, psi, chi, rng))?;
    let log_f = |x: f64| (lambda - 1.0) * x.ln() - 0.5 * (psi * x + chi / x);
    let hint = if psi > 0.0 && chi > 0.0 {
        (chi / psi).sqrt()
    } else {
        1.0
    };
    ks_check(
        format!("GIG ({lambda}, {psi}, {chi})"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        hint,
    )
}

pub fn check_mhn<R: Rng + ?Sized>(alpha: f64, beta: f64, gamma: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws = collect(n, || sample_mhn(alpha, beta, gamma, rng))?;
    let log_f = |x: f64| (alpha - 1.0) * x.ln() - beta * x * x - gamma * x;
    let hint = (alpha / (2.0 * beta)).sqrt();
    ks_check(
        format!("MHN ({alpha}, {beta}, {gamma})"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        hint,
    )
}

pub fn check_tilted<R: Rng + ?Sized>(params: &TiltedDensityParams, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let draws = collect(n, || crate::tilted::sample_tilted(params, rng))?;
    let TiltedDensityParams { q, a, b, c, d } = *params;
    let log_f = |x: f64| -(q as f64) * log_std_normal_cdf(-x) + (a - 1.0) * x.ln() - b * x * x - c * x - d / x;
    let hint = ((a + q as f64) / (2.0 * b + c + 1.0)).max(1e-3);
    ks_check(
        format!("tilted q={q} a={a} b={b} c={c}"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        hint,
    )
}

/// Hierarchical draws of a single coefficient against the direct prior density.
pub fn check_prior_equivalence<R: Rng + ?Sized>(
    form: PriorForm,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
    n: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let draws: Vec<f64> = (0..n)
        .map(|_| sample_beta_hierarchical(form, sigma2, lambda1, lambda2, rng).0)
        .collect();
    let log_f = |b: f64| log_prior_beta(form, &[b], sigma2, lambda1, lambda2);
    let name = format!("prior equivalence {form} (sigma2={sigma2}, lambda1={lambda1}, lambda2={lambda2})");
    ks_check(
        name,
        &draws,
        log_f,
        f64::NEG_INFINITY,
        f64::INFINITY,
        (sigma2 / lambda2).sqrt(),
    )
}

/// Centered Gaussian-design dataset used by the kernel checks.
pub fn toy_dataset(n: usize, p: usize, seed: u64) -> RegressionData {
    let mut rng = RngStream::new(seed, 0);
    let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = (0..p).map(|j| x[(i, j)] * if j % 2 == 0 { 1.0 } else { -0.5 }).sum();
            signal + rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    center_data(&y, &x).expect("toy data are well formed")
}

const KERNEL_SEED: u64 = 20;

/// Single-coordinate update of `β1` at fixed `β2` against the 1-D conditional.
///
/// The draws are independent: each one restarts from the same state.
pub fn check_beta_coordinate<R: Rng + ?Sized>(
    form: PriorForm,
    params: CoordinateParamsFn,
    n: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let data = toy_dataset(12, 2, KERNEL_SEED);
    let (sigma2, lambda1, lambda2) = (1.5, 4.0, 0.7);
    // β2 is placed so that xᵀ₁(y - x₂β2) = 0.5, which leaves both half-lines
    // of the β1 conditional with substantial mass
    let b2 = (data.xty[0] - 0.5) / data.xtx[(0, 1)];
    let start = ModelState::new(form, DVector::from_vec(vec![0.0, b2]), sigma2, lambda1, lambda2, None)?;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = start.clone();
        update_beta_coordinate_with(&data, &mut s, params, rng)?;
        draws.push(s.beta[0]);
    }
    let c = l1_coefficient(form, sigma2, lambda1);
    let log_f = |b: f64| {
        let beta = DVector::from_vec(vec![b, b2]);
        -(data.rss(&beta) + lambda2 * b * b) / (2.0 * sigma2) - c * b.abs()
    };
    ks_check(
        format!("beta coordinate kernel {form}"),
        &draws,
        log_f,
        f64::NEG_INFINITY,
        f64::INFINITY,
        0.1,
    )
}

fn fixed_tau2(form: PriorForm) -> Vec<f64> {
    match form {
        PriorForm::CommonScaled => vec![0.35, 0.6],
        PriorForm::DifferentialScaled => vec![0.5, 1.4],
    }
}

/// Block update at fixed `τ²` against a 2-D grid of `β | τ²`; checks the
/// marginal of coefficient `j`.
pub fn check_beta_block<R: Rng + ?Sized>(form: PriorForm, j: usize, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let data = toy_dataset(12, 2, KERNEL_SEED);
    let (sigma2, lambda1, lambda2) = (1.5, 2.0, 0.7);
    let tau2 = fixed_tau2(form);
    let start = ModelState::new(
        form,
        DVector::zeros(2),
        sigma2,
        lambda1,
        lambda2,
        Some(DVector::from_vec(tau2.clone())),
    )?;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = start.clone();
        update_beta_block(&data, &mut s, rng)?;
        draws.push(s.beta[j]);
    }
    let v: Vec<f64> = tau2
        .iter()
        .map(|&t| da_conditional_variance(form, t, sigma2, lambda2))
        .collect();
    let log_f = |b1: f64, b2: f64| {
        let beta = DVector::from_vec(vec![b1, b2]);
        -data.rss(&beta) / (2.0 * sigma2) - b1 * b1 / (2.0 * v[0]) - b2 * b2 / (2.0 * v[1])
    };
    let extra: Vec<f64> = v.iter().map(|vj| sigma2 / vj).collect();
    let (mean, sds) = ridge_moments(&data, sigma2, 0.0, &extra)?;
    let range = |k: usize| (mean[k] - 10.0 * sds[k], mean[k] + 10.0 * sds[k]);
    let table = grid2d(log_f, range(0), range(1), 200)?.marginal(j)?;
    Ok(CheckOutcome::from_ks(
        format!("beta block kernel {form} (coefficient {})", j + 1),
        ks_test(&draws, &table),
    ))
}

/// Latent-variance update against `N(β; 0, v(τ²)) π(τ²)`.
pub fn check_tau2<R: Rng + ?Sized>(form: PriorForm, beta: f64, n: usize, rng: &mut R) -> Result<CheckOutcome> {
    let (sigma2, lambda1, lambda2) = (1.3, 1.7, 0.9);
    let t0 = fixed_tau2(form)[0];
    let start = ModelState::new(
        form,
        DVector::from_vec(vec![beta]),
        sigma2,
        lambda1,
        lambda2,
        Some(DVector::from_vec(vec![t0])),
    )?;
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = start.clone();
        update_tau2(&mut s, rng)?;
        draws.push(s.tau2.as_ref().expect("set")[0]);
    }
    let log_f = |t: f64| {
        let v = da_conditional_variance(form, t, sigma2, lambda2);
        let mix = log_mixing_density(form, t, sigma2, lambda1, lambda2).unwrap_or(f64::NEG_INFINITY);
        -LN_SQRT_2PI - 0.5 * v.ln() - beta * beta / (2.0 * v) + mix
    };
    let hi = match form {
        PriorForm::CommonScaled => 1.0,
        PriorForm::DifferentialScaled => f64::INFINITY,
    };
    ks_check(format!("tau2 kernel {form} (beta={beta})"), &draws, log_f, 0.0, hi, t0)
}

/// Scale parameter updated by a rejection-sampling sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleTarget {
    U1,
    Sigma2,
    U2,
    Theta,
}

/// The scale updates a rejection-sampling sweep of `form` performs.
pub fn scale_targets(form: PriorForm) -> [ScaleTarget; 3] {
    match form {
        PriorForm::CommonScaled => [ScaleTarget::U1, ScaleTarget::U2, ScaleTarget::Theta],
        PriorForm::DifferentialScaled => [ScaleTarget::Sigma2, ScaleTarget::U2, ScaleTarget::Theta],
    }
}

/// `log |∂(σ², λ1, λ2)/∂(u1, u2, θ)|`.
fn log_jacobian(form: PriorForm, u1: f64, u2: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => 4f64.ln() + 2.0 * u1.ln() + 2.0 * u2.ln(),
        PriorForm::DifferentialScaled => 2f64.ln() + 2.0 * u2.ln(),
    }
}

/// One scale-parameter kernel of an RS sweep against the joint density,
/// restricted to that parameter, with the change-of-variables Jacobian.
pub fn check_scale_kernel<R: Rng + ?Sized>(
    kind: SweepKind,
    prior: &PriorSpec,
    target: ScaleTarget,
    n: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    if kind.algorithm != Algorithm::Rs {
        return Err(Error::Config("scale-kernel checks apply to rs sweeps".into()));
    }
    kind.check_prior(prior)?;
    let form = kind.form;
    let data = toy_dataset(20, 2, KERNEL_SEED + 1);
    let beta = DVector::from_vec(vec![0.8, -0.4]);
    let tau2 = match kind.representation {
        Representation::Direct => None,
        Representation::DataAugmentation => Some(DVector::from_vec(fixed_tau2(form))),
    };
    let start = ModelState::new(form, beta.clone(), 1.3, 1.7, 0.9, tau2.clone())?;
    let rss = data.rss(&beta);
    let tau_slice = tau2.as_ref().map(|t| t.as_slice().to_vec());
    let joint = |s2: f64, l1: f64, l2: f64| {
        log_joint_given_rss(prior, data.n, rss, beta.as_slice(), tau_slice.as_deref(), s2, l1, l2)
    };
    let (u1, u2, theta) = (start.u1, start.u2, start.theta);
    let in_transformed = |a: f64, b: f64, c: f64| match from_transformed(form, a, b, c) {
        Ok((s2, l1, l2)) => joint(s2, l1, l2) + log_jacobian(form, a, b),
        Err(_) => f64::NEG_INFINITY,
    };
    let (log_f, hint): (Box<dyn Fn(f64) -> f64>, f64) = match target {
        ScaleTarget::U1 => (Box::new(|x| in_transformed(x, u2, theta)), u1),
        ScaleTarget::U2 => (Box::new(|x| in_transformed(u1, x, theta)), u2),
        ScaleTarget::Theta => (Box::new(|x| in_transformed(u1, u2, x)), theta),
        ScaleTarget::Sigma2 => (Box::new(|x| joint(x, start.lambda1, start.lambda2)), start.sigma2),
    };
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let mut s = start.clone();
        let v = match target {
            ScaleTarget::U1 => {
                update_u1(data.n, rss, prior, &mut s, rng)?;
                s.u1
            }
            ScaleTarget::Sigma2 => {
                update_sigma2(data.n, rss, prior, &mut s, rng)?;
                s.sigma2
            }
            ScaleTarget::U2 => {
                update_u2(prior, &mut s, rng)?;
                s.u2
            }
            ScaleTarget::Theta => {
                update_theta(prior, &mut s, rng)?;
                s.theta
            }
        };
        draws.push(v);
    }
    ks_check(
        format!("{kind} {target:?} kernel"),
        &draws,
        log_f,
        0.0,
        f64::INFINITY,
        hint,
    )
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random log-concave tilted parameter sets in one of three regimes:
/// `q = 0`, `q ≥ 1` with `2b = q`, and `q ≥ 1` with `2b > q`.
pub fn random_tilted_params<R: Rng + ?Sized>(regime: usize, rng: &mut R) -> TiltedDensityParams {
    let a = uniform(rng, 1.0, 10.0);
    let c = uniform(rng, 0.05, 10.0);
    match regime {
        0 => TiltedDensityParams::new(0, a, uniform(rng, 0.0, 5.0), c, 0.0),
        1 => {
            let q = rng.random_range(1..=8u32);
            TiltedDensityParams::new(q, a, 0.5 * q as f64, c, 0.0)
        }
        _ => {
            let q = rng.random_range(1..=8u32);
            TiltedDensityParams::new(q, a, 0.5 * q as f64 + uniform(rng, 0.01, 5.0), c, 0.0)
        }
    }
}

/// Golden-section maximizer of a unimodal function on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Failure description for one tilted parameter set, or `None` if the
/// concavity, sandwich and mode-bracket checks all hold.
pub fn tilted_property_violation(p: &TiltedDensityParams) -> Option<String> {
    if !prop1_logconcavity_check(p) {
        return Some(format!("{p:?} rejected by the log-concavity gate"));
    }
    for k in 0..200 {
        let x = 1e-3 * (5e4f64).powf(k as f64 / 199.0);
        let h = 1e-3 * x;
        let (fm, f0, fp) = (p.log_density(x - h), p.log_density(x), p.log_density(x + h));
        if fm - 2.0 * f0 + fp > 1e-9 * (1.0 + f0.abs()) {
            return Some(format!("{p:?}: positive second difference at {x}"));
        }
        if x <= 50.0 {
            let m = mills_ratio(x);
            if !(x < m && m < x + 1.0 / x) {
                return Some(format!("sandwich fails at {x}: m = {m}"));
            }
        }
    }
    let (lo, hi) = match prop2_mode_bounds(p) {
        Ok(b) => b,
        Err(e) => return Some(format!("{p:?}: {e}")),
    };
    let mode = bisect_mode(p, lo, hi);
    let search = golden_max(|x| p.log_density(x), 1e-12, 2.0 * hi + 10.0);
    let slack = 1e-6 * hi.max(1e-300);
    if !(lo - slack <= mode && mode <= hi + slack && lo - slack <= search && search <= hi + slack) {
        return Some(format!("{p:?}: mode {mode} / {search} outside [{lo}, {hi}]"));
    }
    None
}

/// Property suite over `sets` random parameter sets per regime.
pub fn check_tilted_properties<R: Rng + ?Sized>(sets: usize, rng: &mut R) -> CheckOutcome {
    let mut failures = Vec::new();
    for regime in 0..3 {
        for _ in 0..sets {
            let p = random_tilted_params(regime, rng);
            if let Some(msg) = tilted_property_violation(&p) {
                failures.push(msg);
            }
        }
    }
    CheckOutcome {
        name: "tilted-family concavity, sandwich and mode bracket".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} sets per regime", sets)
        } else {
            failures.join("; ")
        },
    }
}

/// `-2σ² Δ log posterior` against `Δ(RSS + λ2|β|² + λ1|β|₁)` at random pairs,
/// common form, fixed scale parameters.
pub fn elastic_net_identity_gap<R: Rng + ?Sized>(data: &RegressionData, pairs: usize, rng: &mut R) -> Result<f64> {
    let prior = PriorSpec::weak(PriorForm::CommonScaled, Representation::Direct);
    let (sigma2, lambda1, lambda2) = (2.3, 1.4, 0.6);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let draw = |rng: &mut R| DVector::from_fn(data.p, |_, _| 3.0 * rng.sample::<f64, _>(StandardNormal));
        let (a, b) = (draw(rng), draw(rng));
        let sa = ModelState::new(PriorForm::CommonScaled, a.clone(), sigma2, lambda1, lambda2, None)?;
        let sb = ModelState::new(PriorForm::CommonScaled, b.clone(), sigma2, lambda1, lambda2, None)?;
        let lhs = -2.0 * sigma2 * (log_posterior_unnorm(data, &prior, &sa) - log_posterior_unnorm(data, &prior, &sb));
        let (oa, ob) = (
            elastic_net_objective(data, &a, lambda1, lambda2),
            elastic_net_objective(data, &b, lambda1, lambda2),
        );
        worst = worst.max((lhs - (oa - ob)).abs() / oa.abs().max(ob.abs()).max(1.0));
    }
    Ok(worst)
}

fn transform_round_trip_gap<R: Rng + ?Sized>(sets: usize, rng: &mut R) -> Result<f64> {
    let mut worst = 0.0f64;
    for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
        for _ in 0..sets {
            let v = [
                uniform(rng, -5.0, 5.0).exp(),
                uniform(rng, -5.0, 5.0).exp(),
                uniform(rng, -5.0, 5.0).exp(),
            ];
            let (u1, u2, t) = to_transformed(form, v[0], v[1], v[2])?;
            let (a, b, c) = from_transformed(form, u1, u2, t)?;
            for (x, y) in [(a, v[0]), (b, v[1]), (c, v[2])] {
                worst = worst.max(((x - y) / y).abs());
            }
        }
    }
    Ok(worst)
}

/// Draw multiplier for the confirmation rerun of a failed KS check.
pub const CONFIRMATION_FACTOR: usize = 10;
const CONFIRMATION_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug)]
pub struct ValidationOptions {
    /// Smaller draw counts (`N = 2000` per KS check).
    pub quick: bool,
    pub seed: u64,
    /// Parameter map used by the β coordinate kernel.
    pub beta_conditional: CoordinateParamsFn,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 2024,
            beta_conditional: coordinate_conditional,
        }
    }
}

/// The complete battery. Every check gets its own random stream.
///
/// With dozens of KS checks at the 1% level, a correct build fails one of
/// them by chance a sizeable fraction of the time. A KS check that fails is
/// therefore rerun once with ten times as many draws on a separate stream,
/// and the rerun decides. Both statistics are kept in the detail line.
pub fn run_validation(opts: &ValidationOptions) -> Vec<CheckOutcome> {
    let n = if opts.quick { 2_000 } else { 10_000 };
    let n_prior = if opts.quick { 10_000 } else { 100_000 };
    type Job<'a> = (
        String,
        Box<dyn Fn(&mut RngStream, usize) -> Result<CheckOutcome> + Sync + 'a>,
    );
    let mut jobs: Vec<Job> = Vec::new();
    let mut add = |name: &str, f: Box<dyn Fn(&mut RngStream, usize) -> Result<CheckOutcome> + Sync>| {
        jobs.push((name.to_string(), f))
    };

    add(
        "truncated normal +",
        Box::new(move |r, k| check_truncated_normal(-2.0, 1.5, Side::NonNegative, k * n, r)),
    );
    add(
        "truncated normal -",
        Box::new(move |r, k| check_truncated_normal(0.7, 0.3, Side::Negative, k * n, r)),
    );
    add(
        "normal tail",
        Box::new(move |r, k| check_std_normal_tail(2.5, k * n, r)),
    );
    add(
        "inverse gamma",
        Box::new(move |r, k| check_inverse_gamma(3.5, 2.0, k * n, r)),
    );
    add(
        "inverse gaussian",
        Box::new(move |r, k| check_inverse_gaussian(1.5, 0.8, k * n, r)),
    );
    add("gig", Box::new(move |r, k| check_gig(-0.7, 2.0, 3.0, k * n, r)));
    add("gig large", Box::new(move |r, k| check_gig(4.0, 0.5, 0.2, k * n, r)));
    add("mhn", Box::new(move |r, k| check_mhn(3.0, 2.0, 2.0, k * n, r)));
    add(
        "mhn small alpha",
        Box::new(move |r, k| check_mhn(0.6, 1.0, -1.5, k * n, r)),
    );
    for (q, b) in [(1u32, 0.5), (2, 1.5), (4, 2.0)] {
        add(
            &format!("tilted q={q}"),
            Box::new(move |r, k| check_tilted(&TiltedDensityParams::new(q, 2.0, b, 1.0, 0.0), k * n, r)),
        );
    }
    for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
        for (s2, l1, l2) in [(1.0, 1.0, 1.0), (2.0, 3.0, 0.5)] {
            add(
                "prior equivalence",
                Box::new(move |r, k| check_prior_equivalence(form, s2, l1, l2, k * n_prior, r)),
            );
        }
        let params = opts.beta_conditional;
        add(
            "beta coordinate",
            Box::new(move |r, k| check_beta_coordinate(form, params, k * n, r)),
        );
        add("beta block", Box::new(move |r, k| check_beta_block(form, 0, k * n, r)));
        add("tau2", Box::new(move |r, k| check_tau2(form, 0.6, k * n, r)));
        for rep in [Representation::Direct, Representation::DataAugmentation] {
            let kind = SweepKind::new(Algorithm::Rs, form, rep);
            for target in scale_targets(form) {
                add(
                    "scale kernel",
                    Box::new(move |r, k| check_scale_kernel(kind, &PriorSpec::weak(form, rep), target, k * n, r)),
                );
            }
        }
    }
    add(
        "tilted properties",
        Box::new(move |r, _| Ok(check_tilted_properties(if opts.quick { 20 } else { 100 }, r))),
    );
    add(
        "elastic net identity",
        Box::new(move |r, _| {
            let data = crate::sim::replicate_dataset(&crate::sim::SimDesign::new(1)?, KERNEL_SEED, 0)?;
            let gap = elastic_net_identity_gap(&data, 100, r)?;
            Ok(CheckOutcome {
                name: "elastic net objective identity (simulation 1 data)".into(),
                passed: gap <= 1e-9,
                detail: format!("largest relative gap {gap:.2e}"),
            })
        }),
    );
    add(
        "transform round trip",
        Box::new(move |r, _| {
            let gap = transform_round_trip_gap(200, r)?;
            Ok(CheckOutcome {
                name: "transformed-parameter round trip".into(),
                passed: gap <= 1e-12,
                detail: format!("largest relative gap {gap:.2e}"),
            })
        }),
    );

    use rayon::prelude::*;
    jobs.par_iter()
        .enumerate()
        .map(|(i, (name, job))| {
            let mut rng = RngStream::new(opts.seed, i as u64);
            let first = job(&mut rng, 1).unwrap_or_else(|e| CheckOutcome::error(name.clone(), &e));
            if first.passed || !first.detail.starts_with("D =") {
                return first;
            }
            let mut rng = RngStream::new(opts.seed, CONFIRMATION_STREAM | i as u64);
            match job(&mut rng, CONFIRMATION_FACTOR) {
                Ok(second) => CheckOutcome {
                    detail: format!("{}; rerun {}", first.detail, second.detail),
                    ..second
                },
                Err(e) => CheckOutcome::error(name.clone(), &e),
            }
        })
        .collect()
}
