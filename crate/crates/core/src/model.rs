//! Data, priors, state and the joint density.
//!
//! All densities are written in the natural parameters `(β, τ², σ², λ1, λ2)`.
//! The likelihood is the intercept-integrated Gaussian likelihood on
//! mean-centered data, `(σ²)^{-(n-1)/2} exp(-RSS / 2σ²)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::{sample_std_normal_tail, sample_truncated_normal, Side};
use crate::error::{require_positive, Error, Result};
use crate::special::{ln_gamma, log_std_normal_cdf, LN_SQRT_2PI};

/// How the ℓ1 term of the prior is scaled: by `2σ²` (common) or by `σ` (differential).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PriorForm {
    CommonScaled,
    DifferentialScaled,
}

/// Whether the prior on β is used directly or through latent variances `τ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Direct,
    DataAugmentation,
}

impl fmt::Display for PriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorForm::CommonScaled => "common",
            PriorForm::DifferentialScaled => "differential",
        })
    }
}

impl FromStr for PriorForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "common" => Ok(PriorForm::CommonScaled),
            "differential" => Ok(PriorForm::DifferentialScaled),
            other => Err(Error::Config(format!(
                "unknown prior form '{other}' (common|differential)"
            ))),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Direct => "direct",
            Representation::DataAugmentation => "da",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Representation::Direct),
            "da" => Ok(Representation::DataAugmentation),
            other => Err(Error::Config(format!("unknown representation '{other}' (direct|da)"))),
        }
    }
}

/// Centered regression data with cached cross-products.
#[derive(Clone, Debug)]
pub struct RegressionData {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub col_sq_norms: DVector<f64>,
    pub yty: f64,
    pub n: usize,
    pub p: usize,
    /// Columns whose variance is zero after centering (kept, but flagged).
    pub zero_variance_columns: Vec<usize>,
}

/// Subtract column means from `raw_x` and the mean from `raw_y`, then cache
/// `XᵀX`, `Xᵀy` and the column norms.
pub fn center_data(raw_y: &[f64], raw_x: &DMatrix<f64>) -> Result<RegressionData> {
    let n = raw_y.len();
    if n < 2 {
        return Err(Error::Data(format!("need at least 2 observations, got {n}")));
    }
    if raw_x.nrows() != n {
        return Err(Error::Data(format!(
            "response has {n} rows but the design has {}",
            raw_x.nrows()
        )));
    }
    if raw_y.iter().chain(raw_x.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite value in the data".into()));
    }
    let p = raw_x.ncols();
    let y_mean = raw_y.iter().sum::<f64>() / n as f64;
    let y = DVector::from_iterator(n, raw_y.iter().map(|v| v - y_mean));
    let mut x = raw_x.clone();
    for mut col in x.column_iter_mut() {
        let m = col.mean();
        col.add_scalar_mut(-m);
    }
    let xtx = x.tr_mul(&x);
    let xty = x.tr_mul(&y);
    let col_sq_norms = xtx.diagonal();
    let zero_variance_columns = (0..p).filter(|&j| col_sq_norms[j] == 0.0).collect();
    let yty = y.dot(&y);
    Ok(RegressionData {
        y,
        x,
        xtx,
        xty,
        col_sq_norms,
        yty,
        n,
        p,
        zero_variance_columns,
    })
}

impl RegressionData {
    /// Residual sum of squares `(y - Xβ)ᵀ(y - Xβ)`.
    pub fn rss(&self, beta: &DVector<f64>) -> f64 {
        let r = &self.y - &self.x * beta;
        r.dot(&r)
    }
}

/// Read a delimited dataset with a header row. The column named `y` is the
/// response; every other column is a covariate, in file order.
pub fn read_dataset_csv(path: &Path) -> Result<(Vec<f64>, DMatrix<f64>, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Data(format!("cannot open {}: {e}", path.display())),
            _ => Error::Csv(e),
        })?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let y_col = headers
        .iter()
        .position(|h| h == "y")
        .ok_or_else(|| Error::Data(format!("{} has no column named 'y'", path.display())))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != y_col)
        .map(|(_, h)| h.clone())
        .collect();
    let mut y = Vec::new();
    let mut flat = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (i, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Data(format!("row {}: cannot parse '{field}' as a number", row + 2)))?;
            if i == y_col {
                y.push(v);
            } else {
                flat.push(v);
            }
        }
    }
    let x = DMatrix::from_row_slice(y.len(), names.len(), &flat);
    Ok((y, x, names))
}

/// Write `y` and the columns of `x` (named `x1..xp`) with a header row.
pub fn write_dataset_csv(path: &Path, y: &[f64], x: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["y".to_string()];
    header.extend((1..=x.ncols()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for (i, yi) in y.iter().enumerate() {
        let mut rec = vec![format_float(*yi)];
        rec.extend(x.row(i).iter().map(|v| format_float(*v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Shortest representation that round-trips, never fewer than 17 significant
/// digits' worth of information.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Prior form, representation and hyperparameters.
///
/// `λ1 ~ Gamma(L, rate ν1/2)`, `λ2 ~ Gamma(R, rate ν2/2)`, and
/// `σ² ~ Inv-Gamma(νa/2, νb/2)`; `νa = νb = 0` is the improper `1/σ²` limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorSpec {
    pub form: PriorForm,
    pub representation: Representation,
    pub l: f64,
    pub nu1: f64,
    pub r: f64,
    pub nu2: f64,
    pub nu_a: f64,
    pub nu_b: f64,
}

impl PriorSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        form: PriorForm,
        representation: Representation,
        l: f64,
        nu1: f64,
        r: f64,
        nu2: f64,
        nu_a: f64,
        nu_b: f64,
    ) -> Result<Self> {
        require_positive("L", l)?;
        require_positive("nu1", nu1)?;
        require_positive("R", r)?;
        require_positive("nu2", nu2)?;
        for (name, v) in [("nu_a", nu_a), ("nu_b", nu_b)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, v, "must be finite and >= 0"));
            }
        }
        Ok(Self {
            form,
            representation,
            l,
            nu1,
            r,
            nu2,
            nu_a,
            nu_b,
        })
    }

    /// `L = ν1 = R = ν2 = 1`, `νa = νb = 1`: uniform on `λ1/(λ1+λ2)`.
    pub fn weak(form: PriorForm, representation: Representation) -> Self {
        Self::new(form, representation, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).expect("valid preset")
    }

    /// `L = 6, ν1 = 4, R = 2, ν2 = 4`, `νa = νb = 1`: Beta(6, 2) on `λ1/(λ1+λ2)`.
    pub fn strong(form: PriorForm, representation: Representation) -> Self {
        Self::new(form, representation, 6.0, 4.0, 2.0, 4.0, 1.0, 1.0).expect("valid preset")
    }
}

/// Current position of a chain.
///
/// `(u1, u2, θ)` are kept in sync with `(σ², λ1, λ2)` under the prior form the
/// state was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    pub form: PriorForm,
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub tau2: Option<DVector<f64>>,
    pub u1: f64,
    pub u2: f64,
    pub theta: f64,
}

impl ModelState {
    pub fn new(
        form: PriorForm,
        beta: DVector<f64>,
        sigma2: f64,
        lambda1: f64,
        lambda2: f64,
        tau2: Option<DVector<f64>>,
    ) -> Result<Self> {
        let (u1, u2, theta) = to_transformed(form, sigma2, lambda1, lambda2)?;
        let state = Self {
            form,
            beta,
            sigma2,
            lambda1,
            lambda2,
            tau2,
            u1,
            u2,
            theta,
        };
        if let Some(t) = &state.tau2 {
            if t.len() != state.beta.len() {
                return Err(Error::Data("tau2 and beta lengths differ".into()));
            }
            for &v in t.iter() {
                check_tau2(form, v)?;
            }
        }
        Ok(state)
    }

    pub fn set_natural(&mut self, sigma2: f64, lambda1: f64, lambda2: f64) -> Result<()> {
        let (u1, u2, theta) = to_transformed(self.form, sigma2, lambda1, lambda2)?;
        self.sigma2 = sigma2;
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self.u1 = u1;
        self.u2 = u2;
        self.theta = theta;
        Ok(())
    }

    pub fn set_transformed(&mut self, u1: f64, u2: f64, theta: f64) -> Result<()> {
        let (sigma2, lambda1, lambda2) = from_transformed(self.form, u1, u2, theta)?;
        self.sigma2 = sigma2;
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self.u1 = u1;
        self.u2 = u2;
        self.theta = theta;
        Ok(())
    }

    /// Positivity, τ² support and transform consistency.
    pub fn check_invariants(&self) -> Result<()> {
        for (name, v) in [
            ("sigma2", self.sigma2),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ] {
            require_positive(name, v)?;
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Data("non-finite beta".into()));
        }
        if let Some(t) = &self.tau2 {
            for &v in t.iter() {
                check_tau2(self.form, v)?;
            }
        }
        let (s, l1, l2) = from_transformed(self.form, self.u1, self.u2, self.theta)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs());
        if !(close(s, self.sigma2) && close(l1, self.lambda1) && close(l2, self.lambda2)) {
            return Err(Error::Data("transformed parameters out of sync".into()));
        }
        Ok(())
    }
}

fn check_tau2(form: PriorForm, t: f64) -> Result<()> {
    let ok = match form {
        PriorForm::CommonScaled => t > 0.0 && t < 1.0,
        PriorForm::DifferentialScaled => t > 0.0 && t.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::param("tau2", t, "outside the latent-variance support"))
    }
}

/// Common: `(σ², √λ2/σ, λ1/(2σ√λ2))`. Differential: `(σ², √λ2, λ1/√λ2)`.
pub fn to_transformed(form: PriorForm, sigma2: f64, lambda1: f64, lambda2: f64) -> Result<(f64, f64, f64)> {
    require_positive("sigma2", sigma2)?;
    require_positive("lambda1", lambda1)?;
    require_positive("lambda2", lambda2)?;
    let sl2 = lambda2.sqrt();
    Ok(match form {
        PriorForm::CommonScaled => {
            let sigma = sigma2.sqrt();
            (sigma2, sl2 / sigma, lambda1 / (2.0 * sigma * sl2))
        }
        PriorForm::DifferentialScaled => (sigma2, sl2, lambda1 / sl2),
    })
}

/// Inverse of [`to_transformed`].
pub fn from_transformed(form: PriorForm, u1: f64, u2: f64, theta: f64) -> Result<(f64, f64, f64)> {
    require_positive("u1", u1)?;
    require_positive("u2", u2)?;
    require_positive("theta", theta)?;
    Ok(match form {
        PriorForm::CommonScaled => (u1, 2.0 * theta * u2 * u1, u1 * u2 * u2),
        PriorForm::DifferentialScaled => (u1, theta * u2, u2 * u2),
    })
}

/// Standardized distance `κ` from the origin to the mode of the untruncated
/// normal in each orthant: `λ1/(2σ√λ2)` (common) or `λ1/√λ2` (differential).
pub fn orthant_shift(form: PriorForm, sigma2: f64, lambda1: f64, lambda2: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => lambda1 / (2.0 * sigma2.sqrt() * lambda2.sqrt()),
        PriorForm::DifferentialScaled => lambda1 / lambda2.sqrt(),
    }
}

/// ℓ1 coefficient in `-log π(β)`: `λ1/(2σ²)` or `λ1/σ`.
pub fn l1_coefficient(form: PriorForm, sigma2: f64, lambda1: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => lambda1 / (2.0 * sigma2),
        PriorForm::DifferentialScaled => lambda1 / sigma2.sqrt(),
    }
}

/// Normalized log density of the direct prior `π(β | σ², λ1, λ2)`.
pub fn log_prior_beta(form: PriorForm, beta: &[f64], sigma2: f64, lambda1: f64, lambda2: f64) -> f64 {
    let p = beta.len() as f64;
    let bb: f64 = beta.iter().map(|b| b * b).sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    log_prior_beta_from_norms(form, p, bb, l1, sigma2, lambda1, lambda2)
}

/// [`log_prior_beta`] given `p`, `βᵀβ` and `|β|₁`.
pub fn log_prior_beta_from_norms(
    form: PriorForm,
    p: f64,
    bb: f64,
    l1: f64,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
) -> f64 {
    let kappa = orthant_shift(form, sigma2, lambda1, lambda2);
    let log_norm = -std::f64::consts::LN_2
        - LN_SQRT_2PI
        - 0.5 * (sigma2 / lambda2).ln()
        - 0.5 * kappa * kappa
        - log_std_normal_cdf(-kappa);
    p * log_norm - lambda2 * bb / (2.0 * sigma2) - l1_coefficient(form, sigma2, lambda1) * l1
}

/// The direct prior written as an equal mixture of two truncated normals,
/// one per half-line, both with variance `σ²/λ2`.
pub fn log_prior_beta_mixture(form: PriorForm, beta: f64, sigma2: f64, lambda1: f64, lambda2: f64) -> f64 {
    let s = (sigma2 / lambda2).sqrt();
    let kappa = orthant_shift(form, sigma2, lambda1, lambda2);
    // N⁺(-κs, s²) on [0, ∞) and N⁻(κs, s²) on (-∞, 0); each keeps mass Φ(-κ)
    let z = beta.abs() / s + kappa;
    -std::f64::consts::LN_2 + (-0.5 * z * z - LN_SQRT_2PI - s.ln()) - log_std_normal_cdf(-kappa)
}

/// Variance of `β_j | τ_j²` in the scale-mixture representation.
pub fn da_conditional_variance(form: PriorForm, tau2: f64, sigma2: f64, lambda2: f64) -> f64 {
    match form {
        PriorForm::CommonScaled => sigma2 / lambda2 * (1.0 - tau2),
        PriorForm::DifferentialScaled => sigma2 * tau2 / (1.0 + lambda2 * tau2),
    }
}

/// Normalized log density of the mixing law of `τ_j²`.
///
/// Common: inverse gamma `(1/2, κ²/2)` truncated to `(0, 1)`.
/// Differential: `∝ (1 + λ2 τ²)^{-1/2} e^{-λ1² τ²/2}` on `(0, ∞)`.
pub fn log_mixing_density(form: PriorForm, tau2: f64, sigma2: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    check_tau2(form, tau2)?;
    let kappa = orthant_shift(form, sigma2, lambda1, lambda2);
    let base = -(2.0 * (2.0 * std::f64::consts::PI).sqrt()).ln() - log_std_normal_cdf(-kappa);
    Ok(match form {
        PriorForm::CommonScaled => base + kappa.ln() - 1.5 * tau2.ln() - 0.5 * kappa * kappa / tau2,
        PriorForm::DifferentialScaled => {
            base + lambda1.ln() + 0.5 * lambda2.ln()
                - 0.5 * kappa * kappa
                - 0.5 * (lambda2 * tau2).ln_1p()
                - 0.5 * lambda1 * lambda1 * tau2
        }
    })
}

/// Joint log density `Σ_j log N(β_j; 0, v(τ_j²)) + log π(τ_j²)`.
pub fn log_prior_da(
    form: PriorForm,
    beta: &[f64],
    tau2: &[f64],
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    if beta.len() != tau2.len() {
        return Err(Error::Data("tau2 and beta lengths differ".into()));
    }
    let mut total = 0.0;
    for (&b, &t) in beta.iter().zip(tau2) {
        let mix = log_mixing_density(form, t, sigma2, lambda1, lambda2)?;
        let v = da_conditional_variance(form, t, sigma2, lambda2);
        let normal = if v > 0.0 {
            -LN_SQRT_2PI - 0.5 * v.ln() - 0.5 * b * b / v
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        total += normal + mix;
    }
    Ok(total)
}

/// Log integrated likelihood `-(n-1)/2 log(2πσ²) - RSS/(2σ²)`.
pub fn log_likelihood(n: usize, rss: f64, sigma2: f64) -> f64 {
    -0.5 * (n as f64 - 1.0) * ((2.0 * std::f64::consts::PI).ln() + sigma2.ln()) - rss / (2.0 * sigma2)
}

/// Log hyperprior density of `(σ², λ1, λ2)`; normalized except in the
/// improper `νa = 0` or `νb = 0` limit, where the kernel is used.
pub fn log_hyperprior(prior: &PriorSpec, sigma2: f64, lambda1: f64, lambda2: f64) -> f64 {
    let gamma = |x: f64, shape: f64, rate: f64| shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x;
    let (a, b) = (0.5 * prior.nu_a, 0.5 * prior.nu_b);
    let mut ig = -(a + 1.0) * sigma2.ln() - b / sigma2;
    if a > 0.0 && b > 0.0 {
        ig += a * b.ln() - ln_gamma(a);
    }
    gamma(lambda1, prior.l, 0.5 * prior.nu1) + gamma(lambda2, prior.r, 0.5 * prior.nu2) + ig
}

/// Log of the joint density at fixed β (and τ²), as a function of the scale
/// parameters; `rss` is the residual sum of squares at the current β.
#[allow(clippy::too_many_arguments)]
pub fn log_joint_given_rss(
    prior: &PriorSpec,
    n: usize,
    rss: f64,
    beta: &[f64],
    tau2: Option<&[f64]>,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
) -> f64 {
    let log_beta = match (prior.representation, tau2) {
        (Representation::DataAugmentation, Some(t)) => {
            log_prior_da(prior.form, beta, t, sigma2, lambda1, lambda2).unwrap_or(f64::NEG_INFINITY)
        }
        _ => log_prior_beta(prior.form, beta, sigma2, lambda1, lambda2),
    };
    log_likelihood(n, rss, sigma2) + log_beta + log_hyperprior(prior, sigma2, lambda1, lambda2)
}

/// Unnormalized log posterior at `state`.
pub fn log_posterior_unnorm(data: &RegressionData, prior: &PriorSpec, state: &ModelState) -> f64 {
    let rss = data.rss(&state.beta);
    log_joint_given_rss(
        prior,
        data.n,
        rss,
        state.beta.as_slice(),
        state.tau2.as_ref().map(|t| t.as_slice()),
        state.sigma2,
        state.lambda1,
        state.lambda2,
    )
}

/// `RSS + λ2 βᵀβ + λ1 |β|₁`.
pub fn elastic_net_objective(data: &RegressionData, beta: &DVector<f64>, lambda1: f64, lambda2: f64) -> f64 {
    data.rss(beta) + lambda2 * beta.dot(beta) + lambda1 * beta.abs().sum()
}

/// One draw of `τ²` from its mixing law.
///
/// Both laws are images of a standard normal conditioned on `|Z| > κ`:
/// `τ² = κ²/Z²` (common) and `τ² = (Z²/κ² - 1)/λ2` (differential).
pub fn sample_tau2_prior<R: Rng + ?Sized>(
    form: PriorForm,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
    rng: &mut R,
) -> f64 {
    let kappa = orthant_shift(form, sigma2, lambda1, lambda2);
    let z = sample_std_normal_tail(kappa, rng);
    let ratio = kappa / z;
    match form {
        PriorForm::CommonScaled => (ratio * ratio).clamp(f64::MIN_POSITIVE, TAU2_COMMON_MAX),
        PriorForm::DifferentialScaled => {
            let s = (z - kappa) * (z + kappa) / (kappa * kappa);
            (s / lambda2).max(f64::MIN_POSITIVE)
        }
    }
}

/// Largest representable value below 1, the cap for common-form `τ²`.
pub const TAU2_COMMON_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// One draw of `(β_j, τ_j²)` from the hierarchical representation.
pub fn sample_beta_hierarchical<R: Rng + ?Sized>(
    form: PriorForm,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
    rng: &mut R,
) -> (f64, f64) {
    let t = sample_tau2_prior(form, sigma2, lambda1, lambda2, rng);
    let v = da_conditional_variance(form, t, sigma2, lambda2);
    let z: f64 = rng.sample(StandardNormal);
    (v.sqrt() * z, t)
}

/// One draw of `β_j` from the direct prior via its two-truncated-normal form.
pub fn sample_beta_direct<R: Rng + ?Sized>(
    form: PriorForm,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
    rng: &mut R,
) -> Result<f64> {
    let s2 = sigma2 / lambda2;
    let shift = orthant_shift(form, sigma2, lambda1, lambda2) * s2.sqrt();
    if rng.random::<bool>() {
        sample_truncated_normal(-shift, s2, Side::NonNegative, rng)
    } else {
        sample_truncated_normal(shift, s2, Side::Negative, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::special::std_normal_cdf;
    use approx::assert_relative_eq;

    #[test]
    fn centering_arithmetic() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let d = center_data(&[1.0, 2.0, 3.0], &x).unwrap();
        assert_eq!(d.y.as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(d.x.as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(d.xty[0], 2.0);
        assert_eq!(d.xtx[(0, 0)], 2.0);
        assert!(d.zero_variance_columns.is_empty());
    }

    #[test]
    fn centering_flags_constant_columns() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 5.0, 2.0, 5.0, 4.0, 5.0]);
        let d = center_data(&[0.3, 0.1, 0.2], &x).unwrap();
        assert_eq!(d.zero_variance_columns, vec![1]);
        for col in d.x.column_iter() {
            assert!(col.sum().abs() < 1e-12);
        }
        assert!(center_data(&[1.0], &DMatrix::zeros(1, 1)).is_err());
        assert!(center_data(&[1.0, 2.0], &DMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn transform_examples() {
        let (u1, u2, th) = to_transformed(PriorForm::CommonScaled, 1.0, 1.0, 1.0).unwrap();
        assert_eq!((u1, u2, th), (1.0, 1.0, 0.5));
        let (u1, u2, th) = to_transformed(PriorForm::DifferentialScaled, 4.0, 3.0, 9.0).unwrap();
        assert_eq!((u1, u2, th), (4.0, 3.0, 1.0));
        assert!(to_transformed(PriorForm::CommonScaled, 0.0, 1.0, 1.0).is_err());
        assert!(from_transformed(PriorForm::CommonScaled, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn transform_round_trip() {
        let mut rng = RngStream::new(1, 0);
        for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
            for _ in 0..10_000 {
                let v: Vec<f64> = (0..3).map(|_| (rng.random::<f64>() * 8.0 - 4.0).exp()).collect();
                let (a, b, c) = to_transformed(form, v[0], v[1], v[2]).unwrap();
                let (s, l1, l2) = from_transformed(form, a, b, c).unwrap();
                for (x, y) in [(s, v[0]), (l1, v[1]), (l2, v[2])] {
                    assert!((x - y).abs() <= 1e-12 * y.max(1.0), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn direct_prior_reference_value() {
        let expected = -(2.0f64).ln() - LN_SQRT_2PI - 0.125 - std_normal_cdf(-0.5).ln();
        let got = log_prior_beta(PriorForm::CommonScaled, &[0.0], 1.0, 1.0, 1.0);
        assert_relative_eq!(got, expected, epsilon = 1e-14);
        // 50-digit value of the same expression
        assert_relative_eq!(got, -0.561_173_952_170_999_442_32, epsilon = 1e-14);
    }

    #[test]
    fn mixture_form_matches_direct_density() {
        for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
            for &(s2, l1, l2) in &[(1.0, 1.0, 1.0), (2.0, 3.0, 0.5), (0.3, 0.1, 4.0)] {
                for b in [-3.0, -0.4, 0.0, 1e-9, 0.7, 2.5] {
                    let direct = log_prior_beta(form, &[b], s2, l1, l2);
                    let mix = log_prior_beta_mixture(form, b, s2, l1, l2);
                    assert!((direct - mix).abs() < 1e-10, "{form} b={b}: {direct} vs {mix}");
                }
            }
        }
    }

    #[test]
    fn da_support_is_enforced() {
        assert!(log_prior_da(PriorForm::CommonScaled, &[0.1], &[1.0], 1.0, 1.0, 1.0).is_err());
        assert!(log_prior_da(PriorForm::CommonScaled, &[0.1], &[0.0], 1.0, 1.0, 1.0).is_err());
        assert!(log_prior_da(PriorForm::DifferentialScaled, &[0.1], &[-1.0], 1.0, 1.0, 1.0).is_err());
        let near_one = log_prior_da(PriorForm::CommonScaled, &[0.5], &[1.0 - 1e-15], 1.0, 1.0, 1.0).unwrap();
        assert!(near_one < -1e13);
    }

    #[test]
    fn hierarchical_tau2_support() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..10_000 {
            let t = sample_tau2_prior(PriorForm::CommonScaled, 0.1, 0.01, 50.0, &mut rng);
            assert!(t > 0.0 && t < 1.0);
            let t = sample_tau2_prior(PriorForm::DifferentialScaled, 1.0, 5.0, 0.2, &mut rng);
            assert!(t > 0.0 && t.is_finite());
        }
    }

    #[test]
    fn likelihood_and_objective_at_zero() {
        let x = DMatrix::from_row_slice(4, 1, &[1.0, -1.0, 2.0, 0.0]);
        let d = center_data(&[1.0, 0.0, 2.0, 1.0], &x).unwrap();
        let zero = DVector::zeros(1);
        assert_relative_eq!(elastic_net_objective(&d, &zero, 3.0, 2.0), d.yty);
        assert_relative_eq!(d.rss(&zero), d.yty);
    }

    #[test]
    fn hyperprior_presets() {
        let w = PriorSpec::weak(PriorForm::CommonScaled, Representation::Direct);
        assert_eq!((w.l, w.nu1, w.r, w.nu2, w.nu_a, w.nu_b), (1.0, 1.0, 1.0, 1.0, 1.0, 1.0));
        let s = PriorSpec::strong(PriorForm::DifferentialScaled, Representation::DataAugmentation);
        assert_eq!((s.l, s.nu1, s.r, s.nu2), (6.0, 4.0, 2.0, 4.0));
        // Gamma(1, rate 1/2) at 2: log(1/2) - 1
        let v = log_hyperprior(&w, 1.0, 2.0, 2.0);
        let ig = 0.5 * 0.5f64.ln() - ln_gamma(0.5) - 1.5 * 1.0f64.ln() - 0.5;
        assert_relative_eq!(v, 2.0 * (0.5f64.ln() - 1.0) + ig, epsilon = 1e-13);
        assert!(PriorSpec::new(
            PriorForm::CommonScaled,
            Representation::Direct,
            0.0,
            1.0,
            1.0,
            1.0,
            0.0,
            0.0
        )
        .is_err());
        assert!(PriorSpec::new(
            PriorForm::CommonScaled,
            Representation::Direct,
            1.0,
            1.0,
            1.0,
            1.0,
            0.0,
            0.0
        )
        .is_ok());
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let x = DMatrix::from_row_slice(3, 2, &[0.1, 1.0 / 3.0, -2.5, 1e-17, 7.0, 8.0]);
        let y = [1.0, std::f64::consts::PI, -0.0];
        write_dataset_csv(&path, &y, &x).unwrap();
        let (y2, x2, names) = read_dataset_csv(&path).unwrap();
        assert_eq!(names, vec!["x1", "x2"]);
        assert_eq!(
            y2.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(x2, x);
    }
}
