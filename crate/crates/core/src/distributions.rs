//! Exact samplers for the building-block distributions.
//!
//! Parameter conventions:
//!
//! | distribution | density on the support |
//! |---|---|
//! | `Gamma(a, rate r)` | `x^{a-1} e^{-r x}` |
//! | `InvGamma(a, scale b)` | `x^{-a-1} e^{-b/x}` |
//! | `GIG(λ, ψ, χ)` | `x^{λ-1} e^{-(ψ x + χ / x)/2}` |
//! | `MHN(α, β, γ)` | `x^{α-1} e^{-β x² - γ x}` |
//! | `IG(μ, λ)` (inverse Gaussian) | `x^{-3/2} e^{-λ (x-μ)² / (2 μ² x)}` |

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::logconcave::{self, LogDensity, PiecewiseExpEnvelope};

/// Which half-line a truncated normal lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x < 0`
    Negative,
    /// `x >= 0`
    NonNegative,
}

/// Standardized truncation point above which the exponential proposal is used.
const TAIL_SWITCH: f64 = 0.5;

/// Draw from `N(m, s2)` restricted to one half-line.
pub fn sample_truncated_normal<R: Rng + ?Sized>(m: f64, s2: f64, side: Side, rng: &mut R) -> Result<f64> {
    require_finite("m", m)?;
    require_positive("s2", s2)?;
    let s = s2.sqrt();
    Ok(match side {
        Side::NonNegative => {
            let z = sample_std_normal_tail(-m / s, rng);
            (m + s * z).max(0.0)
        }
        Side::Negative => {
            let z = sample_std_normal_tail(m / s, rng);
            -(s * z - m).max(f64::MIN_POSITIVE)
        }
    })
}

/// `Z ~ N(0, 1)` conditioned on `Z >= a`.
pub fn sample_std_normal_tail<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a < TAIL_SWITCH {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z >= a {
                return z;
            }
        }
    }
    // Robert (1995): translated exponential with the optimal rate.
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let z = a + e / rate;
        let u: f64 = rng.random();
        if u.ln() <= -0.5 * (z - rate) * (z - rate) {
            return z;
        }
    }
}

/// Inverse Gaussian with mean `mu` and shape `lambda` (Michael, Schucany and Haas).
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mu: f64, lambda: f64, rng: &mut R) -> Result<f64> {
    require_positive("mean", mu)?;
    require_positive("shape", lambda)?;
    let v: f64 = rng.sample(StandardNormal);
    let y = mu * v * v;
    // Smaller root of the quadratic, rationalized to avoid cancellation when y is large.
    let x = 2.0 * mu * lambda / (2.0 * lambda + y + (y * (4.0 * lambda + y)).sqrt());
    let u: f64 = rng.random();
    Ok(if u <= mu / (mu + x) { x } else { mu * mu / x })
}

/// Gamma with `shape` and `rate`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    require_positive("shape", shape)?;
    require_positive("rate", rate)?;
    let g = Gamma::new(shape, 1.0 / rate).map_err(|_| Error::param("shape", shape, "gamma"))?;
    Ok(g.sample(rng))
}

/// Inverse gamma with `shape` and `scale`: `scale / Gamma(shape, 1)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    require_positive("scale", scale)?;
    let g = sample_gamma(shape, 1.0, rng)?;
    Ok(scale / g)
}

/// Unnormalized GIG density `x^{λ-1} e^{-(ψx + χ/x)/2}`.
#[derive(Clone, Copy, Debug)]
pub struct GigDensity {
    pub lambda: f64,
    pub psi: f64,
    pub chi: f64,
}

impl GigDensity {
    pub fn new(lambda: f64, psi: f64, chi: f64) -> Result<Self> {
        require_finite("lambda_order", lambda)?;
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(Error::param("psi", psi, "must be finite and >= 0"));
        }
        if !(chi >= 0.0 && chi.is_finite()) {
            return Err(Error::param("chi", chi, "must be finite and >= 0"));
        }
        let ok = (lambda > 0.0 && psi > 0.0) || (lambda < 0.0 && chi > 0.0) || (psi > 0.0 && chi > 0.0);
        if !ok {
            return Err(Error::param("lambda_order", lambda, "GIG density is not integrable"));
        }
        Ok(Self { lambda, psi, chi })
    }

    /// Root of the log-density derivative.
    pub fn mode(&self) -> f64 {
        let (l, psi, chi) = (self.lambda - 1.0, self.psi, self.chi);
        if psi == 0.0 {
            return chi / (2.0 * (1.0 - self.lambda));
        }
        // Positive root of psi x² - 2 l x - chi = 0, in the cancellation-free form.
        if l >= 0.0 {
            (l + (l * l + psi * chi).sqrt()) / psi
        } else {
            chi / ((l * l + psi * chi).sqrt() - l)
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        -(self.lambda - 1.0) / (x * x) - self.chi / (x * x * x)
    }
}

impl LogDensity for GigDensity {
    fn log_density(&self, x: f64) -> f64 {
        let power = if self.lambda == 1.0 {
            0.0
        } else {
            (self.lambda - 1.0) * x.ln()
        };
        power - 0.5 * (self.psi * x + self.chi / x)
    }
    fn dlog_density(&self, x: f64) -> f64 {
        (self.lambda - 1.0) / x - 0.5 * self.psi + 0.5 * self.chi / (x * x)
    }
}

/// Generalized inverse Gaussian draw, `x^{λ-1} e^{-(ψx + χ/x)/2}`.
///
/// Boundary cases reduce to gamma (`χ = 0`) and inverse gamma (`ψ = 0`).
/// Otherwise the draw is made from the standardized two-parameter form with
/// the ratio-of-uniforms and dominating-density methods of Hörmann and
/// Leydold, then rescaled.
pub fn sample_gig<R: Rng + ?Sized>(lambda: f64, psi: f64, chi: f64, rng: &mut R) -> Result<f64> {
    GigDensity::new(lambda, psi, chi)?;
    if chi == 0.0 {
        return sample_gamma(lambda, 0.5 * psi, rng);
    }
    if psi == 0.0 {
        return sample_inverse_gamma(-lambda, 0.5 * chi, rng);
    }
    let omega = (psi * chi).sqrt();
    let scale = (chi / psi).sqrt();
    let order = lambda.abs();
    let x = if order > 2.0 || omega > 3.0 {
        gig_rou_shift(order, omega, rng)
    } else if order >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        gig_rou_noshift(order, omega, rng)
    } else {
        gig_concave_dominating(order, omega, rng)
    };
    Ok(if lambda < 0.0 { scale / x } else { scale * x })
}

/// Mode of `x^{λ-1} e^{-ω(x + 1/x)/2}`.
fn standardized_gig_mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        ((lambda - 1.0).hypot(omega) + (lambda - 1.0)) / omega
    } else {
        omega / ((1.0 - lambda).hypot(omega) + (1.0 - lambda))
    }
}

/// Ratio-of-uniforms about the mode, with the bounding rectangle from a cubic.
fn gig_rou_shift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = standardized_gig_mode(lambda, omega);
    let log_half = |x: f64| t * x.ln() - s * (x + 1.0 / x);
    let nc = log_half(xm);

    let a = -(2.0 * (lambda + 1.0) / omega + xm);
    let b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let phi = (-q / (2.0 * (-p * p * p / 27.0).sqrt())).clamp(-1.0, 1.0).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (phi / 3.0).cos() - a / 3.0;
    let y2 = fak * (phi / 3.0 + 4.0 / 3.0 * std::f64::consts::PI).cos() - a / 3.0;
    let u_plus = (y1 - xm) * (log_half(y1) - nc).exp();
    let u_minus = (y2 - xm) * (log_half(y2) - nc).exp();

    loop {
        let u = u_minus + rng.random::<f64>() * (u_plus - u_minus);
        let v: f64 = rng.random();
        let x = u / v + xm;
        if x <= 0.0 {
            continue;
        }
        if v.ln() <= log_half(x) - nc {
            return x;
        }
    }
}

/// Ratio-of-uniforms without mode shift.
fn gig_rou_noshift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = standardized_gig_mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + (lambda + 1.0).hypot(omega)) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * rng.random::<f64>();
        let v: f64 = rng.random();
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

/// Rejection from a three-piece dominating density; for `0 <= λ < 1` and small `ω`.
fn gig_concave_dominating<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = standardized_gig_mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    let tail_start = x0.max(2.0 / omega);

    loop {
        let mut v = total * rng.random::<f64>();
        let (x, hx) = if v <= a0 {
            (x0 * v / a0, k0)
        } else {
            v -= a0;
            if v <= a1 {
                if lambda == 0.0 {
                    let x = omega * (omega.exp() * v).exp();
                    (x, k1 / x)
                } else {
                    let x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    (x, k1 * x.powf(lambda - 1.0))
                }
            } else {
                v -= a1;
                let x = -2.0 / omega * ((-omega / 2.0 * tail_start).exp() - omega / (2.0 * k2) * v).ln();
                (x, k2 * (-omega / 2.0 * x).exp())
            }
        };
        let u = rng.random::<f64>() * hx;
        if u.ln() <= (lambda - 1.0) * x.ln() - 0.5 * omega * (x + 1.0 / x) {
            return x;
        }
    }
}

/// Unnormalized modified half-normal density `x^{α-1} e^{-βx² - γx}`.
#[derive(Clone, Copy, Debug)]
pub struct MhnDensity {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl MhnDensity {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        require_positive("beta", beta)?;
        require_finite("gamma_coef", gamma)?;
        Ok(Self { alpha, beta, gamma })
    }

    /// Mode of the density; `0` when `α = 1` and `γ >= 0`.
    pub fn mode(&self) -> f64 {
        let (k, b, g) = (self.alpha - 1.0, self.beta, self.gamma);
        let disc = (g * g + 8.0 * b * k).sqrt();
        if g >= 0.0 {
            if k == 0.0 {
                0.0
            } else {
                2.0 * k / (g + disc)
            }
        } else {
            (disc - g) / (4.0 * b)
        }
    }

    pub fn curvature(&self, x: f64) -> f64 {
        let k = self.alpha - 1.0;
        if k == 0.0 {
            -2.0 * self.beta
        } else {
            -k / (x * x) - 2.0 * self.beta
        }
    }
}

impl LogDensity for MhnDensity {
    fn log_density(&self, x: f64) -> f64 {
        let power = if self.alpha == 1.0 {
            0.0
        } else {
            (self.alpha - 1.0) * x.ln()
        };
        power - self.beta * x * x - self.gamma * x
    }
    fn dlog_density(&self, x: f64) -> f64 {
        let power = if self.alpha == 1.0 { 0.0 } else { (self.alpha - 1.0) / x };
        power - 2.0 * self.beta * x - self.gamma
    }
}

/// Modified half-normal draw, `x^{α-1} e^{-βx² - γx}` on `x > 0`.
///
/// For `α >= 1` the target is log-concave and the mode-informed envelope is
/// used. For `0 < α < 1` the draw is by rejection from `Gamma(α, rate r)`
/// with `r` chosen to maximize the acceptance bound.
pub fn sample_mhn<R: Rng + ?Sized>(alpha: f64, beta: f64, gamma: f64, rng: &mut R) -> Result<f64> {
    let target = MhnDensity::new(alpha, beta, gamma)?;
    if alpha >= 1.0 {
        let mode = target.mode();
        let env = PiecewiseExpEnvelope::build(
            &target,
            mode,
            target.curvature(mode),
            logconcave::DEFAULT_KNOTS_PER_SIDE,
            0.0,
        )?;
        return Ok(env.sample(&target, rng));
    }
    // x^{α-1} e^{-rx} times e^{-βx² - (γ - r)x}; the second factor peaks at
    // x = (r - γ)/(2β) with value e^{(r - γ)²/(4β)}.
    let rate = 0.5 * (gamma + (gamma * gamma + 8.0 * alpha * beta).sqrt());
    let peak = (rate - gamma) / (2.0 * beta);
    let proposal = Gamma::new(alpha, 1.0 / rate).map_err(|_| Error::param("alpha", alpha, "gamma proposal"))?;
    loop {
        let x: f64 = proposal.sample(rng);
        let u: f64 = rng.random();
        if u.ln() <= -beta * (x - peak) * (x - peak) {
            return Ok(x);
        }
    }
}
