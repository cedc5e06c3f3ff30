//! The normal-tail-tilted family
//!
//! ```text
//! f(x) ∝ Φ(-x)^{-q} x^{a-1} exp(-b x² - c x - d / x),   x > 0,
//! ```
//!
//! which covers gamma, GIG and MHN at `q = 0` and the `θ` full conditionals
//! of the transformed samplers at `q = p`.
//!
//! Because `d/dx [-log Φ(-x)]` is the Mills ratio `m(x)` and
//! `x < m(x) < x + 1/x`, the derivative of `log f` is sandwiched between
//! `(a-1)/x - (2b-q)x - c` and `(a-1+q)/x - (2b-q)x - c`. The positive roots
//! of those two bracket the mode; see [`prop2_mode_bounds`].

use rand::Rng;

use crate::distributions::{sample_gamma, sample_gig, sample_mhn};
use crate::error::{Error, Result};
use crate::logconcave::{ars_sample, LogDensity, PiecewiseExpEnvelope, DEFAULT_KNOTS_PER_SIDE};
use crate::special::{log_std_normal_cdf, mills_ratio};

/// Parameters `(q, a, b, c, d)` of the tilted family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltedDensityParams {
    pub q: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TiltedDensityParams {
    pub fn new(q: u32, a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { q, a, b, c, d }
    }

    fn qf(&self) -> f64 {
        self.q as f64
    }

    /// Second derivative of the log density.
    pub fn d2log_density(&self, x: f64) -> f64 {
        let tilt = if self.q == 0 {
            0.0
        } else {
            let m = mills_ratio(x);
            self.qf() * m * (m - x)
        };
        tilt - (self.a - 1.0) / (x * x) - 2.0 * self.b - 2.0 * self.d / (x * x * x)
    }
}

impl LogDensity for TiltedDensityParams {
    fn log_density(&self, x: f64) -> f64 {
        let tilt = if self.q == 0 {
            0.0
        } else {
            -self.qf() * log_std_normal_cdf(-x)
        };
        let power = if self.a == 1.0 { 0.0 } else { (self.a - 1.0) * x.ln() };
        let inv = if self.d == 0.0 { 0.0 } else { self.d / x };
        tilt + power - self.b * x * x - self.c * x - inv
    }

    fn dlog_density(&self, x: f64) -> f64 {
        let tilt = if self.q == 0 { 0.0 } else { self.qf() * mills_ratio(x) };
        let power = if self.a == 1.0 { 0.0 } else { (self.a - 1.0) / x };
        let inv = if self.d == 0.0 { 0.0 } else { self.d / (x * x) };
        tilt + power - 2.0 * self.b * x - self.c + inv
    }
}

fn require_support(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param("x", x, "must be finite and > 0"))
    }
}

/// Unnormalized log density at `x > 0`.
pub fn log_density(params: &TiltedDensityParams, x: f64) -> Result<f64> {
    require_support(x)?;
    Ok(params.log_density(x))
}

/// Derivative of [`log_density`] at `x > 0`.
pub fn dlog_density(params: &TiltedDensityParams, x: f64) -> Result<f64> {
    require_support(x)?;
    Ok(params.dlog_density(x))
}

/// Whether the parameters give an integrable, log-concave density.
///
/// For `q >= 1`: `a >= 1`, `b >= q/2`, `c > 0` and `d = 0`. For `q = 0`: the
/// gamma/GIG/MHN conditions `a >= 1`, `b >= 0`, `d >= 0`, plus `b > 0` or
/// `c > 0` for a decaying tail.
pub fn prop1_logconcavity_check(params: &TiltedDensityParams) -> bool {
    let TiltedDensityParams { q, a, b, c, d } = *params;
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return false;
    }
    if q >= 1 {
        a >= 1.0 && 2.0 * b >= q as f64 && c > 0.0 && d == 0.0
    } else {
        a >= 1.0 && b >= 0.0 && d >= 0.0 && (b > 0.0 || c > 0.0)
    }
}

/// Positive root of `k/x - ε x - c` (for `k >= 0`, `ε >= 0`), without cancellation.
fn sandwich_root(k: f64, eps: f64, c: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    2.0 * k / (c + (c * c + 4.0 * k * eps).sqrt())
}

/// Interval `(lower, upper)` containing the mode, from the roots of the
/// derivative sandwich. `lower = 0` when `a = 1`.
pub fn prop2_mode_bounds(params: &TiltedDensityParams) -> Result<(f64, f64)> {
    if !prop1_logconcavity_check(params) {
        return Err(Error::NotLogConcave(format!("{params:?} fails the log-concavity gate")));
    }
    if params.d != 0.0 {
        return Err(Error::param("d", params.d, "mode bounds need d = 0"));
    }
    let eps = 2.0 * params.b - params.qf();
    if !(params.c > 0.0 || eps > 0.0) {
        return Err(Error::param("c", params.c, "mode bounds need c > 0 or 2b > q"));
    }
    let lower = sandwich_root(params.a - 1.0, eps, params.c);
    let upper = sandwich_root(params.a - 1.0 + params.qf(), eps, params.c);
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::param("a", params.a, "mode is at the boundary"));
    }
    Ok((lower, upper))
}

/// Mode by bisection of the derivative inside `[lo, hi]`, where the derivative
/// changes sign from positive to negative. Returns `lo` if the derivative is
/// already non-positive there.
pub fn bisect_mode<T: LogDensity + ?Sized>(target: &T, lo: f64, hi: f64) -> f64 {
    let probe = if lo > 0.0 { lo } else { hi * 1e-12 };
    if target.dlog_density(probe) <= 0.0 {
        return lo;
    }
    let (mut lo, mut hi) = (probe, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if target.dlog_density(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mode of a `q = 0` density with `b > 0` and `d > 0` (the derivative runs
/// from `+∞` at 0 to `-∞`).
fn mode_unbounded(params: &TiltedDensityParams) -> f64 {
    let mut hi = 1.0;
    while params.dlog_density(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while params.dlog_density(lo) <= 0.0 {
        lo *= 0.5;
    }
    bisect_mode(params, lo, hi)
}

/// Exact draw from the tilted family.
///
/// `q = 0` dispatches to gamma, GIG, MHN or a mode-informed envelope.
/// `q >= 1` runs adaptive rejection sampling started from the mode-bound
/// interval: its upper end (always right of the mode), the lower end when
/// `a > 1`, and the bisected mode.
pub fn sample_tilted<R: Rng + ?Sized>(params: &TiltedDensityParams, rng: &mut R) -> Result<f64> {
    if !prop1_logconcavity_check(params) {
        return Err(Error::NotLogConcave(format!("{params:?} fails the log-concavity gate")));
    }
    let TiltedDensityParams { q, a, b, c, d } = *params;
    if q == 0 {
        return match (b == 0.0, d == 0.0) {
            (true, true) => sample_gamma(a, c, rng),
            (true, false) => sample_gig(a, 2.0 * c, 2.0 * d, rng),
            (false, true) => sample_mhn(a, b, c, rng),
            (false, false) => {
                let mode = mode_unbounded(params);
                let env =
                    PiecewiseExpEnvelope::build(params, mode, params.d2log_density(mode), DEFAULT_KNOTS_PER_SIDE, 0.0)?;
                Ok(env.sample(params, rng))
            }
        };
    }
    let (lower, upper) = prop2_mode_bounds(params)?;
    let mode = bisect_mode(params, lower, upper);
    let mut knots = vec![upper];
    if a > 1.0 {
        knots.push(lower);
    }
    if mode > 0.0 {
        knots.push(mode);
    }
    ars_sample(params, &knots, 0.0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;

    fn p(q: u32, a: f64, b: f64, c: f64) -> TiltedDensityParams {
        TiltedDensityParams::new(q, a, b, c, 0.0)
    }

    #[test]
    fn exponential_log_density() {
        assert_eq!(log_density(&p(0, 1.0, 0.0, 1.0), 2.0).unwrap(), -2.0);
        assert!(log_density(&p(0, 1.0, 0.0, 1.0), 0.0).is_err());
        assert!(dlog_density(&p(0, 1.0, 0.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn high_precision_reference_value() {
        // 50-digit evaluation of -2 log Φ(-1) + 2 log 1 - 2 - 1
        assert_relative_eq!(
            log_density(&p(2, 3.0, 2.0, 1.0), 1.0).unwrap(),
            0.682_043_290_018_527_011_54,
            epsilon = 1e-13
        );
    }

    #[test]
    fn gamma_mode_zeroes_derivative() {
        assert_eq!(dlog_density(&p(0, 2.0, 0.0, 2.0), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            TiltedDensityParams::new(2, 3.0, 2.0, 1.0, 0.0),
            TiltedDensityParams::new(0, 1.5, 0.7, -0.3, 0.4),
            TiltedDensityParams::new(5, 1.0, 2.5, 0.2, 0.0),
        ];
        for t in cases {
            let h = 1e-5;
            for x in [0.3, 1.0, 4.0] {
                let fd = (t.log_density(x + h) - t.log_density(x - h)) / (2.0 * h);
                assert_relative_eq!(t.dlog_density(x), fd, max_relative = 1e-6);
                let fd2 = (t.dlog_density(x + h) - t.dlog_density(x - h)) / (2.0 * h);
                assert_relative_eq!(t.d2log_density(x), fd2, max_relative = 1e-5, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn mills_ratio_cancels_the_quadratic_term() {
        // m(x) - x = 1/x - 2/x³ + O(x⁻⁵), so the derivative tends to -1 like -1 + 1/x
        let x = 30.0;
        let d = dlog_density(&p(1, 1.0, 0.5, 1.0), x).unwrap();
        assert!((d - (-1.0 + 1.0 / x - 2.0 / (x * x * x))).abs() < 1e-6, "{d}");
    }

    #[test]
    fn gate_examples() {
        assert!(prop1_logconcavity_check(&p(3, 1.0, 1.5, 0.1)));
        assert!(!prop1_logconcavity_check(&p(1, 0.5, 1.0, 1.0)));
        assert!(prop1_logconcavity_check(&p(0, 2.0, 1.0, 0.0)));
        assert!(!prop1_logconcavity_check(&p(2, 1.0, 0.999, 1.0)));
        assert!(!prop1_logconcavity_check(&p(2, 1.0, 1.0, 0.0)));
        assert!(!prop1_logconcavity_check(&TiltedDensityParams::new(
            1, 2.0, 1.0, 1.0, 0.5
        )));
    }

    #[test]
    fn mode_bound_examples() {
        let (lo, hi) = prop2_mode_bounds(&p(1, 2.0, 0.5, 1.0)).unwrap();
        assert_relative_eq!(lo, 1.0);
        assert_relative_eq!(hi, 2.0);
        let (lo, hi) = prop2_mode_bounds(&p(2, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi, 2.0);
        let (lo, hi) = prop2_mode_bounds(&p(1, 3.0, 0.5, 2.0)).unwrap();
        assert_relative_eq!(lo, 1.0);
        assert_relative_eq!(hi, 1.5);
        let t = p(1, 3.0, 0.5, 2.0);
        let m = bisect_mode(&t, lo, hi);
        assert!(lo < m && m < hi);
        assert!(t.dlog_density(m).abs() < 1e-8);
    }

    #[test]
    fn mode_bounds_with_strict_excess() {
        // 2b > q: the roots of the sandwich functions
        let t = p(2, 3.0, 3.0, 0.5);
        let (lo, hi) = prop2_mode_bounds(&t).unwrap();
        let eps: f64 = 4.0;
        assert_relative_eq!(
            lo,
            ((0.25 + 4.0 * 2.0 * eps).sqrt() - 0.5) / (2.0 * eps),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            hi,
            ((0.25 + 4.0 * 4.0 * eps).sqrt() - 0.5) / (2.0 * eps),
            max_relative = 1e-14
        );
        let m = bisect_mode(&t, lo, hi);
        assert!(lo < m && m < hi);
        assert!(prop2_mode_bounds(&TiltedDensityParams::new(1, 2.0, 1.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn q_zero_dispatch_gamma_mean() {
        let mut rng = RngStream::new(1, 0);
        let n = 40_000;
        let mean = (0..n)
            .map(|_| sample_tilted(&p(0, 2.0, 0.0, 3.0), &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        // sd 2/9 / sqrt(n)
        assert!(
            (mean - 2.0 / 3.0).abs() < 4.0 * (2.0f64 / 9.0 / n as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn sampler_rejects_non_log_concave() {
        let mut rng = RngStream::new(2, 0);
        assert!(matches!(
            sample_tilted(&p(1, 0.5, 1.0, 1.0), &mut rng),
            Err(Error::NotLogConcave(_))
        ));
    }

    #[test]
    fn all_dispatch_branches_draw_positive() {
        let mut rng = RngStream::new(3, 0);
        let cases = [
            TiltedDensityParams::new(0, 2.0, 0.0, 1.0, 0.0),
            TiltedDensityParams::new(0, 2.0, 0.0, 1.0, 1.0),
            TiltedDensityParams::new(0, 2.0, 1.0, -1.0, 0.0),
            TiltedDensityParams::new(0, 2.0, 1.0, -1.0, 1.0),
            TiltedDensityParams::new(1, 1.0, 0.5, 1.0, 0.0),
            TiltedDensityParams::new(4, 5.0, 2.5, 0.5, 0.0),
            TiltedDensityParams::new(40, 40.0, 30.0, 1e-3, 0.0),
        ];
        for t in cases {
            for _ in 0..200 {
                let x = sample_tilted(&t, &mut rng).unwrap();
                assert!(x > 0.0 && x.is_finite(), "{t:?} gave {x}");
            }
        }
    }
}
