//! Scalar special functions: the standard normal CDF and its logarithm,
//! the normal hazard (Mills ratio), and the upper incomplete gamma function
//! at shape one half.
//!
//! Every density in this crate that carries a `Φ(-x)^{-q}` factor goes
//! through [`log_std_normal_cdf`], so that is where the tail accuracy lives.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `ln(√(2π))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

/// Below this point `log Φ(x)` switches from `erfc` to the continued fraction.
const LOG_CDF_TAIL_SWITCH: f64 = -5.0;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    log_std_normal_pdf(x).exp()
}

#[inline]
pub fn log_std_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF `Φ(x)`.
///
/// The complementary error function is evaluated on the side where the
/// result is small, so neither tail loses relative precision to cancellation.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    }
}

/// `Φ(-t) / φ(t)` for `t > 0` by Lentz's method on the classical continued
/// fraction `1/(t + 1/(t + 2/(t + 3/(t + ...))))`.
fn mills_reciprocal_cf(t: f64) -> f64 {
    debug_assert!(t > 0.0);
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..2000 {
        let a = k as f64;
        d = t + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = t + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `log Φ(x)` without underflow anywhere on the real line.
///
/// For `x < -5` this uses `log φ(x) + log(Φ(x)/φ(x))` with the Mills ratio
/// from its continued fraction; above that it uses `erfc` directly.
pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if x < LOG_CDF_TAIL_SWITCH {
        log_std_normal_pdf(x) + mills_reciprocal_cf(-x).ln()
    } else if x > 5.0 {
        (-std_normal_cdf(-x)).ln_1p()
    } else {
        std_normal_cdf(x).ln()
    }
}

/// The standard normal hazard `φ(x) / Φ(-x)`.
///
/// Computed in log space; for `x > 0` the result lies strictly inside
/// Gordon's interval `(x, x + 1/x)`.
pub fn mills_ratio(x: f64) -> f64 {
    if x > -LOG_CDF_TAIL_SWITCH {
        // log φ(x) - log Φ(-x) collapses to the reciprocal continued fraction.
        1.0 / mills_reciprocal_cf(x)
    } else {
        (log_std_normal_pdf(x) - log_std_normal_cdf(-x)).exp()
    }
}

/// Derivative of [`mills_ratio`]: `m'(x) = m(x) (m(x) - x)`.
pub fn mills_ratio_derivative(x: f64) -> f64 {
    let m = mills_ratio(x);
    m * (m - x)
}

/// `Γ_U(1/2, x) = ∫_x^∞ t^{-1/2} e^{-t} dt`, via `Γ_U(1/2, x) = 2√π Φ(-√(2x))`.
pub fn upper_incomplete_gamma_half(x: f64) -> f64 {
    ln_upper_incomplete_gamma_half(x).exp()
}

/// Natural log of [`upper_incomplete_gamma_half`]; finite for every finite `x >= 0`.
pub fn ln_upper_incomplete_gamma_half(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "Γ_U(1/2, x) needs x >= 0");
    (2.0 * PI.sqrt()).ln() + log_std_normal_cdf(-(2.0 * x).sqrt())
}

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from 50-digit arithmetic.
    const LOG_PHI_M10: f64 = -53.231_285_150_512_470_578;
    const LOG_PHI_M30: f64 = -454.321_243_956_343_197_107;
    const LOG_PHI_M38: f64 = -726.557_216_018_820_130_097;
    const LOG_PHI_M5: f64 = -15.064_998_393_988_725_736;

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_relative_eq!(log_std_normal_cdf(0.0), 0.5f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn cdf_reference_points() {
        assert_relative_eq!(
            std_normal_cdf(-1.959964),
            0.024_999_999_096_442_404_3,
            max_relative = 1e-12
        );
        assert_relative_eq!(std_normal_cdf(3.0), 0.998_650_101_968_369_905_47, max_relative = 1e-12);
    }

    #[test]
    fn log_cdf_deep_tail() {
        assert_relative_eq!(log_std_normal_cdf(-10.0), LOG_PHI_M10, epsilon = 1e-10);
        assert_relative_eq!(log_std_normal_cdf(-30.0), LOG_PHI_M30, epsilon = 1e-10);
        assert_relative_eq!(log_std_normal_cdf(-38.0), LOG_PHI_M38, epsilon = 1e-10);
        assert_relative_eq!(log_std_normal_cdf(-5.0), LOG_PHI_M5, epsilon = 1e-10);
        // just either side of the branch switch
        let below = log_std_normal_cdf(-5.0 - 1e-9);
        let above = log_std_normal_cdf(-5.0 + 1e-9);
        assert!(below < above && above - below < 1e-7);
    }

    #[test]
    fn log_cdf_matches_five_term_asymptotic_series() {
        let x: f64 = 30.0;
        let x2 = x * x;
        let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
        let asymptotic = log_std_normal_pdf(x) - x.ln() + series.ln();
        assert!((log_std_normal_cdf(-x) - asymptotic).abs() < 1e-8);
    }

    #[test]
    fn log_cdf_far_beyond_documented_range() {
        // Tiny sigma2 in the scale conditionals pushes arguments this far out.
        let v = log_std_normal_cdf(-500.0);
        assert!(v.is_finite());
        assert_relative_eq!(v, -125_000.0 - LN_SQRT_2PI - 500f64.ln(), epsilon = 1e-3);
    }

    #[test]
    fn mills_ratio_reference_points() {
        assert_relative_eq!(mills_ratio(0.0), 0.797_884_560_802_865_355_88, epsilon = 1e-14);
        let m5 = mills_ratio(5.0);
        assert!(m5 > 5.0 && m5 < 5.2);
        assert_relative_eq!(m5, 5.186_503_967_125_842_115_6, max_relative = 1e-13);
        let m20 = mills_ratio(20.0);
        assert!(m20 > 20.0 && m20 < 20.05);
        assert_relative_eq!(m20, 20.049_753_068_527_850_542, max_relative = 1e-13);
    }

    #[test]
    fn mills_ratio_is_finite_where_the_direct_ratio_overflows() {
        for x in [40.0, 100.0, 1e3, 1e6] {
            let m = mills_ratio(x);
            assert!(m > x && m < x + 1.0 / x, "x = {x}, m = {m}");
        }
    }

    #[test]
    fn mills_derivative_matches_finite_differences() {
        for x in [-2.0, 0.0, 0.7, 3.0, 4.9, 5.1, 12.0] {
            let h = 1e-5;
            let fd = (mills_ratio(x + h) - mills_ratio(x - h)) / (2.0 * h);
            assert_relative_eq!(mills_ratio_derivative(x), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn incomplete_gamma_half_reference_points() {
        assert_relative_eq!(upper_incomplete_gamma_half(0.0), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            upper_incomplete_gamma_half(0.5),
            0.562_418_231_594_407_124_279,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            upper_incomplete_gamma_half(8.0),
            1.122_716_291_001_465_580_4e-4,
            max_relative = 1e-11
        );
    }

    #[test]
    fn symmetry_invariant() {
        for i in 0..=1600 {
            let x = -8.0 + i as f64 * 0.01;
            let s = std_normal_cdf(x) + std_normal_cdf(-x);
            assert!((s - 1.0).abs() <= 1e-13, "x = {x}: {s}");
        }
    }

    #[test]
    fn gordon_bounds_hold_strictly() {
        for i in 1..=3000 {
            let x = i as f64 * 0.01;
            let m = mills_ratio(x);
            assert!(x < m && m < x + 1.0 / x, "x = {x}, m = {m}");
        }
        assert!(mills_ratio(0.0) > 0.0);
    }

    #[test]
    fn log_cdf_is_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=9200 {
            let x = -38.0 + i as f64 * 0.005;
            let v = log_std_normal_cdf(x);
            assert!(v >= prev, "x = {x}");
            prev = v;
        }
    }
}
