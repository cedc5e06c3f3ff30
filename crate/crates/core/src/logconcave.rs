//! Rejection samplers for log-concave densities on `(lower, ∞)`.
//!
//! Two strategies share one piecewise-exponential hull type:
//!
//! * [`PiecewiseExpEnvelope::build`] places tangent knots around the mode at
//!   multiples of the Taylor scale `s = |(log f)''(x*)|^{-1/2}` and is never
//!   refined ("adapted" to the target rather than adaptive).
//! * [`ars_sample`] is classic adaptive rejection sampling: the hull is
//!   refined with every rejected proposal and a chord squeeze avoids most
//!   density evaluations.

use rand::Rng;

use crate::error::{Error, Result};

/// Default number of outer knots on each side of the mode.
pub const DEFAULT_KNOTS_PER_SIDE: usize = 2;

/// Curvature magnitudes below this are treated as degenerate.
const MIN_CURVATURE: f64 = 1e-12;

/// Upper bound on hull size during adaptive rejection sampling.
const MAX_ARS_KNOTS: usize = 64;

/// An unnormalized log density together with its first derivative.
pub trait LogDensity {
    fn log_density(&self, x: f64) -> f64;
    fn dlog_density(&self, x: f64) -> f64;
}

impl<T: LogDensity + ?Sized> LogDensity for &T {
    fn log_density(&self, x: f64) -> f64 {
        (**self).log_density(x)
    }
    fn dlog_density(&self, x: f64) -> f64 {
        (**self).dlog_density(x)
    }
}

/// Adapts a pair of closures into a [`LogDensity`].
#[derive(Clone, Copy)]
pub struct FnDensity<F, G> {
    pub log_f: F,
    pub dlog_f: G,
}

impl<F, G> LogDensity for FnDensity<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn log_density(&self, x: f64) -> f64 {
        (self.log_f)(x)
    }
    fn dlog_density(&self, x: f64) -> f64 {
        (self.dlog_f)(x)
    }
}

/// Piecewise-linear upper hull of a concave log density built from tangent
/// lines, exponentiated into a piecewise-exponential proposal.
#[derive(Clone, Debug)]
pub struct PiecewiseExpEnvelope {
    knots: Vec<f64>,
    heights: Vec<f64>,
    slopes: Vec<f64>,
    /// `bounds[i]..bounds[i + 1]` is the segment governed by knot `i`.
    bounds: Vec<f64>,
    log_masses: Vec<f64>,
    cumulative: Vec<f64>,
    log_total_mass: f64,
}

impl PiecewiseExpEnvelope {
    /// Tangent hull through the given knots on `(lower, ∞)`.
    ///
    /// Knots below `lower`, duplicates, and knots where the target is not
    /// finite are dropped. Fails if the rightmost surviving tangent does not
    /// decrease (the hull would have infinite mass).
    pub fn from_knots<T: LogDensity + ?Sized>(target: &T, knots: &[f64], lower: f64) -> Result<Self> {
        let mut points: Vec<(f64, f64, f64)> = knots
            .iter()
            .copied()
            .filter(|&x| x.is_finite() && x >= lower)
            .filter_map(|x| {
                let h = target.log_density(x);
                let dh = target.dlog_density(x);
                (h.is_finite() && dh.is_finite()).then_some((x, h, dh))
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        Self::from_points(&points, lower)
    }

    fn from_points(points: &[(f64, f64, f64)], lower: f64) -> Result<Self> {
        let Some(&(_, _, last_slope)) = points.last() else {
            return Err(Error::InfiniteEnvelope("no usable knots".into()));
        };
        if !(last_slope < 0.0) {
            return Err(Error::InfiniteEnvelope(format!(
                "rightmost tangent slope {last_slope} is not negative"
            )));
        }

        let knots: Vec<f64> = points.iter().map(|p| p.0).collect();
        let heights: Vec<f64> = points.iter().map(|p| p.1).collect();
        let slopes: Vec<f64> = points.iter().map(|p| p.2).collect();

        let mut bounds = Vec::with_capacity(knots.len() + 1);
        bounds.push(lower);
        for i in 0..knots.len() - 1 {
            bounds.push(tangent_intersection(
                (knots[i], heights[i], slopes[i]),
                (knots[i + 1], heights[i + 1], slopes[i + 1]),
            ));
        }
        bounds.push(f64::INFINITY);

        let log_masses: Vec<f64> = (0..knots.len())
            .map(|i| {
                let left = bounds[i];
                let h_left = heights[i] + slopes[i] * (left - knots[i]);
                segment_log_mass(h_left, slopes[i], bounds[i + 1] - left)
            })
            .collect();

        let log_total_mass = log_sum_exp(&log_masses);
        let mut cumulative = Vec::with_capacity(log_masses.len());
        let mut acc = 0.0;
        for lm in &log_masses {
            acc += (lm - log_total_mass).exp();
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }

        Ok(Self {
            knots,
            heights,
            slopes,
            bounds,
            log_masses,
            cumulative,
            log_total_mass,
        })
    }

    /// Mode-informed hull: knots at `x*`, `x* ± s/2` and `x* ± k s` for
    /// `k = 1..=per_side`, where `s = |curvature|^{-1/2}`. Knots below the
    /// support are dropped; if none is left below the mode, one is placed
    /// halfway between the lower bound and the mode.
    pub fn build<T: LogDensity + ?Sized>(
        target: &T,
        mode: f64,
        curvature: f64,
        per_side: usize,
        lower: f64,
    ) -> Result<Self> {
        if !mode.is_finite() || mode < lower {
            return Err(Error::param("mode", mode, "must be finite and inside the support"));
        }
        if !(curvature < 0.0) || !curvature.is_finite() {
            return Err(Error::NotLogConcave(format!(
                "curvature at the mode is {curvature}, expected a finite negative value"
            )));
        }
        #[cfg(debug_assertions)]
        debug_check_concave(target, mode, curvature, lower);

        let s = (-curvature).powf(-0.5);
        let mut knots = Vec::with_capacity(2 * per_side + 3);
        knots.push(mode);
        knots.push(mode + 0.5 * s);
        knots.push(mode - 0.5 * s);
        for k in 1..=per_side {
            knots.push(mode + k as f64 * s);
            knots.push(mode - k as f64 * s);
        }
        knots.retain(|&x| x > lower || x == mode);
        if mode > lower && !knots.iter().any(|&x| x < mode) {
            knots.push(0.5 * (lower + mode));
        }
        Self::from_knots(target, &knots, lower)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Segment boundaries: `lower`, the tangent intersections, then `∞`.
    pub fn segment_bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn segment_log_masses(&self) -> &[f64] {
        &self.log_masses
    }

    pub fn log_total_mass(&self) -> f64 {
        self.log_total_mass
    }

    /// Hull value at `x` (log scale).
    pub fn log_envelope(&self, x: f64) -> f64 {
        let i = self.segment_index(x);
        self.heights[i] + self.slopes[i] * (x - self.knots[i])
    }

    fn segment_index(&self, x: f64) -> usize {
        // bounds[1..] are right ends; the first right end >= x owns x.
        let i = self.bounds[1..].partition_point(|&b| b < x);
        i.min(self.knots.len() - 1)
    }

    /// One draw from the normalized piecewise-exponential proposal.
    pub fn sample_proposal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c < u).min(self.knots.len() - 1);
        let v: f64 = rng.random();
        let left = self.bounds[i];
        let right = self.bounds[i + 1];
        let b = self.slopes[i];
        let x = if right.is_infinite() {
            left + (-v).ln_1p() / b
        } else {
            let w = right - left;
            if b == 0.0 || (b * w).abs() < 1e-300 {
                left + v * w
            } else if b < 0.0 {
                left + (v * (b * w).exp_m1()).ln_1p() / b
            } else {
                right + ((1.0 - v) * (-b * w).exp_m1()).ln_1p() / b
            }
        };
        x.clamp(left, right)
    }

    /// Exact draw from the target by rejection against this hull.
    pub fn sample<T: LogDensity + ?Sized, R: Rng + ?Sized>(&self, target: &T, rng: &mut R) -> f64 {
        self.sample_counted(target, rng).0
    }

    /// Like [`sample`](Self::sample), also returning the number of proposals used.
    pub fn sample_counted<T: LogDensity + ?Sized, R: Rng + ?Sized>(&self, target: &T, rng: &mut R) -> (f64, u64) {
        let mut proposals = 0u64;
        loop {
            proposals += 1;
            let x = self.sample_proposal(rng);
            let u: f64 = rng.random();
            if u.ln() <= target.log_density(x) - self.log_envelope(x) {
                return (x, proposals);
            }
        }
    }

    /// Chord (lower hull) between neighbouring knots; `-∞` outside the knot range.
    fn log_squeeze(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if n < 2 || x < self.knots[0] || x > self.knots[n - 1] {
            return f64::NEG_INFINITY;
        }
        let j = self.knots.partition_point(|&k| k < x);
        if j == 0 {
            return self.heights[0];
        }
        let (x0, x1) = (self.knots[j - 1], self.knots[j]);
        let (h0, h1) = (self.heights[j - 1], self.heights[j]);
        h0 + (h1 - h0) * (x - x0) / (x1 - x0)
    }
}

fn tangent_intersection(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let (xa, ha, da) = a;
    let (xb, hb, db) = b;
    let ds = da - db;
    // For a concave target the crossing lies between the two knots.
    if !(ds.abs() > 1e-12 * (da.abs() + db.abs()).max(1e-300)) {
        return 0.5 * (xa + xb);
    }
    let z = (hb - ha - xb * db + xa * da) / ds;
    if z.is_finite() {
        z.clamp(xa, xb)
    } else {
        0.5 * (xa + xb)
    }
}

/// `log ∫_0^w exp(h + b t) dt`, stable for every sign of `b`.
fn segment_log_mass(h: f64, b: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if w.is_infinite() {
        debug_assert!(b < 0.0);
        return h - (-b).ln();
    }
    let bw = b * w;
    if bw == 0.0 {
        h + w.ln()
    } else if b > 0.0 {
        h + bw + (-(-bw).exp_m1()).ln() - b.ln()
    } else {
        h + (-bw.exp_m1()).ln() - (-b).ln()
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(debug_assertions)]
fn debug_check_concave<T: LogDensity + ?Sized>(target: &T, mode: f64, curvature: f64, lower: f64) {
    let s = (-curvature).powf(-0.5);
    let mut prev = f64::INFINITY;
    for k in -4..=4 {
        let x = mode + 0.5 * k as f64 * s;
        if x <= lower {
            continue;
        }
        let d = target.dlog_density(x);
        debug_assert!(
            d <= prev + 1e-8 * (1.0 + d.abs().max(prev.abs().min(1e300))),
            "log density derivative increases near x = {x}"
        );
        prev = d;
    }
}

/// Draw from a log-concave target using the mode-informed hull, falling back
/// to adaptive rejection sampling when the curvature at the mode is too flat
/// to give a usable Taylor scale.
pub fn sample_mode_informed<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    target: &T,
    mode: f64,
    curvature: f64,
    per_side: usize,
    rng: &mut R,
) -> Result<f64> {
    if curvature.is_finite() && curvature < -MIN_CURVATURE {
        let env = PiecewiseExpEnvelope::build(target, mode, curvature, per_side, 0.0)?;
        return Ok(env.sample(target, rng));
    }
    let base = if mode > 0.0 { mode } else { 1.0 };
    ars_sample(target, &[0.5 * base, base, 2.0 * base], 0.0, rng)
}

/// Running totals for an adaptive rejection sampler.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ArsStats {
    pub proposals: u64,
    pub density_evaluations: u64,
    pub knots_added: u64,
}

/// One exact draw by Gilks–Wild adaptive rejection sampling on `(lower, ∞)`.
///
/// `init_knots` must include at least one point where the log density is
/// decreasing; otherwise the initial hull has infinite mass.
pub fn ars_sample<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    target: &T,
    init_knots: &[f64],
    lower: f64,
    rng: &mut R,
) -> Result<f64> {
    let mut sampler = AdaptiveRejectionSampler::new(target, init_knots, lower)?;
    Ok(sampler.sample(rng))
}

/// Adaptive rejection sampler whose hull persists across draws.
pub struct AdaptiveRejectionSampler<'a, T: ?Sized> {
    target: &'a T,
    lower: f64,
    points: Vec<(f64, f64, f64)>,
    hull: PiecewiseExpEnvelope,
    stats: ArsStats,
}

impl<'a, T: LogDensity + ?Sized> AdaptiveRejectionSampler<'a, T> {
    pub fn new(target: &'a T, init_knots: &[f64], lower: f64) -> Result<Self> {
        let hull = PiecewiseExpEnvelope::from_knots(target, init_knots, lower)?;
        let points = hull
            .knots
            .iter()
            .zip(&hull.heights)
            .zip(&hull.slopes)
            .map(|((&x, &h), &d)| (x, h, d))
            .collect();
        Ok(Self {
            target,
            lower,
            points,
            hull,
            stats: ArsStats::default(),
        })
    }

    pub fn hull(&self) -> &PiecewiseExpEnvelope {
        &self.hull
    }

    pub fn stats(&self) -> ArsStats {
        self.stats
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        loop {
            self.stats.proposals += 1;
            let x = self.hull.sample_proposal(rng);
            let log_u = rng.random::<f64>().ln();
            let upper = self.hull.log_envelope(x);
            if log_u <= self.hull.log_squeeze(x) - upper {
                return x;
            }
            self.stats.density_evaluations += 1;
            let h = self.target.log_density(x);
            if log_u <= h - upper {
                return x;
            }
            self.refine(x, h);
        }
    }

    fn refine(&mut self, x: f64, h: f64) {
        if self.points.len() >= MAX_ARS_KNOTS || !h.is_finite() {
            return;
        }
        let dh = self.target.dlog_density(x);
        if !dh.is_finite() {
            return;
        }
        let pos = self.points.partition_point(|p| p.0 < x);
        if self.points.get(pos).is_some_and(|p| p.0 == x) {
            return;
        }
        self.points.insert(pos, (x, h, dh));
        // The old hull stays valid if a rebuild fails on round-off.
        if let Ok(hull) = PiecewiseExpEnvelope::from_points(&self.points, self.lower) {
            self.hull = hull;
            self.stats.knots_added += 1;
        } else {
            self.points.remove(pos);
        }
    }
}
