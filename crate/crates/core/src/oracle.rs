//! Brute-force reference distributions for checking the samplers.
//!
//! Everything here evaluates unnormalized log densities on grids and never
//! calls a sampler's internals: 1-D CDF tables by quadrature with grid
//! doubling, a one-sample Kolmogorov–Smirnov test, a 2-D grid for two-coefficient
//! posteriors, the inverse-gamma-proposal counterexample, and a check battery.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{format_float, l1_coefficient, PriorForm, RegressionData};
use crate::special::{ln_gamma, ln_upper_incomplete_gamma_half};

/// Largest node count tried while waiting for the mass to settle.
const MAX_NODES: usize = 1 << 23;

/// Relative mass / absolute CDF change accepted between successive doublings.
pub const MASS_TOLERANCE: f64 = 1e-6;

/// Log-density drop below the peak that counts as "no mass left".
const TAIL_DROP: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadRule {
    /// Composite trapezoid.
    Trapezoid,
    /// Adaptive Simpson inside every cell.
    Adaptive,
}

/// A 1-D integration grid. With `log_spacing` the nodes are uniform in
/// `log x`, which suits positive targets with heavy tails or a pole at 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub lower: f64,
    pub upper: f64,
    /// Number of cells at the first attempt.
    pub nodes: usize,
    pub rule: QuadRule,
    pub log_spacing: bool,
}

impl QuadratureGrid {
    pub fn linear(lower: f64, upper: f64, nodes: usize) -> Self {
        Self {
            lower,
            upper,
            nodes,
            rule: QuadRule::Trapezoid,
            log_spacing: false,
        }
    }

    pub fn logarithmic(lower: f64, upper: f64, nodes: usize) -> Self {
        Self {
            log_spacing: true,
            ..Self::linear(lower, upper, nodes)
        }
    }

    fn to_u(&self, x: f64) -> f64 {
        if self.log_spacing {
            x.ln()
        } else {
            x
        }
    }
}

/// Normalized CDF on a grid, linearly interpolated between nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    log_mass: f64,
    rel_change: f64,
}

impl CdfTable {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    /// Log of the integral of `exp(log_f)` over the grid.
    pub fn log_mass(&self) -> f64 {
        self.log_mass
    }

    /// Largest CDF (or relative mass) change at the last grid doubling.
    pub fn rel_change(&self) -> f64 {
        self.rel_change
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.cdf[i] + w * (self.cdf[i + 1] - self.cdf[i])
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= 0.0 {
            return self.xs[0];
        }
        if u >= 1.0 {
            return self.xs[n - 1];
        }
        let i = (self.cdf.partition_point(|&c| c < u)).clamp(1, n - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        if c1 <= c0 {
            return self.xs[i];
        }
        self.xs[i - 1] + (u - c0) / (c1 - c0) * (self.xs[i] - self.xs[i - 1])
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random())
    }

    pub fn mean(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.cdf.windows(2))
            .map(|(x, c)| 0.5 * (x[0] + x[1]) * (c[1] - c[0]))
            .sum()
    }

    fn from_cells(xs: Vec<f64>, cells: &[f64], log_shift: f64, rel_change: f64) -> Result<Self> {
        let total: f64 = cells.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Quadrature(format!("grid mass is {total}")));
        }
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for c in cells {
            acc += c;
            cdf.push(acc / total);
        }
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(Self {
            xs,
            cdf,
            log_mass: total.ln() + log_shift,
            rel_change,
        })
    }
}

/// Log density in the grid coordinate `u` (adds `log x` under log spacing).
fn log_g<F: Fn(f64) -> f64>(log_f: &F, grid: &QuadratureGrid, u: f64) -> (f64, f64) {
    if grid.log_spacing {
        let x = u.exp();
        (x, log_f(x) + u)
    } else {
        (u, log_f(u))
    }
}

fn clean(v: f64) -> Result<f64> {
    if v.is_nan() || v == f64::NEG_INFINITY {
        Ok(f64::NEG_INFINITY)
    } else if v == f64::INFINITY {
        Err(Error::Quadrature("log density is +inf on the grid".into()))
    } else {
        Ok(v)
    }
}

fn adaptive_simpson<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Cell masses (scaled by `exp(-shift)`) for `cells` uniform cells.
fn cell_masses<F: Fn(f64) -> f64>(
    log_f: &F,
    grid: &QuadratureGrid,
    cells: usize,
    shift: Option<f64>,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let (ulo, uhi) = (grid.to_u(grid.lower), grid.to_u(grid.upper));
    if !(ulo < uhi) || !ulo.is_finite() || !uhi.is_finite() {
        return Err(Error::Quadrature(format!("bad grid [{}, {}]", grid.lower, grid.upper)));
    }
    let h = (uhi - ulo) / cells as f64;
    let mut xs = Vec::with_capacity(cells + 1);
    let mut lv = Vec::with_capacity(cells + 1);
    for i in 0..=cells {
        let u = if i == cells { uhi } else { ulo + h * i as f64 };
        let (x, v) = log_g(log_f, grid, u);
        xs.push(x);
        lv.push(clean(v)?);
    }
    let shift = shift.unwrap_or_else(|| lv.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if !shift.is_finite() {
        return Err(Error::Quadrature("log density is -inf everywhere on the grid".into()));
    }
    let ev: Vec<f64> = lv.iter().map(|v| (v - shift).exp()).collect();
    let masses = match grid.rule {
        QuadRule::Trapezoid => ev.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).collect(),
        QuadRule::Adaptive => {
            let g = |u: f64| (clean(log_g(log_f, grid, u).1).unwrap_or(f64::NEG_INFINITY) - shift).exp();
            (0..cells)
                .map(|i| {
                    let a = ulo + h * i as f64;
                    let b = if i + 1 == cells { uhi } else { a + h };
                    let fm = g(0.5 * (a + b));
                    let whole = (b - a) / 6.0 * (ev[i] + 4.0 * fm + ev[i + 1]);
                    adaptive_simpson(&g, a, b, ev[i], fm, ev[i + 1], whole, 1e-13 * h.max(whole.abs()), 30)
                })
                .collect()
        }
    };
    Ok((xs, masses, shift))
}

/// Normalized CDF of `exp(log_f)` on `grid`, doubling the node count until
/// both the total mass (relative) and the CDF at shared nodes move by less
/// than [`MASS_TOLERANCE`].
pub fn quadrature_cdf<F: Fn(f64) -> f64>(log_f: F, grid: &QuadratureGrid) -> Result<CdfTable> {
    quadrature_cdf_tol(log_f, grid, MASS_TOLERANCE)
}

/// [`quadrature_cdf`] with an explicit doubling tolerance.
pub fn quadrature_cdf_tol<F: Fn(f64) -> f64>(log_f: F, grid: &QuadratureGrid, tol: f64) -> Result<CdfTable> {
    let mut cells = grid.nodes.max(2);
    let (_, mut masses, shift) = cell_masses(&log_f, grid, cells, None)?;
    loop {
        if 2 * cells > MAX_NODES {
            return Err(Error::Quadrature(format!(
                "mass did not stabilize to {tol:e} with {cells} cells on [{}, {}]",
                grid.lower, grid.upper
            )));
        }
        let (xs2, masses2, _) = cell_masses(&log_f, grid, 2 * cells, Some(shift))?;
        let (m1, m2): (f64, f64) = (masses.iter().sum(), masses2.iter().sum());
        let mut change = ((m2 - m1) / m2).abs();
        let (mut a1, mut a2) = (0.0, 0.0);
        for i in 0..cells {
            a1 += masses[i];
            a2 += masses2[2 * i] + masses2[2 * i + 1];
            change = change.max((a1 / m1 - a2 / m2).abs());
        }
        masses = masses2;
        cells *= 2;
        if change <= tol {
            return CdfTable::from_cells(xs2, &masses, shift, change);
        }
    }
}

/// Pick an integration range for `exp(log_f)` on `(support_lo, support_hi)`.
///
/// Starts at `hint ± 12` local Taylor standard deviations (in `log x` when
/// `log_spacing`), widens until the log density has dropped well below its
/// peak at both ends (or the support ends), then trims dead tails.
pub fn auto_grid<F: Fn(f64) -> f64>(
    log_f: F,
    support_lo: f64,
    support_hi: f64,
    hint: f64,
    log_spacing: bool,
) -> Result<QuadratureGrid> {
    let tmp = QuadratureGrid {
        lower: support_lo,
        upper: support_hi,
        nodes: 0,
        rule: QuadRule::Trapezoid,
        log_spacing,
    };
    let (blo, bhi) = if log_spacing {
        (
            if support_lo > 0.0 {
                support_lo.ln()
            } else {
                f64::NEG_INFINITY
            },
            support_hi.ln(),
        )
    } else {
        (support_lo, support_hi)
    };
    let g = |u: f64| clean(log_g(&log_f, &tmp, u).1).unwrap_or(f64::NEG_INFINITY);
    let m = tmp.to_u(hint);
    if !(m.is_finite() && g(m).is_finite()) {
        return Err(Error::Quadrature(format!("log density not finite at the hint {hint}")));
    }
    let step = 1e-4 * m.abs().max(1.0);
    let curv = -(g(m + step) - 2.0 * g(m) + g(m - step)) / (step * step);
    let sd = if curv > 0.0 && curv.is_finite() {
        1.0 / curv.sqrt()
    } else {
        1.0
    };
    let (mut lo, mut hi) = ((m - 12.0 * sd).max(blo), (m + 12.0 * sd).min(bhi));
    const SCAN: usize = 4000;
    let mut centre = m;
    for _ in 0..200 {
        let pts: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
        let vals: Vec<f64> = pts.iter().map(|&u| g(u)).collect();
        let (imax, gmax) = vals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
        centre = pts[imax];
        let thr = gmax - TAIL_DROP;
        let grow_hi = hi < bhi && vals[SCAN] > thr;
        let grow_lo = lo > blo && vals[0] > thr;
        if !grow_hi && !grow_lo {
            let first = vals.iter().position(|&v| v > thr).unwrap_or(0);
            let last = vals.iter().rposition(|&v| v > thr).unwrap_or(SCAN);
            let lo_t = pts[first.saturating_sub(1)];
            let hi_t = pts[(last + 1).min(SCAN)];
            let lower = if log_spacing { lo_t.exp() } else { lo_t };
            let upper = if log_spacing { hi_t.exp() } else { hi_t };
            return Ok(QuadratureGrid {
                lower,
                upper,
                nodes: 4096,
                rule: QuadRule::Trapezoid,
                log_spacing,
            });
        }
        if grow_hi {
            hi = (centre + 2.0 * (hi - centre)).min(bhi);
        }
        if grow_lo {
            lo = (centre - 2.0 * (centre - lo)).max(blo);
        }
        if !(lo.is_finite() && hi.is_finite()) {
            break;
        }
    }
    Err(Error::Quadrature(format!(
        "could not bracket the mass of the target near {}",
        centre
    )))
}

/// [`auto_grid`] followed by [`quadrature_cdf`]; log spacing for targets on
/// a nonnegative half-line.
pub fn oracle_cdf<F: Fn(f64) -> f64>(log_f: F, support_lo: f64, support_hi: f64, hint: f64) -> Result<CdfTable> {
    let log_spacing = support_lo >= 0.0;
    let grid = auto_grid(&log_f, support_lo, support_hi, hint, log_spacing)?;
    quadrature_cdf(&log_f, &grid)
}

/// One-sample Kolmogorov–Smirnov result at the 1% level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub n: usize,
    pub critical: f64,
    pub pass: bool,
}

/// Asymptotic 1% critical value `1.63/√N`.
pub fn ks_critical(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Two-sided KS statistic against a CDF table.
pub fn ks_test(draws: &[f64], table: &CdfTable) -> KsResult {
    ks_test_fn(draws, |x| table.cdf(x))
}

/// Two-sided KS statistic against any CDF.
pub fn ks_test_fn<F: Fn(f64) -> f64>(draws: &[f64], cdf: F) -> KsResult {
    let n = draws.len();
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
    });
    let critical = ks_critical(n);
    KsResult {
        d,
        n,
        critical,
        pass: d < critical,
    }
}

// ---------------------------------------------------------------------------
// Two-dimensional grids

/// Normalized density on a tensor grid with Simpson weights.
#[derive(Clone, Debug)]
pub struct Grid2d {
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    /// Cell probabilities (Simpson weight × density), row-major in `b1`.
    pub prob: Vec<f64>,
    pub log_density: Vec<f64>,
    pub rel_change: f64,
}

/// Evenly spaced odd-length axis on `[lo, hi]` with 0 on an even node when
/// `lo < 0 < hi`, so that kinks on the axes fall on Simpson panel edges.
fn simpson_axis(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let cells = cells + cells % 2;
    let h = (hi - lo) / cells as f64;
    let start = if lo < 0.0 && hi > 0.0 {
        let k = (-lo / h).ceil() as i64;
        -((k + k % 2) as f64) * h
    } else {
        lo
    };
    (0..=cells + 2).map(|i| start + h * i as f64).collect()
}

fn simpson_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

fn grid2d_once<F: Fn(f64, f64) -> f64>(
    log_f: &F,
    r1: (f64, f64),
    r2: (f64, f64),
    cells: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, f64) {
    let b1 = simpson_axis(r1.0, r1.1, cells);
    let b2 = simpson_axis(r2.0, r2.1, cells);
    let mut lv = Vec::with_capacity(b1.len() * b2.len());
    for &x in &b1 {
        for &y in &b2 {
            lv.push(log_f(x, y));
        }
    }
    let h1 = b1[1] - b1[0];
    let h2 = b2[1] - b2[0];
    let (w1, w2) = (simpson_weights(b1.len()), simpson_weights(b2.len()));
    let shift = lv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut mass = 0.0;
    for (i, wi) in w1.iter().enumerate() {
        for (j, wj) in w2.iter().enumerate() {
            mass += wi * wj * (lv[i * b2.len() + j] - shift).exp();
        }
    }
    (b1, b2, lv, (mass * h1 * h2 / 9.0).ln() + shift)
}

/// Normalize `exp(log_f)` on `r1 × r2`, doubling the resolution until the
/// log mass moves by less than [`MASS_TOLERANCE`].
pub fn grid2d<F: Fn(f64, f64) -> f64>(log_f: F, r1: (f64, f64), r2: (f64, f64), cells: usize) -> Result<Grid2d> {
    let mut cells = cells.max(8);
    let mut lm = grid2d_once(&log_f, r1, r2, cells).3;
    loop {
        if cells > 8192 {
            return Err(Error::Quadrature("2-D grid mass did not stabilize".into()));
        }
        cells *= 2;
        let (nb1, nb2, nlv, nlm) = grid2d_once(&log_f, r1, r2, cells);
        let change = (nlm - lm).abs();
        lm = nlm;
        if change <= MASS_TOLERANCE {
            let (b1, b2, lv) = (nb1, nb2, nlv);
            let h = (b1[1] - b1[0]) * (b2[1] - b2[0]) / 9.0;
            let (w1, w2) = (simpson_weights(b1.len()), simpson_weights(b2.len()));
            let mut prob = Vec::with_capacity(lv.len());
            for (i, wi) in w1.iter().enumerate() {
                for (j, wj) in w2.iter().enumerate() {
                    prob.push(wi * wj * h * (lv[i * b2.len() + j] - lm).exp());
                }
            }
            return Ok(Grid2d {
                b1,
                b2,
                prob,
                log_density: lv,
                rel_change: change,
            });
        }
    }
}

impl Grid2d {
    pub fn mean(&self) -> [f64; 2] {
        let n2 = self.b2.len();
        let mut m = [0.0; 2];
        for (k, p) in self.prob.iter().enumerate() {
            m[0] += p * self.b1[k / n2];
            m[1] += p * self.b2[k % n2];
        }
        m
    }

    /// Grid point with the largest density.
    pub fn argmax(&self) -> (f64, f64) {
        let n2 = self.b2.len();
        let k = self
            .log_density
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
            )
            .0;
        (self.b1[k / n2], self.b2[k % n2])
    }

    /// Marginal CDF along axis 0 (`β1`) or 1 (`β2`).
    pub fn marginal(&self, axis: usize) -> Result<CdfTable> {
        let n2 = self.b2.len();
        let (xs, len) = if axis == 0 {
            (&self.b1, self.b1.len())
        } else {
            (&self.b2, n2)
        };
        let mut dens = vec![0.0; len];
        let shift = self.log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w_other = simpson_weights(if axis == 0 { n2 } else { self.b1.len() });
        for (k, v) in self.log_density.iter().enumerate() {
            let (i, j) = (k / n2, k % n2);
            let (mine, other) = if axis == 0 { (i, j) } else { (j, i) };
            dens[mine] += w_other[other] * (v - shift).exp();
        }
        let cells: Vec<f64> = dens
            .windows(2)
            .zip(xs.windows(2))
            .map(|(d, x)| 0.5 * (d[0] + d[1]) * (x[1] - x[0]))
            .collect();
        CdfTable::from_cells(xs.clone(), &cells, 0.0, self.rel_change)
    }
}

/// `-RSS/(2σ²) - λ2|β|²/(2σ²) - c|β|₁` for a two-coefficient dataset, with `c`
/// the ℓ1 coefficient of the prior form.
pub fn beta_log_posterior_2d(
    data: &RegressionData,
    form: PriorForm,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
) -> impl Fn(f64, f64) -> f64 + '_ {
    let c = l1_coefficient(form, sigma2, lambda1);
    move |b1, b2| {
        let beta = DVector::from_vec(vec![b1, b2]);
        -(data.rss(&beta) + lambda2 * (b1 * b1 + b2 * b2)) / (2.0 * sigma2) - c * (b1.abs() + b2.abs())
    }
}

/// Ridge mean and posterior standard deviations at `λ1 = 0`, used for ranges.
fn ridge_moments(
    data: &RegressionData,
    sigma2: f64,
    lambda2: f64,
    extra_diag: &[f64],
) -> Result<(DVector<f64>, Vec<f64>)> {
    let mut a = data.xtx.clone();
    for j in 0..data.p {
        a[(j, j)] += lambda2 + extra_diag.get(j).copied().unwrap_or(0.0);
    }
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Factorization("ridge system".into()))?;
    let mean = chol.solve(&data.xty);
    let inv: DMatrix<f64> = chol.inverse();
    let sds = (0..data.p).map(|j| (sigma2 * inv[(j, j)]).sqrt()).collect();
    Ok((mean, sds))
}

/// Oracle for the two-coefficient posterior of `β` at fixed scale parameters.
pub fn grid2d_beta_posterior(
    data: &RegressionData,
    sigma2: f64,
    lambda1: f64,
    lambda2: f64,
    form: PriorForm,
) -> Result<Grid2d> {
    if data.p != 2 {
        return Err(Error::Data(format!("2-D grid needs p = 2 (got {})", data.p)));
    }
    let (mean, sds) = ridge_moments(data, sigma2, lambda2, &[])?;
    let range = |j: usize| (mean[j].min(0.0) - 10.0 * sds[j], mean[j].max(0.0) + 10.0 * sds[j]);
    grid2d(
        beta_log_posterior_2d(data, form, sigma2, lambda1, lambda2),
        range(0),
        range(1),
        200,
    )
}

/// Difference of one-sided derivatives (second-order stencils) in `β2` across `β2 = 0` at fixed `β1`.
pub fn axis_derivative_jump<F: Fn(f64, f64) -> f64>(log_f: &F, b1: f64, h: f64) -> f64 {
    let f0 = log_f(b1, 0.0);
    let right = (-3.0 * f0 + 4.0 * log_f(b1, h) - log_f(b1, 2.0 * h)) / (2.0 * h);
    let left = (3.0 * f0 - 4.0 * log_f(b1, -h) + log_f(b1, -2.0 * h)) / (2.0 * h);
    right - left
}

// ---------------------------------------------------------------------------
// Inverse-gamma proposal counterexample

/// Inputs of the inverse-gamma-proposal counterexample for the `σ²` conditional
/// `f(σ²) ∝ (σ²)^{-a-1} Γ_U(1/2, λ1²/(8σ²λ2))^{-p} e^{-b/σ²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixAParams {
    pub a: f64,
    pub b: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p: u32,
    pub proposals: usize,
    pub sigma2_grid: Vec<f64>,
}

impl Default for AppendixAParams {
    fn default() -> Self {
        Self {
            a: 14.0,
            b: 3.0,
            lambda1: 1.0,
            lambda2: 1.0,
            p: 8,
            proposals: 100_000,
            sigma2_grid: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixAReport {
    pub params: AppendixAParams,
    pub accepted: usize,
    pub acceptance_fraction: f64,
    /// `(σ², log(f/h))` along `sigma2_grid`.
    pub ratio_table: Vec<(f64, f64)>,
    pub ratio_increasing: bool,
    /// Accepted draws against the quadrature-normalized `f`.
    pub ks: KsResult,
}

impl AppendixAParams {
    fn incomplete_term(&self, sigma2: f64) -> f64 {
        ln_upper_incomplete_gamma_half(self.lambda1 * self.lambda1 / (8.0 * sigma2 * self.lambda2))
    }

    /// Unnormalized `log f(σ²)`.
    pub fn log_target(&self, sigma2: f64) -> f64 {
        -(self.a + 1.0) * sigma2.ln() - self.p as f64 * self.incomplete_term(sigma2) - self.b / sigma2
    }

    /// `log f(σ²)/h(σ²) = -a log b + log Γ(a) - p log Γ_U(1/2, λ1²/(8σ²λ2))`.
    pub fn log_ratio(&self, sigma2: f64) -> f64 {
        -self.a * self.b.ln() + ln_gamma(self.a) - self.p as f64 * self.incomplete_term(sigma2)
    }

    /// Right-hand side of the published acceptance test.
    pub fn log_acceptance_bound(&self, z: f64) -> f64 {
        let p = self.p as f64;
        p * 0.5 * std::f64::consts::PI.ln() - p * self.incomplete_term(z)
    }
}

/// Run the published inverse-gamma rejection step and compare its output
/// with the distribution it is supposed to target.
pub fn appendix_a_demonstration<R: Rng + ?Sized>(params: &AppendixAParams, rng: &mut R) -> Result<AppendixAReport> {
    for (name, v) in [
        ("a", params.a),
        ("b", params.b),
        ("lambda1", params.lambda1),
        ("lambda2", params.lambda2),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, v, "must be finite and > 0"));
        }
    }
    let mut accepted_draws = Vec::with_capacity(params.proposals);
    for _ in 0..params.proposals {
        let z = crate::distributions::sample_inverse_gamma(params.a, params.b, rng)?;
        let u: f64 = rng.random();
        if u.ln() <= params.log_acceptance_bound(z) {
            accepted_draws.push(z);
        }
    }
    let ratio_table: Vec<(f64, f64)> = params.sigma2_grid.iter().map(|&s| (s, params.log_ratio(s))).collect();
    let mut ordered = ratio_table.clone();
    ordered.sort_by(|x, y| y.0.total_cmp(&x.0));
    let ratio_increasing = ordered.windows(2).all(|w| w[1].1 > w[0].1);
    let table = oracle_cdf(
        |s| params.log_target(s),
        0.0,
        f64::INFINITY,
        params.b / (params.a + 1.0),
    )?;
    let ks = ks_test(&accepted_draws, &table);
    Ok(AppendixAReport {
        params: params.clone(),
        accepted: accepted_draws.len(),
        acceptance_fraction: accepted_draws.len() as f64 / params.proposals as f64,
        ratio_table,
        ratio_increasing,
        ks,
    })
}

impl AppendixAReport {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "inverse-gamma proposal for the sigma2 conditional");
        let _ = writeln!(
            s,
            "a = {}, b = {}, lambda1 = {}, lambda2 = {}, p = {}",
            p.a, p.b, p.lambda1, p.lambda2, p.p
        );
        let _ = writeln!(s, "proposals: {}", p.proposals);
        let _ = writeln!(s, "accepted: {}", self.accepted);
        let _ = writeln!(s, "acceptance fraction: {:.6}", self.acceptance_fraction);
        let _ = writeln!(s, "log f/h as sigma2 decreases:");
        for (s2, lr) in &self.ratio_table {
            let _ = writeln!(s, "  sigma2 = {s2:>8.1e}   log ratio = {lr:.6e}");
        }
        let _ = writeln!(
            s,
            "ratio increasing without bound: {}",
            if self.ratio_increasing { "yes" } else { "no" }
        );
        let _ = writeln!(
            s,
            "KS of accepted draws vs target: D = {:.6}, critical = {:.6}, verdict = {}",
            self.ks.d,
            self.ks.critical,
            if self.ks.pass { "PASS" } else { "FAIL" }
        );
        s
    }

    /// `sigma2,log_ratio,ratio` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["sigma2", "log_ratio", "ratio"])?;
        for (s2, lr) in &self.ratio_table {
            w.write_record([format_float(*s2), format_float(*lr), format_float(lr.exp())])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub mod battery;
