//! Every base sampler against a quadrature CDF of its own target density.

mod common;

use benet::distributions::{
    sample_gamma, sample_gig, sample_inverse_gamma, sample_inverse_gaussian, sample_mhn, sample_std_normal_tail,
    sample_truncated_normal, GigDensity, MhnDensity, Side,
};
use benet::logconcave::{ars_sample, LogDensity, PiecewiseExpEnvelope, DEFAULT_KNOTS_PER_SIDE};
use benet::oracle::oracle_cdf;
use benet::tilted::{bisect_mode, prop2_mode_bounds, sample_tilted, TiltedDensityParams};
use benet::RngStream;
use common::{collect, family_critical, ks_against, mean};

const N: usize = 10_000;

fn gig_log(lambda: f64, psi: f64, chi: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (lambda - 1.0) * x.ln() - 0.5 * (psi * x + chi / x)
}

fn mhn_log(alpha: f64, beta: f64, gamma: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (alpha - 1.0) * x.ln() - beta * x * x - gamma * x
}

#[test]
fn truncated_normal_negative_side() {
    let mut rng = RngStream::new(101, 0);
    let xs = collect(N, || sample_truncated_normal(3.0, 1.0, Side::Negative, &mut rng));
    assert!(xs.iter().all(|&x| x < 0.0));
    let ks = ks_against(&xs, |x| -0.5 * (x - 3.0) * (x - 3.0), f64::NEG_INFINITY, 0.0, -0.3);
    assert!(ks.d < 0.02, "D = {}", ks.d);
}

#[test]
fn truncated_normal_grid() {
    let sets = [(-4.0, 0.5), (-0.5, 2.0), (0.0, 1.0), (1.5, 0.2), (6.0, 1.0)];
    let crit = family_critical(N, 2 * sets.len());
    for (k, &(m, s2)) in sets.iter().enumerate() {
        for (side, lo, hi) in [
            (Side::NonNegative, 0.0, f64::INFINITY),
            (Side::Negative, f64::NEG_INFINITY, 0.0),
        ] {
            let mut rng = RngStream::new(102, k as u64 * 2 + (side == Side::Negative) as u64);
            let xs = collect(N, || sample_truncated_normal(m, s2, side, &mut rng));
            let hint = if side == Side::NonNegative {
                m.max(0.05)
            } else {
                m.min(-0.05)
            };
            let ks = ks_against(&xs, move |x| -(x - m) * (x - m) / (2.0 * s2), lo, hi, hint);
            assert!(ks.d < crit, "m={m} s2={s2} {side:?}: D = {}", ks.d);
        }
    }
}

#[test]
fn normal_tail_beyond_several_points() {
    let points = [0.0, 0.5, 2.0, 5.0, 12.0];
    let crit = family_critical(N, points.len());
    for (k, &a) in points.iter().enumerate() {
        let mut rng = RngStream::new(103, k as u64);
        let xs: Vec<f64> = (0..N).map(|_| sample_std_normal_tail(a, &mut rng)).collect();
        assert!(xs.iter().all(|&x| x >= a));
        let ks = ks_against(&xs, |x| -0.5 * x * x, a, f64::INFINITY, a + 1.0 / a.max(1.0));
        assert!(ks.d < crit, "a={a}: D = {}", ks.d);
    }
}

#[test]
fn inverse_gaussian_reference_set() {
    let mut rng = RngStream::new(104, 0);
    let xs = collect(N, || sample_inverse_gaussian(2.0, 8.0, &mut rng));
    let log_f = |x: f64| -1.5 * x.ln() - 8.0 * (x - 2.0) * (x - 2.0) / (2.0 * 4.0 * x);
    let ks = ks_against(&xs, log_f, 0.0, f64::INFINITY, 2.0);
    assert!(ks.d < 0.02, "D = {}", ks.d);
}

#[test]
fn inverse_gaussian_grid() {
    let sets = [(0.01, 1.0), (1.0, 0.01), (5.0, 100.0), (1e3, 2.0), (0.3, 0.3)];
    let crit = family_critical(N, sets.len());
    for (k, &(mu, lambda)) in sets.iter().enumerate() {
        let mut rng = RngStream::new(105, k as u64);
        let xs = collect(N, || sample_inverse_gaussian(mu, lambda, &mut rng));
        let log_f = move |x: f64| -1.5 * x.ln() - lambda * (x - mu) * (x - mu) / (2.0 * mu * mu * x);
        let mode = mu * ((1.0 + 9.0 * mu * mu / (4.0 * lambda * lambda)).sqrt() - 1.5 * mu / lambda);
        let ks = ks_against(&xs, log_f, 0.0, f64::INFINITY, mode);
        assert!(ks.d < crit, "mu={mu} lambda={lambda}: D = {}", ks.d);
    }
}

#[test]
fn gig_reference_set() {
    let mut rng = RngStream::new(106, 0);
    let xs = collect(N, || sample_gig(2.0, 4.0, 4.0, &mut rng));
    let ks = ks_against(&xs, gig_log(2.0, 4.0, 4.0), 0.0, f64::INFINITY, 1.2);
    assert!(ks.d < 0.02, "D = {}", ks.d);
}

#[test]
fn gig_grid_covers_every_algorithm_branch() {
    // Orders and concentrations on both sides of the branch thresholds.
    let sets = [
        (0.3, 0.01, 0.01),
        (0.1, 0.05, 2.0),
        (-0.7, 2.0, 3.0),
        (0.9, 1.0, 1.0),
        (1.5, 0.2, 0.5),
        (-3.0, 1.0, 10.0),
        (4.0, 0.5, 0.2),
        (25.0, 3.0, 4.0),
        (-0.5, 40.0, 40.0),
    ];
    let crit = family_critical(N, sets.len());
    for (k, &(l, psi, chi)) in sets.iter().enumerate() {
        let mut rng = RngStream::new(107, k as u64);
        let xs = collect(N, || sample_gig(l, psi, chi, &mut rng));
        let mode = GigDensity::new(l, psi, chi).unwrap().mode();
        let ks = ks_against(&xs, gig_log(l, psi, chi), 0.0, f64::INFINITY, mode);
        assert!(ks.d < crit, "GIG({l}, {psi}, {chi}): D = {}", ks.d);
    }
}

#[test]
fn gig_boundary_cases_reduce_to_gamma_laws() {
    let mut rng = RngStream::new(108, 0);
    // (λ=−a, ψ=0, χ=2b) is inverse-gamma(a, b): mean b/(a−1).
    let xs = collect(50_000, || sample_gig(-4.0, 0.0, 6.0, &mut rng));
    assert!((mean(&xs) - 1.0).abs() < 0.02, "{}", mean(&xs));
    // (λ=a, ψ=2b, χ=0) is gamma(a, rate b): mean a/b.
    let xs = collect(50_000, || sample_gig(3.0, 4.0, 0.0, &mut rng));
    assert!((mean(&xs) - 1.5).abs() < 0.02, "{}", mean(&xs));
}

#[test]
fn gig_mean_against_quadrature() {
    let mut rng = RngStream::new(109, 0);
    let xs = collect(N, || sample_gig(2.0, 4.0, 4.0, &mut rng));
    let table = oracle_cdf(gig_log(2.0, 4.0, 4.0), 0.0, f64::INFINITY, 1.2).unwrap();
    let se = (common::variance(&xs) / N as f64).sqrt();
    assert!(
        (mean(&xs) - table.mean()).abs() < 3.0 * se,
        "{} vs {}",
        mean(&xs),
        table.mean()
    );
}

#[test]
fn mhn_reference_sets() {
    let mut rng = RngStream::new(110, 0);
    let xs = collect(N, || sample_mhn(4.0, 1.0, -2.0, &mut rng));
    let ks = ks_against(&xs, mhn_log(4.0, 1.0, -2.0), 0.0, f64::INFINITY, 1.5);
    assert!(ks.d < 0.02, "D = {}", ks.d);

    let xs = collect(N, || sample_mhn(3.0, 2.0, 2.0, &mut rng));
    let ks = ks_against(&xs, mhn_log(3.0, 2.0, 2.0), 0.0, f64::INFINITY, 0.5);
    assert!(ks.d < 0.015, "D = {}", ks.d);
}

#[test]
fn mhn_grid() {
    let alphas = [0.3, 1.0, 1.5, 5.0, 40.0];
    let betas = [0.05, 1.05, 20.0];
    let gammas = [-6.0, 0.0, 1.9646, 15.0];
    let m = alphas.len() * betas.len() * gammas.len();
    let crit = family_critical(N, m);
    let mut k = 0;
    for &a in &alphas {
        for &b in &betas {
            for &g in &gammas {
                let mut rng = RngStream::new(111, k);
                k += 1;
                let xs = collect(N, || sample_mhn(a, b, g, &mut rng));
                let hint = if a >= 1.0 {
                    MhnDensity::new(a, b, g).unwrap().mode().max(1e-3)
                } else {
                    mean(&xs)
                };
                let ks = ks_against(&xs, mhn_log(a, b, g), 0.0, f64::INFINITY, hint);
                assert!(ks.d < crit, "MHN({a}, {b}, {g}): D = {}", ks.d);
            }
        }
    }
}

#[test]
fn gamma_and_inverse_gamma_samplers() {
    let mut rng = RngStream::new(112, 0);
    let xs = collect(N, || sample_gamma(6.0, 2.0, &mut rng));
    let ks = ks_against(&xs, |x| 5.0 * x.ln() - 2.0 * x, 0.0, f64::INFINITY, 2.5);
    assert!(ks.d < family_critical(N, 2), "gamma D = {}", ks.d);
    let xs = collect(N, || sample_inverse_gamma(3.5, 2.0, &mut rng));
    let ks = ks_against(&xs, |x| -4.5 * x.ln() - 2.0 / x, 0.0, f64::INFINITY, 0.45);
    assert!(ks.d < family_critical(N, 2), "inverse gamma D = {}", ks.d);
}

#[test]
fn mhn_envelope_acceptance_with_two_knots_per_side() {
    let target = MhnDensity::new(3.0, 2.0, 2.0).unwrap();
    let mode = target.mode();
    assert!((mode - 0.5).abs() < 1e-14);
    let env = PiecewiseExpEnvelope::build(&target, mode, target.curvature(mode), 2, 0.0).unwrap();
    let mut rng = RngStream::new(113, 0);
    let (mut accepted, mut proposals) = (0u64, 0u64);
    while proposals < 100_000 {
        let (_, used) = env.sample_counted(&target, &mut rng);
        accepted += 1;
        proposals += used;
    }
    let rate = accepted as f64 / proposals as f64;
    assert!((rate - 0.954).abs() < 0.01, "acceptance {rate}");
}

#[test]
fn gig_envelope_acceptance_above_ninety_percent() {
    let target = GigDensity::new(2.0, 4.0, 4.0).unwrap();
    let mode = target.mode();
    let env = PiecewiseExpEnvelope::build(&target, mode, target.curvature(mode), DEFAULT_KNOTS_PER_SIDE, 0.0).unwrap();
    let mut rng = RngStream::new(114, 0);
    let (mut accepted, mut proposals) = (0u64, 0u64);
    while proposals < 100_000 {
        accepted += 1;
        proposals += env.sample_counted(&target, &mut rng).1;
    }
    assert!(accepted as f64 / proposals as f64 > 0.9);
}

#[test]
fn envelope_dominates_targets_on_a_grid() {
    let tilted = TiltedDensityParams::new(3, 2.0, 1.5, 0.7, 0.0);
    let (lo, hi) = prop2_mode_bounds(&tilted).unwrap();
    let mhn_a = MhnDensity::new(5.0, 1.05, 1.9646).unwrap();
    let mhn_b = MhnDensity::new(1.0, 0.3, -4.0).unwrap();
    let gig = GigDensity::new(2.0, 4.0, 4.0).unwrap();
    let targets: [(&dyn LogDensity, f64); 4] = [
        (&mhn_a, mhn_a.mode()),
        (&mhn_b, mhn_b.mode()),
        (&gig, gig.mode()),
        (&tilted, bisect_mode(&tilted, lo, hi)),
    ];
    for (t, mode) in targets {
        let h = 1e-5 * mode.max(1e-3);
        let curv = (t.dlog_density(mode + h) - t.dlog_density(mode - h)) / (2.0 * h);
        let env = PiecewiseExpEnvelope::build(t, mode, curv, DEFAULT_KNOTS_PER_SIDE, 0.0).unwrap();
        for i in 1..=5000 {
            let x = 12.0 * mode.max(0.1) * i as f64 / 5000.0;
            let gap = env.log_envelope(x) - t.log_density(x);
            assert!(
                gap >= -1e-9 * (1.0 + t.log_density(x).abs()),
                "envelope below target at {x}: {gap}"
            );
        }
    }
}

#[test]
fn tilted_reference_sets() {
    for (k, (p, hint, limit)) in [
        (TiltedDensityParams::new(1, 2.0, 0.5, 1.0, 0.0), 1.5, 0.02),
        (
            TiltedDensityParams::new(2, 3.0, 2.0, 1.0, 0.0),
            1.0,
            family_critical(N, 1),
        ),
        (TiltedDensityParams::new(4, 5.0, 2.5, 0.5, 0.0), 1.7, 0.02),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = RngStream::new(115, k as u64);
        let xs = collect(N, || sample_tilted(&p, &mut rng));
        let ks = ks_against(&xs, |x| p.log_density(x), 0.0, f64::INFINITY, hint);
        assert!(ks.d < limit, "{p:?}: D = {}", ks.d);
    }
}

#[test]
fn tilted_grid_for_q_one_two_four() {
    let mut sets = Vec::new();
    for q in [1u32, 2, 4] {
        for &a in &[1.0, 2.5, 9.0] {
            for &excess in &[0.0, 0.8] {
                for &c in &[0.05, 1.0, 12.0] {
                    sets.push(TiltedDensityParams::new(q, a, 0.5 * q as f64 + excess, c, 0.0));
                }
            }
        }
    }
    let crit = family_critical(N, sets.len());
    for (k, p) in sets.iter().enumerate() {
        let mut rng = RngStream::new(116, k as u64);
        let xs = collect(N, || sample_tilted(p, &mut rng));
        let (_, hi) = prop2_mode_bounds(p).unwrap();
        let ks = ks_against(&xs, |x| p.log_density(x), 0.0, f64::INFINITY, 0.5 * hi);
        assert!(ks.d < crit, "{p:?}: D = {}", ks.d);
    }
}

#[test]
fn tilted_q_zero_branches() {
    let sets = [
        TiltedDensityParams::new(0, 2.0, 0.0, 3.0, 0.0),
        TiltedDensityParams::new(0, 2.0, 0.0, 1.5, 0.8),
        TiltedDensityParams::new(0, 3.0, 2.0, 2.0, 0.0),
        TiltedDensityParams::new(0, 1.5, 0.7, 0.3, 0.9),
    ];
    let crit = family_critical(N, sets.len());
    for (k, p) in sets.iter().enumerate() {
        let mut rng = RngStream::new(117, k as u64);
        let xs = collect(N, || sample_tilted(p, &mut rng));
        let ks = ks_against(&xs, |x| p.log_density(x), 0.0, f64::INFINITY, mean(&xs));
        assert!(ks.d < crit, "{p:?}: D = {}", ks.d);
    }
}

#[test]
fn ars_from_mode_bound_knot() {
    let p = TiltedDensityParams::new(1, 2.0, 0.5, 1.0, 0.0);
    let (_, hi) = prop2_mode_bounds(&p).unwrap();
    let mut rng = RngStream::new(118, 0);
    let xs = collect(N, || ars_sample(&p, &[hi], 0.0, &mut rng));
    let ks = ks_against(&xs, |x| p.log_density(x), 0.0, f64::INFINITY, 1.5);
    assert!(ks.d < 0.02, "D = {}", ks.d);
}

#[test]
fn same_stream_gives_identical_draws() {
    let draw = |seed| {
        let mut rng = RngStream::new(seed, 3);
        let mut v = Vec::new();
        for _ in 0..200 {
            v.push(sample_gig(0.4, 1.0, 2.0, &mut rng).unwrap());
            v.push(sample_mhn(2.0, 1.0, 0.5, &mut rng).unwrap());
            v.push(sample_tilted(&TiltedDensityParams::new(2, 2.0, 1.0, 1.0, 0.0), &mut rng).unwrap());
        }
        v
    };
    let (a, b) = (draw(9), draw(9));
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a, draw(10));
}
