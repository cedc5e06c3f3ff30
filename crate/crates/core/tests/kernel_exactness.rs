//! Full-conditional kernels checked against slices of the joint density.

mod common;

use benet::kernels::{
    coordinate_conditional, initial_state, mh_update_log_scale, run_chain, run_sweep, sigma2_conditional,
    update_beta_block, update_beta_coordinate, update_tau2, Algorithm, ChainConfig, MhStepSizes, Sigma2Conditional,
    SweepKind, Sweeper,
};
use benet::model::{
    center_data, log_joint_given_rss, ModelState, PriorForm, PriorSpec, RegressionData, Representation,
};
use benet::oracle::battery::{
    check_beta_block, check_beta_coordinate, check_scale_kernel, check_tau2, scale_targets, toy_dataset,
};
use benet::oracle::{grid2d_beta_posterior, ks_test, quadrature_cdf_tol, QuadratureGrid};
use benet::RngStream;
use common::{family_critical, ks_against, mean_and_mcse, normal, simulation_one};
use nalgebra::{DMatrix, DVector};

const N: usize = 10_000;
const FORMS: [PriorForm; 2] = [PriorForm::CommonScaled, PriorForm::DifferentialScaled];
const REPS: [Representation; 2] = [Representation::Direct, Representation::DataAugmentation];

#[test]
fn scale_kernels_of_every_rs_variant() {
    let mut k = 0;
    for form in FORMS {
        for rep in REPS {
            let kind = SweepKind::new(Algorithm::Rs, form, rep);
            for prior in [PriorSpec::weak(form, rep), PriorSpec::strong(form, rep)] {
                for target in scale_targets(form) {
                    let mut rng = RngStream::new(201, k);
                    k += 1;
                    let out = check_scale_kernel(kind, &prior, target, N, &mut rng).unwrap();
                    let d = parse_d(&out.detail);
                    assert!(d < 0.02, "{out}");
                }
            }
        }
    }
}

fn parse_d(detail: &str) -> f64 {
    detail
        .strip_prefix("D = ")
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| panic!("not a KS detail: {detail}"))
}

#[test]
fn beta_and_latent_variance_kernels() {
    let mut k = 0;
    let mut next = || {
        k += 1;
        RngStream::new(202, k)
    };
    for form in FORMS {
        let out = check_beta_coordinate(form, coordinate_conditional, N, &mut next()).unwrap();
        assert!(out.passed, "{out}");
        for j in 0..2 {
            let out = check_beta_block(form, j, N, &mut next()).unwrap();
            assert!(out.passed, "{out}");
        }
        for beta in [0.05, 0.6, 3.0] {
            let out = check_tau2(form, beta, N, &mut next()).unwrap();
            assert!(out.passed, "{out}");
        }
    }
}

#[test]
fn pooled_coordinate_sweeps_match_the_two_dimensional_posterior() {
    let data = toy_dataset(12, 2, 20);
    let (sigma2, lambda1, lambda2) = (1.5, 2.0, 0.7);
    for (f, form) in FORMS.into_iter().enumerate() {
        let grid = grid2d_beta_posterior(&data, sigma2, lambda1, lambda2, form).unwrap();
        let mut draws = Vec::with_capacity(20_000);
        for c in 0..20_000u64 {
            let mut rng = RngStream::new(203 + f as u64, c);
            let start = DVector::from_fn(2, |_, _| 2.0 * normal(&mut rng));
            let mut s = ModelState::new(form, start, sigma2, lambda1, lambda2, None).unwrap();
            for _ in 0..25 {
                update_beta_coordinate(&data, &mut s, &mut rng).unwrap();
            }
            draws.push(s.beta[0]);
        }
        let ks = ks_test(&draws, &grid.marginal(0).unwrap());
        assert!(ks.d < 0.02, "{form}: D = {}", ks.d);
    }
}

#[test]
fn alternating_block_and_latent_updates_keep_the_direct_marginal() {
    // p = 1: the β marginal of the augmented chain is the orthant-normal posterior.
    let mut rng = RngStream::new(204, 0);
    let x = DMatrix::from_fn(15, 1, |_, _| normal(&mut rng));
    let y: Vec<f64> = (0..15).map(|i| 0.4 * x[(i, 0)] + normal(&mut rng)).collect();
    let data = center_data(&y, &x).unwrap();
    let (sigma2, lambda1, lambda2) = (1.2, 2.5, 0.8);
    for (f, form) in FORMS.into_iter().enumerate() {
        let c = benet::model::l1_coefficient(form, sigma2, lambda1);
        let log_f = |b: f64| {
            let beta = DVector::from_vec(vec![b]);
            -(data.rss(&beta) + lambda2 * b * b) / (2.0 * sigma2) - c * b.abs()
        };
        let mut draws = Vec::with_capacity(N);
        for chain in 0..N as u64 {
            let mut rng = RngStream::new(205 + f as u64, chain);
            let tau0 = match form {
                PriorForm::CommonScaled => 0.5,
                PriorForm::DifferentialScaled => 1.0,
            };
            let mut s = ModelState::new(
                form,
                DVector::from_vec(vec![0.3]),
                sigma2,
                lambda1,
                lambda2,
                Some(DVector::from_vec(vec![tau0])),
            )
            .unwrap();
            for _ in 0..30 {
                update_beta_block(&data, &mut s, &mut rng).unwrap();
                update_tau2(&mut s, &mut rng).unwrap();
            }
            draws.push(s.beta[0]);
        }
        let ks = ks_against(&draws, log_f, f64::NEG_INFINITY, f64::INFINITY, 0.2);
        assert!(ks.d < family_critical(N, 2), "{form}: D = {}", ks.d);
    }
}

#[test]
fn block_and_coordinate_sweeps_agree_on_posterior_means() {
    let data = toy_dataset(12, 2, 20);
    let (sigma2, lambda1, lambda2) = (1.5, 2.0, 0.7);
    for form in FORMS {
        let mut rng = RngStream::new(206, 0);
        let mut direct = ModelState::new(form, DVector::zeros(2), sigma2, lambda1, lambda2, None).unwrap();
        let mut da = ModelState::new(
            form,
            DVector::zeros(2),
            sigma2,
            lambda1,
            lambda2,
            Some(DVector::from_element(2, 0.5)),
        )
        .unwrap();
        let (mut a, mut b) = (vec![Vec::new(); 2], vec![Vec::new(); 2]);
        for it in 0..20_100 {
            update_beta_coordinate(&data, &mut direct, &mut rng).unwrap();
            update_beta_block(&data, &mut da, &mut rng).unwrap();
            update_tau2(&mut da, &mut rng).unwrap();
            if it >= 100 {
                for j in 0..2 {
                    a[j].push(direct.beta[j]);
                    b[j].push(da.beta[j]);
                }
            }
        }
        for j in 0..2 {
            let ((ma, sa), (mb, sb)) = (mean_and_mcse(&a[j]), mean_and_mcse(&b[j]));
            assert!((ma - mb).abs() < 3.0 * sa.hypot(sb), "{form} beta_{j}: {ma} vs {mb}");
        }
    }
}

#[test]
fn differential_da_sigma2_mean_matches_quadrature_of_the_joint() {
    let data = toy_dataset(20, 2, 21);
    let prior = PriorSpec::weak(PriorForm::DifferentialScaled, Representation::DataAugmentation);
    let beta = DVector::from_vec(vec![0.8, -0.4]);
    let tau2 = DVector::from_vec(vec![0.5, 1.4]);
    let state = ModelState::new(
        PriorForm::DifferentialScaled,
        beta.clone(),
        1.3,
        1.7,
        0.9,
        Some(tau2.clone()),
    )
    .unwrap();
    let rss = data.rss(&beta);
    let Sigma2Conditional::InvGamma { shape, scale } = sigma2_conditional(data.n, rss, &prior, &state).unwrap() else {
        panic!("differential DA draws σ² from an inverse gamma");
    };
    let closed = scale / (shape - 1.0);
    // The λ2 = u2² coordinate is held fixed while σ² moves.
    let u2 = state.u2;
    let (l1, theta) = (state.lambda1, state.theta);
    assert!((l1 - theta * u2).abs() < 1e-12);
    let log_f = |s2: f64| {
        log_joint_given_rss(
            &prior,
            data.n,
            rss,
            beta.as_slice(),
            Some(tau2.as_slice()),
            s2,
            l1,
            u2 * u2,
        )
    };
    let grid = QuadratureGrid::logarithmic(1e-4 * closed, 1e3 * closed, 1 << 14);
    let table = quadrature_cdf_tol(log_f, &grid, 1e-10).unwrap();
    assert!(
        (table.mean() - closed).abs() < 1e-8 * closed,
        "{} vs {closed}",
        table.mean()
    );
}

#[test]
fn metropolis_step_on_a_log_normal_target() {
    let mut rng = RngStream::new(207, 0);
    let log_f = |x: f64| -x.ln() - 0.5 * x.ln() * x.ln();
    let mut x = 1.0;
    let mut kept = Vec::new();
    for it in 0..100_000 {
        x = mh_update_log_scale(log_f, x, 1.0, &mut rng).0;
        if it % 20 == 19 {
            kept.push(x);
        }
    }
    let ks = ks_against(&kept, log_f, 0.0, f64::INFINITY, 1.0);
    assert!(ks.pass, "D = {}", ks.d);
}

#[test]
fn sigma2_metropolis_acceptance_on_simulation_one() {
    let data = simulation_one(3);
    for rep in REPS {
        let kind = SweepKind::new(Algorithm::Mh, PriorForm::DifferentialScaled, rep);
        let cfg = ChainConfig {
            kind,
            prior: PriorSpec::weak(kind.form, rep),
            steps: MhStepSizes::default(),
            iterations: 5_000,
            burnin: 500,
            thin: 1,
            seed: 5,
            stream_id: 0,
        };
        let chain = run_chain(&data, &cfg).unwrap();
        let rate = chain.acceptance_rate("sigma2").unwrap();
        assert!(rate > 0.1 && rate < 0.9, "{kind}: {rate}");
    }
}

#[test]
fn rs_and_mh_agree_for_every_form_and_representation() {
    let data = simulation_one(11);
    let names = ["beta_1", "beta_2", "beta_5", "beta_8", "sigma2", "lambda1", "lambda2"];
    // 28 two-sided comparisons held to a 1% family-wise level.
    let bound = 3.57;
    let mut comparisons = 0;
    let mut worst: f64 = 0.0;
    for form in FORMS {
        for rep in REPS {
            let run = |algorithm, stream| {
                let kind = SweepKind::new(algorithm, form, rep);
                let cfg = ChainConfig {
                    kind,
                    prior: PriorSpec::weak(form, rep),
                    steps: MhStepSizes::default(),
                    iterations: 20_500,
                    burnin: 500,
                    thin: 1,
                    seed: 13,
                    stream_id: stream,
                };
                run_chain(&data, &cfg).unwrap()
            };
            let (rs, mh) = (run(Algorithm::Rs, 1), run(Algorithm::Mh, 2));
            for name in names {
                let (a, sa) = mean_and_mcse(rs.column(name).unwrap());
                let (b, sb) = mean_and_mcse(mh.column(name).unwrap());
                let z = (a - b).abs() / sa.hypot(sb);
                comparisons += 1;
                worst = worst.max(z);
                assert!(z < bound, "{form} {rep} {name}: {a} vs {b} (z = {z:.2})");
            }
        }
    }
    assert_eq!(comparisons, 28, "worst z {worst}");
}

#[test]
fn sweeps_stay_finite_with_many_coefficients_and_large_theta() {
    let (n, p) = (220, 200);
    let mut rng = RngStream::new(208, 0);
    let x = DMatrix::from_fn(n, p, |_, _| normal(&mut rng));
    let y: Vec<f64> = (0..n).map(|i| x[(i, 0)] + normal(&mut rng)).collect();
    let data: RegressionData = center_data(&y, &x).unwrap();
    for form in FORMS {
        for rep in REPS {
            for algorithm in [Algorithm::Rs, Algorithm::Mh] {
                let kind = SweepKind::new(algorithm, form, rep);
                let prior = PriorSpec::weak(form, rep);
                let mut s = initial_state(&data, &prior, &mut rng).unwrap();
                let (u1, u2) = (s.u1, s.u2);
                s.set_transformed(u1, u2, 10.0).unwrap();
                let mut sweeper = Sweeper::new(kind, prior, MhStepSizes::default()).unwrap();
                for _ in 0..5 {
                    sweeper.sweep(&data, &mut s, &mut rng).unwrap();
                    s.check_invariants().unwrap();
                }
                run_sweep(kind, &data, &prior, &mut s, &mut rng).unwrap();
                assert!(s.beta.iter().all(|b| b.is_finite()) && s.sigma2.is_finite() && s.theta.is_finite());
            }
        }
    }
}
