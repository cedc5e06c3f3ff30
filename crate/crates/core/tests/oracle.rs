mod common;

use benet::logconcave::LogDensity;
use benet::model::{PriorForm, RegressionData};
use benet::oracle::battery::toy_dataset;
use benet::oracle::{
    appendix_a_demonstration, auto_grid, axis_derivative_jump, beta_log_posterior_2d, grid2d_beta_posterior, ks_test,
    oracle_cdf, quadrature_cdf_tol, AppendixAParams,
};
use benet::tilted::TiltedDensityParams;
use benet::RngStream;
use rand::Rng;

#[test]
fn appendix_a_findings_at_the_default_parameters() {
    let mut rng = RngStream::new(501, 0);
    let report = appendix_a_demonstration(&AppendixAParams::default(), &mut rng).unwrap();
    assert_eq!(report.accepted, 100_000);
    assert_eq!(report.acceptance_fraction, 1.0);
    assert!(report.to_text().contains("acceptance fraction: 1.000000"));
    let at = |s2: f64| report.params.log_ratio(s2);
    assert!(at(1e-2) < at(1e-4) && at(1e-4) < at(1e-6));
    assert!(report.ratio_increasing);
    assert!(!report.ks.pass, "D = {}", report.ks.d);
}

#[test]
fn appendix_a_findings_on_random_parameter_sets() {
    let mut rng = RngStream::new(502, 0);
    for set in 0..10 {
        let a = rng.random_range(3.0..40.0);
        let b = rng.random_range(0.5..10.0);
        let p = rng.random_range(2..=20u32);
        let lambda2 = rng.random_range(0.2..5.0);
        // Near zero f behaves like exp((pκ - b)/σ²) with κ = λ1²/(8λ2), so it
        // is a proper density only for pκ < b.
        let r = rng.random_range(0.2..0.9);
        let lambda1 = (8.0 * lambda2 * r * b / p as f64).sqrt();
        let params = AppendixAParams {
            a,
            b,
            lambda1,
            lambda2,
            p,
            ..AppendixAParams::default()
        };
        let mut run_rng = RngStream::new(503, set);
        let report = appendix_a_demonstration(&params, &mut run_rng).unwrap();
        assert_eq!(report.acceptance_fraction, 1.0, "{params:?}");
        assert!(report.ratio_increasing, "{params:?}");
        let last = report.ratio_table.last().unwrap().1;
        assert!(last > report.ratio_table[0].1 + 10.0, "{params:?}: {last}");
        assert!(!report.ks.pass, "{params:?}: D = {}", report.ks.d);
    }
}

#[test]
fn oracle_inverse_cdf_draws_pass_their_own_test() {
    let p = TiltedDensityParams::new(2, 3.0, 1.5, 0.4, 0.0);
    let table = oracle_cdf(|x| p.log_density(x), 0.0, f64::INFINITY, 1.0).unwrap();
    assert!(table.rel_change() < 1e-6);
    let mut rng = RngStream::new(504, 0);
    let draws: Vec<f64> = (0..10_000).map(|_| table.sample(&mut rng)).collect();
    assert!(ks_test(&draws, &table).pass);
}

#[test]
fn tilted_mass_is_stable_under_grid_doubling() {
    let p = TiltedDensityParams::new(1, 2.0, 0.5, 1.0, 0.0);
    let log_f = |x| p.log_density(x);
    let grid = auto_grid(log_f, 0.0, f64::INFINITY, 1.5, true).unwrap();
    let table = quadrature_cdf_tol(log_f, &grid, 1e-7).unwrap();
    assert!(table.rel_change() < 1e-7, "{}", table.rel_change());
}

fn grid_data() -> RegressionData {
    toy_dataset(12, 2, 20)
}

#[test]
fn ridge_limit_mean_matches_the_closed_form() {
    let data = grid_data();
    let (sigma2, lambda2) = (1.5, 0.7);
    let grid = grid2d_beta_posterior(&data, sigma2, 0.0, lambda2, PriorForm::CommonScaled).unwrap();
    let mut a = data.xtx.clone();
    for j in 0..2 {
        a[(j, j)] += lambda2;
    }
    let ridge = a.cholesky().unwrap().solve(&data.xty);
    let m = grid.mean();
    assert!(
        (m[0] - ridge[0]).abs() < 1e-6 && (m[1] - ridge[1]).abs() < 1e-6,
        "{m:?} vs {ridge}"
    );
}

#[test]
fn density_is_continuous_but_kinked_on_the_axes() {
    let data = grid_data();
    for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
        let (sigma2, lambda1) = (1.5, 2.0);
        let log_f = beta_log_posterior_2d(&data, form, sigma2, lambda1, 0.7);
        for b1 in [-0.7, 0.0, 0.4] {
            let (up, down) = (log_f(b1, 1e-12), log_f(b1, -1e-12));
            assert!((up - down).abs() < 1e-8);
            let c = benet::model::l1_coefficient(form, sigma2, lambda1);
            let jump = axis_derivative_jump(&log_f, b1, 1e-4);
            assert!((jump + 2.0 * c).abs() < 1e-6, "{form}: {jump} vs {}", -2.0 * c);
        }
    }
}

#[test]
fn strong_penalty_puts_the_mode_on_an_axis() {
    let data = grid_data();
    let grid = grid2d_beta_posterior(&data, 1.5, 60.0, 0.7, PriorForm::CommonScaled).unwrap();
    let (b1, b2) = grid.argmax();
    let step = (grid.b1[1] - grid.b1[0]).max(grid.b2[1] - grid.b2[0]);
    assert!(b1.abs() <= step || b2.abs() <= step, "argmax ({b1}, {b2})");
}
