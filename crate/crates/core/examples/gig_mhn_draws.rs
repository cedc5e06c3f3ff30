//! Draws from the base distributions compared with their known means.

use benet::distributions::{sample_gig, sample_inverse_gaussian, sample_mhn, sample_truncated_normal, Side};
use benet::oracle::oracle_cdf;
use benet::RngStream;

const N: usize = 200_000;

fn mean_of<F: FnMut() -> benet::Result<f64>>(mut draw: F) -> benet::Result<f64> {
    let mut total = 0.0;
    for _ in 0..N {
        total += draw()?;
    }
    Ok(total / N as f64)
}

fn main() -> benet::Result<()> {
    let mut rng = RngStream::new(5, 0);

    let (mu, lambda) = (1.5, 0.8);
    let m = mean_of(|| sample_inverse_gaussian(mu, lambda, &mut rng))?;
    println!("inverse Gaussian(mu {mu}, lambda {lambda}): sample mean {m:.4}, exact {mu}");

    // Truncated normal on the negative half line with location 0.7, variance 0.3.
    let m = mean_of(|| sample_truncated_normal(0.7, 0.3, Side::Negative, &mut rng))?;
    let exact = oracle_cdf(|x: f64| -(x - 0.7).powi(2) / 0.6, f64::NEG_INFINITY, 0.0, -0.3)?.mean();
    println!("truncated normal: sample mean {m:.4}, quadrature {exact:.4}");

    for (l, psi, chi) in [(-0.7, 2.0, 3.0), (4.0, 0.5, 0.2), (0.5, 1e-3, 4.0)] {
        let m = mean_of(|| sample_gig(l, psi, chi, &mut rng))?;
        let exact = oracle_cdf(
            |x: f64| (l - 1.0) * x.ln() - 0.5 * (psi * x + chi / x),
            0.0,
            f64::INFINITY,
            1.0,
        )?
        .mean();
        println!("GIG({l}, {psi}, {chi}): sample mean {m:.4}, quadrature {exact:.4}");
    }

    for (a, b, g) in [(3.0, 2.0, 2.0), (0.5, 1.0, -3.0), (40.0, 20.0, 15.0)] {
        let m = mean_of(|| sample_mhn(a, b, g, &mut rng))?;
        let exact = oracle_cdf(|x: f64| (a - 1.0) * x.ln() - b * x * x - g * x, 0.0, f64::INFINITY, 1.0)?.mean();
        println!("MHN({a}, {b}, {g}): sample mean {m:.4}, quadrature {exact:.4}");
    }
    Ok(())
}
