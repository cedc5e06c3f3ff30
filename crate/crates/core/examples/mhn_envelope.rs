//! Mode-informed envelope for a modified half-normal target, with the
//! empirical acceptance rate for a few knot counts.
//!
//! Run with `cargo run --release --example mhn_envelope`.

use benet::distributions::MhnDensity;
use benet::logconcave::PiecewiseExpEnvelope;
use benet::RngStream;

fn main() -> benet::Result<()> {
    let target = MhnDensity::new(3.0, 2.0, 2.0)?;
    let mode = target.mode();
    let curvature = target.curvature(mode);
    println!("target x^2 exp(-2x^2 - 2x): mode {mode}, curvature {curvature:.4}");

    let mut rng = RngStream::new(3, 0);
    for per_side in [1, 2, 4, 8] {
        let env = PiecewiseExpEnvelope::build(&target, mode, curvature, per_side, 0.0)?;
        let (mut accepted, mut proposals) = (0u64, 0u64);
        while proposals < 100_000 {
            let (_, used) = env.sample_counted(&target, &mut rng);
            accepted += 1;
            proposals += used;
        }
        let knots: Vec<String> = env.knots().iter().map(|k| format!("{k:.3}")).collect();
        println!(
            "K = {per_side}: acceptance {:.4}, knots [{}]",
            accepted as f64 / proposals as f64,
            knots.join(", ")
        );
    }
    Ok(())
}
