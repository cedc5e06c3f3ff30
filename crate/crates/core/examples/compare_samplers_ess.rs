//! Effective sample size of each rejection-sampling variant relative to the
//! Metropolis-Hastings sampler with the same prior form and representation.
//!
//! Pass a design number (1-4) as the first argument; the default is 1.

use benet::kernels::{Algorithm, SweepKind};
use benet::sim::{run_experiment, ExperimentConfig, PriorPreset};

fn main() -> benet::Result<()> {
    let design: u8 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("design number"))
        .unwrap_or(1);
    let rs: Vec<SweepKind> = SweepKind::all()
        .into_iter()
        .filter(|k| k.algorithm == Algorithm::Rs)
        .collect();
    let mut samplers = rs.clone();
    samplers.extend(rs.iter().map(|k| SweepKind {
        algorithm: Algorithm::Mh,
        ..*k
    }));
    let cfg = ExperimentConfig {
        designs: vec![design],
        samplers,
        priors: vec![PriorPreset::Weak, PriorPreset::Strong],
        replicates: 5,
        seed: 8,
        ..ExperimentConfig::default()
    };
    let results = run_experiment(&cfg)?;
    println!(
        "median % ESS improvement over MH, design {design}, {} replicates",
        cfg.replicates
    );
    println!(
        "{:<24} {:<7} {:>9} {:>9} {:>9}",
        "sampler", "prior", "sigma2", "lambda1", "lambda2"
    );
    for prior in [PriorPreset::Weak, PriorPreset::Strong] {
        for kind in &rs {
            let m = |name| {
                results
                    .median_improvement(design, *kind, prior, name)
                    .unwrap_or(f64::NAN)
            };
            println!(
                "{:<24} {:<7} {:>9.1} {:>9.1} {:>9.1}",
                kind.to_string(),
                prior.to_string(),
                m("sigma2"),
                m("lambda1"),
                m("lambda2")
            );
        }
    }
    Ok(())
}
