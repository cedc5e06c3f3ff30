//! Fit one simulated dataset with the default sampler and print a posterior
//! summary next to the true coefficients.

use benet::diagnostics::summarize;
use benet::kernels::{run_chain, ChainConfig, MhStepSizes, SweepKind};
use benet::model::PriorSpec;
use benet::sim::{replicate_dataset, SimDesign};

fn main() -> benet::Result<()> {
    let design = SimDesign::new(1)?;
    let data = replicate_dataset(&design, 42, 0)?;
    let kind: SweepKind = "rs-differential-da".parse()?;
    let cfg = ChainConfig {
        kind,
        prior: PriorSpec::weak(kind.form, kind.representation),
        steps: MhStepSizes::default(),
        iterations: 10_100,
        burnin: 100,
        thin: 1,
        seed: 42,
        stream_id: 0,
    };
    let chain = run_chain(&data, &cfg)?;
    println!(
        "{} draws from {kind} on simulation 1 (n = {}, p = {})",
        chain.len(),
        data.n,
        data.p
    );
    println!(
        "{:<10} {:>8} {:>9} {:>9} {:>18} {:>8}",
        "parameter", "truth", "mean", "sd", "95% interval", "ess"
    );
    for (i, row) in summarize(&chain)?.iter().enumerate() {
        let truth = match i {
            j if j < design.p => format!("{:.2}", design.beta_true[j]),
            j if j == design.p => format!("{:.2}", design.sigma_true.powi(2)),
            _ => String::new(),
        };
        println!(
            "{:<10} {:>8} {:>9.3} {:>9.3}   [{:>6.2}, {:>6.2}] {:>8.0}",
            row.name, truth, row.mean, row.sd, row.quantiles[0], row.quantiles[4], row.ess
        );
    }
    Ok(())
}
