//! The elastic-net prior as a scale mixture of normals: draws from the
//! hierarchical representation against the closed-form marginal.

use benet::model::PriorForm;
use benet::oracle::battery::check_prior_equivalence;
use benet::RngStream;

fn main() -> benet::Result<()> {
    let mut stream = 0;
    for form in [PriorForm::CommonScaled, PriorForm::DifferentialScaled] {
        for (sigma2, lambda1, lambda2) in [(1.0, 1.0, 1.0), (2.0, 3.0, 0.5), (0.5, 8.0, 0.1)] {
            let mut rng = RngStream::new(23, stream);
            stream += 1;
            let out = check_prior_equivalence(form, sigma2, lambda1, lambda2, 100_000, &mut rng)?;
            println!("{form} sigma2={sigma2} lambda1={lambda1} lambda2={lambda2}: {out}");
        }
    }
    Ok(())
}
