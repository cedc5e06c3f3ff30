//! Why an inverse-gamma proposal cannot be used for the σ² conditional when
//! the tilting factor is present: the target-to-proposal ratio has no upper
//! bound near zero, so a test that accepts everything returns the wrong law.

use benet::oracle::{appendix_a_demonstration, AppendixAParams};
use benet::RngStream;

fn main() -> benet::Result<()> {
    let mut rng = RngStream::new(1, 0);
    let report = appendix_a_demonstration(&AppendixAParams::default(), &mut rng)?;
    print!("{}", report.to_text());
    Ok(())
}
