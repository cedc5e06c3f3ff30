pub mod cli;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod kernels;
pub mod logconcave;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod special;
pub mod tilted;

pub use error::{Error, Result};
pub use rng::RngStream;
