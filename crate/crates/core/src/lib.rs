pub mod approx;
pub mod binom;
mod dd;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod exec;
pub mod fourier;
pub mod pgf;
pub mod powerseries;

pub use error::{Error, Result};

/// Version of this crate, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
