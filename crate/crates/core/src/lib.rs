pub mod cli;
pub mod constants;
pub mod counting;
pub mod error;
pub mod exactpow;
pub mod expsum;
pub mod sieve;

pub use error::{Error, Result};
