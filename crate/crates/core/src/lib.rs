pub mod blockdiag;
pub mod envelope;
pub mod error;
pub mod hardy;
pub mod io;
pub mod qcore;
pub mod selftest;

pub use error::{Error, Result};
