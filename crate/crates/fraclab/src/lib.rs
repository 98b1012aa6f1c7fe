//! Command-line front end for `fraclab-core`: a `rustfft` transform backend,
//! JSON experiment configs, binary snapshots, CSV output and a scoped worker
//! pool for amplitude sweeps.

pub mod cli;
pub mod config;
mod error;
pub mod executor;
pub mod fft;
pub mod output;
pub mod snapshot;

pub use error::LabError;
pub use fft::RustFft;
