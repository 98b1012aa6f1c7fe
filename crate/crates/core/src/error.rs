use alloc::string::String;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// An evaluation point lies outside the resolved region of a discretization.
    #[error("range error: {0}")]
    Range(String),
    /// A root-finding problem has no solution for the given data.
    #[error("no root: {0}")]
    NoRoot(String),
    /// An experiment description is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// A regression could not be performed.
    #[error("fit error: {0}")]
    Fit(String),
    /// A NaN or infinity appeared during a computation.
    #[error("non-finite value at step {step}: {reason}")]
    NonFinite { step: usize, reason: String },
    /// Threshold classification produced a Global result above a Blowup result.
    #[error("monotonicity violation: {0}")]
    Monotonicity(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
