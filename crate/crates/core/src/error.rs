use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A value lies beyond the range of a bounded representation.
    #[error("range error: {0}")]
    Range(String),
    /// An exact enumeration would exceed the configured cap.
    #[error("resource error: {0}")]
    Resource(String),
    /// A documented precondition of a construction does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// An internal invariant was violated; indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
