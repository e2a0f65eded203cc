use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed input: length or dimension mismatch, out-of-range index,
    /// invalid parameter.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A value failed a physical-validity check (trace, positivity,
    /// completeness).
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },
    /// The attack or operation does not apply to the given scheme.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Exact enumeration or register size exceeds the configured capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! arg_err {
    ($($t:tt)*) => {
        $crate::error::Error::Argument(alloc::format!($($t)*))
    };
}
pub(crate) use arg_err;
