use thiserror::Error;

/// Errors raised by the engines. Parameter names are the user-facing ones
/// (`eta`, `nu`, `xi`, ...) so front ends can report them verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{param}` = {value} is out of range: {reason}")]
    Domain {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("truncation at n_max = {n_max} leaves tail weight {tail:e} (must be < {limit:e})")]
    Truncation { n_max: usize, tail: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("probabilities do not sum to one (sum = {sum})")]
    Consistency { sum: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(param: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        param,
        value,
        reason,
    }
}
