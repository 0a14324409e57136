use thiserror::Error;

/// Errors raised across the simulation and theory layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The law itself is malformed (bad probabilities, empty support, bad alpha).
    #[error("malformed increment law: {0}")]
    MalformedLaw(String),

    /// The law is well formed but violates the irreducibility hypothesis.
    #[error("inadmissible increment law: {0}")]
    Inadmissible(String),

    /// A walk ran past its step cap without meeting its stopping rule.
    #[error("step cap of {cap} exceeded (position {position}, {steps} steps taken)")]
    CapExceeded { cap: u64, steps: u64, position: i64 },

    /// Global budget for a whole run (many walks) was exhausted.
    #[error("global step budget of {budget} exhausted after {walkers} walkers")]
    BudgetExhausted { budget: u64, walkers: u64 },

    /// A computation would need more memory than the configured budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Quadrature, series summation or optimisation failed to converge.
    #[error("numerical failure: {what} (achieved estimate {estimate:e}, error {error:e})")]
    Numeric {
        what: String,
        estimate: f64,
        error: f64,
    },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation needs a property the law does not have.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Config(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
