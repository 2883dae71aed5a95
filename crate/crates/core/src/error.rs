use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A query falls outside the range covered by a precomputed table.
    #[error("range error: {0}")]
    Range(String),

    /// The prime table cannot fully factor the input.
    #[error(
        "cannot factor {n} with the prime table (limit {limit}): residual cofactor {residual}"
    )]
    Capability { n: u64, limit: u64, residual: u64 },

    /// Divisor enumeration would visit more tuples than allowed.
    #[error("divisor count {count} exceeds enumeration budget {budget}")]
    BudgetExceeded { count: String, budget: u64 },

    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Range(msg.into()))
}
