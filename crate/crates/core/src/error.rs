use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division is not exact (remainder {remainder})")]
    NotDivisible { remainder: String },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("({p}, {q}) are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polynomial is not of L-space form: {0}")]
    NotLSpaceForm(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("regions {from} -> {to} do not form a supported pairing for a {kind} map")]
    IncompatibleRegions { from: String, to: String, kind: String },

    #[error("complex is not knot-like: {0}")]
    NotKnotLike(String),

    #[error("no simultaneously simplified basis found: {0}")]
    SimplificationFailed(String),

    #[error("resource limit: {needed} generators needed, cap is {cap}")]
    ResourceLimit { needed: u128, cap: u128 },

    #[error("time budget of {budget_secs} s exceeded")]
    BudgetExceeded { budget_secs: u64 },

    #[error("no claim covers {0}")]
    NoClaim(String),

    #[error("cancellation did not terminate within {0} steps")]
    NonTermination(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that mean "ran out of room", as opposed to a wrong input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. } | Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
