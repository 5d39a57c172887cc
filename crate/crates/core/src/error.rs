use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("edge {0} is a loop and cannot be contracted")]
    ContractLoop(usize),

    #[error("{what} needs {needed} steps, cap is {cap}")]
    CapExceeded { what: &'static str, needed: String, cap: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("variable mismatch: {0} vs {1}")]
    VariableMismatch(char, char),

    #[error("exact division left a nonzero remainder: {0}")]
    Exactness(String),

    #[error("prime {0} divides a denominator; retry with another prime")]
    BadPrime(u64),

    #[error("substitution undefined: {0}")]
    SubstitutionUndefined(&'static str),

    #[error("table representation corrupted: {0}")]
    Representation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dependency verification failed after {0} primes")]
    LiftFailed(usize),
}
