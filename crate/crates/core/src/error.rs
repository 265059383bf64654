use thiserror::Error;

/// Errors produced by the library.
///
/// The variants fall into four families, which the CLI maps onto distinct
/// exit codes: bad input (`NotPrime`, `DimensionMismatch`, `Malformed`, ...),
/// exhausted enumeration budgets (`BudgetExceeded`), violated preconditions of
/// the decomposition (`DensityViolated`), and broken internal invariants
/// (`Invariant`), which always indicate a bug.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("field order {p}^{k} exceeds the cap of {cap}")]
    FieldTooLarge { p: u64, k: u32, cap: u64 },

    #[error("element {value} is not in a field of order {q}")]
    ElementOutOfRange { value: u32, q: u64 },

    #[error("zero has no multiplicative inverse")]
    InverseOfZero,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("enumeration of {what} needs {needed} points, budget is 2^{budget_log2}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        budget_log2: u32,
    },

    #[error(
        "density hypothesis fails for t = {t}: {violating} of {total} points have rank > t, \
         need violating * 2qt < (q-1) * total"
    )]
    DensityViolated {
        t: usize,
        violating: String,
        total: String,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("fields differ: F_{left} vs F_{right}")]
    FieldMismatch { left: u64, right: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
