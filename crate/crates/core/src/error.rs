use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid numeric entry {text:?}: {reason}")]
    InvalidEntry { text: String, reason: &'static str },
    #[error("{matrix} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    Shape {
        matrix: &'static str,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("empty {0} alphabet")]
    EmptyAlphabet(&'static str),
    #[error("duplicate symbol {label:?} in {alphabet} alphabet")]
    DuplicateSymbol { alphabet: &'static str, label: String },
    #[error("row {row} of W sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: String },
    #[error("negative entry in {matrix} at ({x}, {y})")]
    NegativeEntry { matrix: &'static str, x: usize, y: usize },
    #[error("metric is not admissible at ({x}, {y}): W(y|x) > 0 but q(x, y) = 0")]
    Inadmissible { x: usize, y: usize },
    #[error("row {0} of q has no positive entry")]
    ZeroMetricRow(usize),
    #[error("probability vector is invalid: {0}")]
    InvalidDistribution(String),
    #[error("s must be nonnegative, got {0}")]
    NegativeS(f64),
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("symbol {symbol} out of range for an alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("input pair ({a}, {b}) violates the zero-error condition: the exponent at rate zero is infinite")]
    InfiniteExponent { a: usize, b: usize },
    #[error("pair ({a}, {b}) approaches its supremum only as s -> infinity; use the hatted kernel")]
    UnattainedSupremum { a: usize, b: usize },
    #[error("mu({a}, {b}) is identically +infinity (empty support)")]
    EmptySupport { a: usize, b: usize },
    #[error("bound hypothesis violated: mu'(s) = {0} is not negative")]
    BoundHypothesis(f64),
    #[error("enumeration needs {classes} classes, above the budget of {budget}; use Monte Carlo")]
    BudgetExceeded { classes: u128, budget: u128 },
    #[error("letters must differ: with identical codewords only ties decide")]
    IdenticalLetters,
    #[error("the counting identity is stated for distinct symbols")]
    SameSymbols,
    #[error("conditional type is not realizable at this blocklength: {0}")]
    NonIntegralType(String),
    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the mathematical preconditions of a computation, as
    /// opposed to malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InfiniteExponent { .. }
                | Error::UnattainedSupremum { .. }
                | Error::EmptySupport { .. }
                | Error::BoundHypothesis(_)
                | Error::BudgetExceeded { .. }
                | Error::IdenticalLetters
        )
    }
}
