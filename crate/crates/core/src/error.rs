//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("digit word must be nonempty")]
    EmptyWord,

    #[error("continued-fraction digits must be >= 1 (got {0})")]
    BadDigit(u64),

    #[error("scaling ratio undefined: q_n < 2 (word [1])")]
    DegenerateWord,

    #[error("input {0} is not inside (0,1)")]
    OutOfUnitInterval(String),

    #[error("precision exhausted: only the first {certain} digits are certain")]
    PrecisionExhausted {
        certain: usize,
        /// The digits that are certain despite the failure.
        digits: Vec<u64>,
    },

    #[error("cannot parse {0:?} as a rational, decimal, or named surd")]
    UnparsableReal(String),

    #[error("zeta(s) requires s > 1 (got s = {0}; the series is singular at 1)")]
    ZetaDomain(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "enumeration budget exceeded: depth {depth} over {branches} branches needs \
         {words} words; admissible maximum depth is {max_depth}"
    )]
    EnumerationBudget {
        depth: u32,
        branches: u64,
        words: u128,
        max_depth: u32,
    },

    #[error("summation budget exceeded: {0}")]
    SummationBudget(String),

    #[error("power iteration did not converge within {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: u64, residual: f64 },

    #[error("operator input samples must all be finite")]
    NonFiniteSamples,

    #[error("sample vector has length {got}, expected {expected} (degree + 1)")]
    SampleLength { got: usize, expected: usize },

    #[error("bracketing failure: {0}")]
    Bracketing(String),

    #[error("alpha = {alpha} is outside the reachable range ({min:.6}, {max:.6}) at this truncation")]
    AlphaUnreachable { alpha: f64, min: f64, max: f64 },

    #[error("tolerance {requested:.3e} unreachable within budget; achieved {achieved:.3e}")]
    ToleranceUnreachable { requested: f64, achieved: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
