use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input sequence is empty")]
    EmptyInput,

    #[error("sequence is not alternating: positions {0} and {next} hold equal symbols", next = .0 + 1)]
    NotAlternating(usize),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("pattern uses {labels} labels but the alphabet has only {alphabet} symbols")]
    TooManyLabels { labels: usize, alphabet: usize },

    #[error("symbol {symbol} is outside the support (alphabet size {alphabet})")]
    SymbolOutOfSupport { symbol: u32, alphabet: usize },

    #[error("division by zero: symbol {0} has probability 1 but is followed by another symbol")]
    DegenerateSymbol(u32),

    #[error("length {n} exceeds the enumeration guard {limit}")]
    GuardExceeded { n: usize, limit: usize },

    #[error("illegal extension: label {label} cannot follow prefix of length {prefix_len}")]
    IllegalExtension { label: u32, prefix_len: usize },

    #[error("prefix length {prefix_len} exceeds horizon {horizon}")]
    PrefixTooLong { prefix_len: usize, horizon: usize },

    #[error("pattern is not of the interleaved form 1 a 1 b 1 c ...")]
    NotInterleaved,

    #[error("binary-degenerate transition pair: p12 * p21 = {product} is too close to 1")]
    BinaryDegenerate { product: f64 },

    #[error("anchor transition probability is zero")]
    ZeroAnchorTransition,

    #[error("fewer than 2 distinct symbols observed ({0})")]
    TooFewSymbols(usize),

    #[error("unknown symbol {0}")]
    UnknownSymbol(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
