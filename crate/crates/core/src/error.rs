use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet must have at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid model class: {0}")]
    InvalidClass(String),

    #[error("mixture state covers {state} symbols but prefix has {prefix}")]
    PrefixMismatch { state: usize, prefix: usize },

    #[error("prefix impossible under every model in the class")]
    ImpossiblePrefix,

    #[error(
        "enumeration too large: more than {budget} node visits required; \
         use the Monte-Carlo estimators instead"
    )]
    EnumerationTooLarge { budget: u64 },

    #[error("invalid loss matrix: {0}")]
    InvalidLoss(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
