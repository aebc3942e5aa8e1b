use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block size {block} does not divide lattice size {size}")]
    NonDividingBlock { size: usize, block: usize },

    #[error("tertile discretizer used before fitting")]
    UnfittedDiscretizer,

    #[error("sample has no spread between the 1/3 and 2/3 quantiles")]
    DegenerateSample,

    #[error("signal-to-noise ratio {0} is negative")]
    NegativeSnr(f64),

    #[error("signal function has no interior peak on the given grid")]
    NoInteriorPeak,

    #[error("need at least {need} scales, got {got}")]
    InsufficientScales { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed curve data: {0}")]
    Parse(String),
}
