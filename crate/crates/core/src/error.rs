use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty interval [{left}, {right})")]
    EmptyInterval { left: String, right: String },

    #[error("point {point} is not on the sampling grid")]
    OffGrid { point: String },

    #[error("point {point} lies outside the domain and the function is not compactly supported")]
    OutOfDomain { point: String },

    #[error("interval of generation {generation} is finer than the grid (depth {depth})")]
    TooFine { generation: i64, depth: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("threshold estimate inconclusive: no grid value stabilises")]
    Inconclusive,

    #[error("malformed input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
