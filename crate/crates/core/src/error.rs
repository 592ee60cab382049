use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),

    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("group {0} has no dense listing")]
    NoDenseListing(String),

    #[error("group too large for a dense listing: {order} > cap {cap}")]
    ListingTooLarge { order: u64, cap: u64 },

    #[error("{0} is not invertible in {1}")]
    NotInvertible(String, String),

    #[error("not a unit: {0}")]
    NotAUnit(String),

    #[error("message has {digits} digits but the group only has {capacity} positions")]
    TooManyDigits { digits: usize, capacity: usize },

    #[error("coefficient {value} at position {position} is not a valid digit")]
    DigitOutOfRange { position: usize, value: String },

    #[error("coefficient {value} at position {position} does not fit in {bits} bits")]
    CoefficientTooWide { position: usize, value: String, bits: u32 },

    #[error("key side mismatch: {0}")]
    SideMismatch(String),

    #[error("signature verification failed")]
    VerificationFailed,

    #[error("rsa: {0}")]
    Rsa(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
