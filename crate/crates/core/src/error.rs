use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller broke an operation's precondition (shape, index, finiteness).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("rank k = {k} out of range: need 1 <= k < m = {m}")]
    RankOutOfRange { k: usize, m: usize },

    #[error("numeric failure on {size}x{size} matrix: {reason}")]
    NumericFailure { size: usize, reason: &'static str },

    /// Residual energy came out clearly negative, which roundoff cannot explain.
    #[error("numeric consistency: residual energy of column {column} is {value:e}")]
    NegativeResidual { column: usize, value: f64 },

    #[error("numeric consistency: query residual energy is {value:e}")]
    NegativeQueryResidual { value: f64 },

    /// Zero residual energy makes the max-entropy density degenerate.
    #[error("degenerate distribution: column {column} has zero residual energy")]
    Degenerate { column: usize },

    #[error("persistence error in field `{field}`: {fault}")]
    Persist { field: &'static str, fault: PersistFault },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum PersistFault {
    #[error("payload truncated")]
    Truncated,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("invalid value")]
    Invalid,
    #[error("trailing bytes after payload")]
    Trailing,
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
