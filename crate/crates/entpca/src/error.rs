use std::io;
use std::path::PathBuf;

/// Everything the std layer can fail with. [`Error::exit_code`] maps each
/// variant onto the CLI's exit-code taxonomy.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] entpca_core::Error),

    #[error("{}: line {line}: {msg}", path.display())]
    Ingest { path: PathBuf, line: u64, msg: String },

    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("writing output: {0}")]
    Write(#[source] io::Error),

    #[error("{}: invalid config: {msg}", path.display())]
    ConfigParse { path: PathBuf, msg: String },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// 2 for contract violations, 3 for unreadable or malformed input,
    /// 1 for numeric failures and output errors.
    pub fn exit_code(&self) -> i32 {
        use entpca_core::Error as C;
        match self {
            Error::Core(C::Contract(_) | C::RankOutOfRange { .. } | C::Degenerate { .. }) => 2,
            Error::Core(C::Persist { .. }) => 3,
            Error::Core(C::NumericFailure { .. } | C::NegativeResidual { .. } | C::NegativeQueryResidual { .. }) => 1,
            Error::Contract(_) => 2,
            Error::Ingest { .. } | Error::Read { .. } | Error::ConfigParse { .. } => 3,
            Error::Write(_) => 1,
        }
    }
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
