use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("all particle weights underflowed (filter divergence)")]
    FilterDivergence,

    #[error("overcounting exponent of node {origin} at node {node} became negative")]
    NegativeExponent { origin: usize, node: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("could not generate a connected graph after {0} attempts")]
    RetriesExhausted(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
