use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// A configured size bound would be exceeded.
    #[error("resource bound exceeded: {0}")]
    Resource(String),

    /// A sequence of lattice maps fails to be exact.
    #[error("sequence is not exact at term {node}: {detail}")]
    NotExact { node: usize, detail: String },

    /// The hypothesis of a construction does not hold (e.g. coprimality).
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
