use thiserror::Error;

/// Library-wide error type.
///
/// `Input` covers malformed parameters and files, `Contract` covers calls
/// that violate an operation's preconditions (absent edge, empty graph),
/// and `Generation` covers generator parameter sets that cannot satisfy
/// the instance invariants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("generation error: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn generation(msg: impl Into<String>) -> Self {
        Error::Generation(msg.into())
    }
}
