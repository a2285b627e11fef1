use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {what} exceeds bound {bound}")]
    ResourceLimit { what: String, bound: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("algorithm error: {0}")]
    Algorithm(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(msg.into()))
}

pub(crate) fn limit<T>(what: impl Into<String>, bound: usize) -> Result<T> {
    Err(Error::ResourceLimit {
        what: what.into(),
        bound,
    })
}
