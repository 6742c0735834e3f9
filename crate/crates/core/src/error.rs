use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid RTT sample {0}")]
    InvalidRttSample(f64),
    #[error("malformed name {0:?}")]
    MalformedName(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("failed to parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("no records to summarize")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
