use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid label {label}: expected a value in 1..={classes}")]
    InvalidLabel { label: usize, classes: usize },

    #[error("invalid feature vector: {0}")]
    InvalidFeatures(String),

    #[error("invalid cost vector: {0}")]
    InvalidCostVector(String),

    #[error("invalid cost matrix: {0}")]
    InvalidCostMatrix(String),

    #[error("invalid class weights: {0}")]
    InvalidWeights(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),

    #[error("recall undefined: class {0} has no test examples")]
    UndefinedRecall(usize),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
