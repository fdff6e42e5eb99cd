use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("record {record}: {message}")]
    Parse { record: usize, message: String },

    #[error("unknown element `{0}` and no atomic mass override")]
    UnknownElement(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("atom {atom} has no value for attribute `{attribute}`")]
    MissingAttribute { atom: usize, attribute: String },

    #[error("filtration is not monotone at simplex {simplex:?}: {reason}")]
    NotMonotone { simplex: Vec<usize>, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("diagram dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),

    #[error("undefined metric: {0}")]
    Undefined(String),

    #[error("nothing to train: no triplets could be mined")]
    NothingToTrain,

    #[error("container: {0}")]
    Container(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
