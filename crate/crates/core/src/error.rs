use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
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

    #[error("{path}: header mismatch: expected `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("{path}: row {row}, column `{column}`: {message}")]
    Field {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("no spans")]
    NoSpans,

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid parameter `{name}`: {message}")]
    Param { name: String, message: String },

    #[error("minority class has {minority} rows but SMOTE needs more than k_neighbors = {k}")]
    MinorityTooSmall { minority: usize, k: usize },

    #[error("degenerate class distribution: {0}")]
    DegenerateClasses(String),

    #[error("fold {fold}: training part contains a single class")]
    DegenerateFold { fold: usize },

    #[error("cannot split {n_rows} rows into {k} folds")]
    TooFewRows { n_rows: usize, k: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ROC curve needs both classes in y_true")]
    SingleClass,

    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("unsupported model format version {found} (this build reads version {supported})")]
    ModelVersion { found: u32, supported: u32 },

    #[error("empty input: {0}")]
    Empty(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &str, message: impl Into<String>) -> Self {
        Error::Param {
            name: name.to_string(),
            message: message.into(),
        }
    }
}
