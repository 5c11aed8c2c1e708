use thiserror::Error;

/// Errors surfaced by dataset ingestion, model fitting, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv parse error: {0}")]
    Csv(String),
    #[error("non-numeric cell at (row {row}, col {col}): {value:?}")]
    NonNumericCell { row: usize, col: usize, value: String },
    #[error("non-finite cell at (row {row}, col {col})")]
    NonFiniteCell { row: usize, col: usize },
    #[error("response column not found: {0:?}")]
    ResponseColumnNotFound(String),
    #[error("duplicate column name: {0:?}")]
    DuplicateColumn(String),
    #[error("response value outside {{0,1}} at row {row}: {value}")]
    NonBinaryResponse { row: usize, value: f64 },
    #[error("empty dataset: {0}")]
    EmptyDataset(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("split fraction {fraction} leaves an empty partition for n={n}")]
    EmptyPartition { fraction: f64, n: usize },
    #[error("grouping file problem: {0}")]
    Grouping(String),
    #[error("weight vector invalid: {0}")]
    InvalidWeights(String),
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("node id {0} is not a leaf")]
    NotALeaf(usize),
    #[error("empty node: class counts sum to zero")]
    EmptyNode,
    #[error("no transactions with label {0}")]
    EmptyClass(u8),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("cross-validation fold {0} contains a single class")]
    SingleClassFold(usize),
    #[error("degenerate importance at iteration {iteration}: all feature weights are zero")]
    DegenerateImportance { iteration: usize },
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("unknown scenario {0:?}; run with an exact scenario name such as sim1-and-n500")]
    UnknownScenario(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input (files, parameters, schemas)
    /// rather than internal failures. The CLI maps these to exit code 2.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::DegenerateImportance { .. })
    }
}
