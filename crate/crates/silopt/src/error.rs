use thiserror::Error;

/// Errors raised by validation, optimization, generation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty label vector")]
    EmptyLabels,
    #[error("label {0} is not a positive integer")]
    NonPositiveLabel(i64),
    #[error("dissimilarity matrix is not square: {rows} rows, {cols} cols")]
    NonSquare { rows: usize, cols: usize },
    #[error("negative dissimilarity {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("non-finite dissimilarity at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("nonzero diagonal {value} at index {index}")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("asymmetric dissimilarity at ({row}, {col}): {a} vs {b}")]
    Asymmetric { row: usize, col: usize, a: f64, b: f64 },
    #[error("partition covers {labels} objects but matrix has {n}")]
    SizeMismatch { labels: usize, n: usize },
    #[error("the average silhouette width is undefined for k < 2 (got k = {0})")]
    TooFewClusters(usize),
    #[error("number of clusters {k} out of range for n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("move target equals current cluster of object {0}")]
    NoopMove(usize),
    #[error("moving object {0} would empty cluster {1}")]
    EmptyingMove(usize, usize),
    #[error("initial partition has an empty cluster")]
    EmptyClusterInit,
    #[error("coordinate data required: {0}")]
    NeedsCoordinates(String),
    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFiniteCoordinate { row: usize, col: usize },
    #[error("non-binary entry {value} at ({row}, {col})")]
    NonBinaryEntry { row: usize, col: usize, value: f64 },
    #[error("unknown linkage method: {0}")]
    UnknownLinkage(String),
    #[error("unknown DGP id: {0}")]
    UnknownDgp(String),
    #[error("invalid distribution parameter: {0}")]
    InvalidDistribution(String),
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("{0}")]
    Enumeration(String),
    #[error("partitions of {0} objects exceed the enumeration guard (n <= 12)")]
    TooManyObjects(usize),
    #[error("scale factor must be positive (got {0})")]
    NonPositiveScale(f64),
    #[error("trivial partition not admissible here")]
    TrivialPartition,
    #[error("malformed input at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(
        "DGP {0} contains the ambiguous Gam(15, 0) rate; rerun with --paper-compat to \
         substitute rate 1"
    )]
    PaperCompatRequired(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
