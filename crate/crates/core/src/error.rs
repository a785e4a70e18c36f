use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported angular momentum '{shell}' for element {element} (line {line})")]
    UnsupportedAngularMomentum {
        element: String,
        shell: String,
        line: usize,
    },

    #[error("basis format error at line {line}: {message}")]
    BasisFormat { line: usize, message: String },

    #[error("element {0} not found in basis set")]
    MissingElement(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("overlap matrix is numerically singular (condition number {0:.3e})")]
    LinearDependence(f64),

    #[error("sector with {n_electrons} electrons and 2Sz = {two_sz} is empty for {n_mo} orbitals")]
    EmptySector {
        n_mo: usize,
        n_electrons: usize,
        two_sz: i32,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("input contains NaN or infinite values: {0}")]
    NonFinite(String),

    #[error("scope error: {0}")]
    Scope(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
