use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("index {index} out of range for {what} (valid: {valid})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        valid: String,
    },

    #[error(
        "quadrature on [{a}, {b}] did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error {error:e}, requested {tol:e})"
    )]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
        tol: f64,
        subdivisions: usize,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("malformed CSV {path}: line {line}: {detail}")]
    Csv {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
