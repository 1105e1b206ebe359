use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("Laplace inversion failed at t = {t}: transform is not finite at node s = {node}")]
    InversionFailure { t: f64, node: Complex64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:e}{}", spec.as_ref().map(|s| format!(" ({s})")).unwrap_or_default())]
    NotPsd { min_eig: f64, spec: Option<String> },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "singular channel: condition number {condition:e} of the Gram matrix exceeds {limit:e}"
    )]
    SingularChannel { condition: f64, limit: f64 },

    #[error(
        "Monte Carlo aborted: {singular} of {trials} trials hit a singular channel (limit {limit})"
    )]
    TooManySingular {
        singular: usize,
        trials: usize,
        limit: usize,
    },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("binning error: {0}")]
    Binning(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("write error: {0}")]
    Write(#[source] std::io::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }
}
