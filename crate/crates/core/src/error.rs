use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The simplex lists do not describe a valid complex.
    #[error("structural error: {0}")]
    Structural(String),

    /// A caller passed arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// A dense factorization or iterative solver failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An eigenvector lies in neither the gradient nor the curl space.
    #[error(
        "eigenvector at lambda={eigenvalue:.6e} is neither gradient nor curl \
         (|B2^T u|={curl_residual:.3e}, |B1 u|={div_residual:.3e}); \
         re-diagonalize the degenerate eigenspace against im(B1^T) and im(B2)"
    )]
    Classification {
        eigenvalue: f64,
        curl_residual: f64,
        div_residual: f64,
    },

    /// A data file could not be ingested.
    #[error("ingestion error{}: {msg}", .row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Ingestion { row: Option<usize>, msg: String },

    /// A synthetic generator could not produce the requested dataset.
    #[error("generation error: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn ingestion(row: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Ingestion {
            row,
            msg: msg.into(),
        }
    }
}
