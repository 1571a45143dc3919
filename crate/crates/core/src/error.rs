use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A numerical procedure could not reach the requested accuracy.
    #[error("precision failure in {op}: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Precision {
        op: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    /// Adaptive quadrature gave up.
    #[error("quadrature failed{}: {detail}", location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Quadrature {
        detail: String,
        location: Option<String>,
    },

    /// An internal invariant was violated. Indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The request is valid but would blow up combinatorially.
    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
