use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlhError {
    #[error("singular matrix (condition estimate {cond:.3e})")]
    SingularMatrix { cond: f64 },

    #[error("resolvent singular at s = {s} ({detail})")]
    ResolventSingular { s: Complex64, detail: String },

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid Stratonovich coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("Cayley transform singular: S has an eigenvalue at -1")]
    CayleySingular,

    #[error("invalid scaled family: {0}")]
    InvalidFamily(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("no closed form available for `{0}`")]
    NoClosedForm(String),
}

impl SlhError {
    /// Re-tags a `SingularMatrix` from a resolvent solve with the offending `s`.
    pub(crate) fn at_resolvent(self, s: Complex64, what: &str) -> SlhError {
        match self {
            SlhError::SingularMatrix { cond } => SlhError::ResolventSingular {
                s,
                detail: format!("{what}, condition estimate {cond:.3e}"),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, SlhError>;
