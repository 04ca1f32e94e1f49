use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),

    #[error("domain error in {node}: {detail}")]
    Domain { node: String, detail: String },

    #[error("point {point:?} lies outside the domain of chart `{chart}`")]
    OutsideDomain { chart: String, point: Vec<f64> },

    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },

    #[error("deformation step {step} pushes the image outside the target chart")]
    StepTooLarge { step: f64 },

    #[error("grid resolution {got} is below the minimum of {min}")]
    TooCoarse { got: usize, min: usize },

    #[error("source chart must be periodic in every coordinate: {0}")]
    NonPeriodic(String),

    #[error("{path}: {message}")]
    Spec { path: String, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec { path: path.into(), message: message.into() }
    }

    /// Whether the error comes from evaluating outside a valid numerical domain
    /// as opposed to a malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::OutsideDomain { .. } | Error::NotPositiveDefinite { .. } | Error::StepTooLarge { .. })
    }
}
