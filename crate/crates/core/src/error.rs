use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("invalid weight {value} at index {index}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("degenerate variance: the estimator did not vary across replications")]
    DegenerateVariance,
    #[error("singular design: condition number {condition:e}")]
    SingularDesign { condition: f64 },
    #[error("flat curve: total drop is zero")]
    FlatCurve,
    #[error("curve not monotone at k={k} (step {step:e})")]
    NotMonotone { k: usize, step: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

impl Error {
    /// Short name of the error case, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::AllZeroWeights => "AllZeroWeights",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::InvalidSize(_) => "InvalidSize",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DomainError(_) => "DomainError",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::SingularDesign { .. } => "SingularDesign",
            Error::FlatCurve => "FlatCurve",
            Error::NotMonotone { .. } => "NotMonotone",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
