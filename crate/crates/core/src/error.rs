use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius {v} is outside the admissible range [0, {limit}]")]
    RadiusOutOfRange { v: f64, limit: f64 },

    #[error("omega(0) = {nu} is not below 1; the fixed slope map is not contractive at x0")]
    NuNotContractive { nu: f64 },

    #[error("invalid continuity measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid majorant model: {0}")]
    InvalidModel(String),

    #[error("the majorant equation has no minimal root in [0, R]")]
    NotCertified,

    #[error("scalar sequence did not settle within {} iterations", partial.len().saturating_sub(1))]
    MaxIterExceeded { partial: Vec<f64> },

    #[error("the convergence condition does not hold")]
    ConditionFails,

    #[error("radius R = {radius} is smaller than the minimal root {needed}")]
    RadiusTooSmall { radius: f64, needed: f64 },

    #[error("operator evaluation failed: {0}")]
    EvaluationFailed(String),

    #[error("point at distance {distance} from x0 lies outside the ball of radius {radius}")]
    OutsideBall { distance: f64, radius: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("problem has no Jacobian evaluator")]
    JacobianMissing,

    #[error("a certified majorant is required")]
    CertificateMissing,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
