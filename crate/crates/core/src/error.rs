use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("missing config key `{0}`")]
    MissingKey(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: String, reason: String },
    #[error("degenerate frame: the two anchor points coincide")]
    DegenerateFrame,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge (estimated error {achieved:e}, requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("finite-difference step underflow at gamma = {0:e}")]
    StepUnderflow(f64),
    #[error("route legs do not match {0}")]
    Topology(String),
    #[error("mission infeasible: travel energy {travel_energy:.1} J exceeds battery {battery:.1} J")]
    Infeasible { travel_energy: f64, battery: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::MissingKey(_) => "missing_key",
            Error::UnknownKey(_) => "unknown_key",
            Error::InvalidValue { .. } => "invalid_value",
            Error::DegenerateFrame => "degenerate_frame",
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::StepUnderflow(_) => "step_underflow",
            Error::Topology(_) => "topology",
            Error::Infeasible { .. } => "infeasible",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
