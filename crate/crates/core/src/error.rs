use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("mode index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("entropy anchor violated: sup|u| = {sup_abs_u} >= a = {anchor} at t = {t}")]
    AnchorViolation { t: f64, sup_abs_u: f64, anchor: f64 },

    #[error("step size underflow at t = {t}: dt = {dt:e} below {dt_min:e} (stiffness; {rejected} rejected steps)")]
    StepUnderflow {
        t: f64,
        dt: f64,
        dt_min: f64,
        rejected: usize,
    },

    #[error("non-finite value in right-hand side stage `{stage}` at t = {t}")]
    NonFiniteRhs { stage: &'static str, t: f64 },

    #[error("invalid integrator settings: {0}")]
    InvalidIntegrator(String),

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("config error: {0}")]
    Config(String),

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
        Error::Config(e.to_string())
    }
}

impl Error {
    /// Process exit code: 3 for aborts during time integration, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AnchorViolation { .. }
            | Error::StepUnderflow { .. }
            | Error::NonFiniteRhs { .. } => 3,
            _ => 2,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDomain(_) => "invalid_domain",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidInitialData(_) => "invalid_initial_data",
            Error::AnchorViolation { .. } => "anchor_violation",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::NonFiniteRhs { .. } => "non_finite_rhs",
            Error::InvalidIntegrator(_) => "invalid_integrator",
            Error::Experiment(_) => "experiment",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
