use thiserror::Error;

/// Errors raised across the library. [`Error::exit_code`] maps each variant
/// onto the command-line exit status classes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Levi-Civita index {0} outside 1..=3")]
    InvalidIndex(usize),

    #[error("radius {r} outside the profile grid [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },

    #[error("singular ODE: vanishing denominator at r = {r}")]
    SingularOde { r: f64 },

    #[error("series start invalid at r0 = {r0}: |a| r0^n = {size} (must be < 0.1)")]
    SeriesRange { r0: f64, size: f64 },

    #[error("bracket [{a_lo}, {a_hi}] does not straddle the solution: both ends {outcome}")]
    Bracket {
        a_lo: f64,
        a_hi: f64,
        outcome: String,
    },

    #[error("trial a = {a} diverged (|f| > 2 pi) at r = {r}")]
    Divergence { a: f64, r: f64 },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("charge undefined: {0}")]
    ChargeUndefined(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("unsupported setting: {0}")]
    Unsupported(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Exit status classes of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Domain,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Io => 3,
            ErrorKind::Domain => 4,
            ErrorKind::Internal => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Io => "io",
            ErrorKind::Domain => "domain",
            ErrorKind::Internal => "internal",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) | Error::InvalidIndex(_) | Error::SeriesRange { .. } => {
                ErrorKind::Validation
            }
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Parse(_) => ErrorKind::Io,
            Error::OutOfRange { .. }
            | Error::SingularOde { .. }
            | Error::Bracket { .. }
            | Error::Divergence { .. }
            | Error::NotConverged(_)
            | Error::ChargeUndefined(_)
            | Error::Divergent(_)
            | Error::Unsupported(_)
            | Error::SingularPoint(_) => ErrorKind::Domain,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
