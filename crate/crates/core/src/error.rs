use thiserror::Error;

/// Errors raised by the engine. The CLI maps each variant onto an exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("not comparable: lower form constant c = {c:.6e} is not positive")]
    NotComparable { c: f64 },

    #[error("truncation infeasible: tolerance {tolerance:.3e} needs casimir cutoff {required_cutoff:.3e} (max {max_cutoff:.3e})")]
    Truncation {
        tolerance: f64,
        required_cutoff: f64,
        max_cutoff: f64,
    },

    #[error("basis change is singular (min singular value {0:.3e})")]
    Singular(f64),

    #[error("cost budget exceeded: {0}")]
    Cost(String),

    #[error("quadrature resolution {resolution} cannot integrate label {label} exactly")]
    Resolution { resolution: usize, label: i32 },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
