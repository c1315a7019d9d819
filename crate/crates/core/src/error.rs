use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid user-supplied parameter (grid size, viscosity, time step, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Fields or series whose shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Norm data violating the Poincaré inequality `λ₁‖u‖² ≤ ‖u‖₁²`.
    #[error("inconsistent norms: λ₁‖u‖² = {lhs:.6e} exceeds ‖u‖₁² = {rhs:.6e}")]
    Poincare { lhs: f64, rhs: f64 },

    /// A bound curve was evaluated at or past the time where it ceases to be finite.
    #[error("bound evaluated at t = {t} beyond its horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    /// Non-finite coefficients or runaway enstrophy during time stepping.
    #[error("numerical blow-up after t = {last_valid_time}: {reason}")]
    NumericalBlowup { last_valid_time: f64, reason: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed snapshot: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
