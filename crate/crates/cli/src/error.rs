use std::path::PathBuf;

/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 64;
/// Exit status for norm data inconsistent with the Poincaré inequality.
pub const EXIT_POINCARE: i32 = 65;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nsreg::Error),
    #[error("{0}")]
    Usage(String),
    #[error("config file {}: {message}", path.display())]
    ConfigFile { path: PathBuf, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nsreg::Error as E;
        match self {
            CliError::Usage(_) | CliError::ConfigFile { .. } => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::Poincare { .. } => EXIT_POINCARE,
                E::NumericalBlowup { .. } => EXIT_SOLVER,
                E::Io(_) => EXIT_IO,
                E::Config(_) | E::Domain(_) | E::Shape(_) | E::HorizonExceeded { .. } | E::Usage(_) | E::Format(_) => {
                    EXIT_USAGE
                }
            },
        }
    }
}
