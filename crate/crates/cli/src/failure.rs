use std::fmt;

use fsd_core::integrators::IntegrationError;
use fsd_core::ModelError;

/// Terminal error of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    /// The step budget ran out before the run finished.
    Budget(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Budget(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Budget(m) => write!(f, "event budget exhausted: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::InvalidParameter { .. }
            | ModelError::EmptyWindow(_)
            | ModelError::UnreachableEnergy { .. }
            | ModelError::WrongChart { .. }
            | ModelError::Contact { .. }
            | ModelError::InflectionUndefined(_)
            | ModelError::Integration(IntegrationError::InvalidConfig(_)) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<IntegrationError> for Failure {
    fn from(e: IntegrationError) -> Self {
        ModelError::from(e).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
