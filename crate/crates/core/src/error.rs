use thiserror::Error;

/// Failures raised by the physical model and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field point lies inside the foil (|Z - Zc| = {distance:.6e}, R = {radius:.6e})")]
    InsideFoil { distance: f64, radius: f64 },

    #[error("field point coincides with the source")]
    AtSource,

    #[error("foil is in contact with the source (separation {separation:.6e} <= R = {radius:.6e})")]
    Contact { separation: f64, radius: f64 },

    #[error("state is expressed in the {found} momentum chart, expected {expected}")]
    WrongChart { expected: &'static str, found: &'static str },

    #[error("momentum magnitude is zero; the momentum angle is undefined")]
    DegenerateMomentum,

    #[error("energy level {h} is unreachable at this point of the secant")]
    UnreachableEnergy { h: f64 },

    #[error("no saddle exists for f = {f} (f_cr = {f_cr})")]
    NoSaddle { f: f64, f_cr: f64 },

    #[error("input is not a critical point of the effective potential (residual {residual:.3e})")]
    NotCritical { residual: f64 },

    #[error("inflection threshold is undefined: {0}")]
    InflectionUndefined(String),

    #[error("inflection search failed: {0}")]
    InflectionSearch(String),

    #[error("empty or invalid window: {0}")]
    EmptyWindow(String),

    #[error("integration failed: {0}")]
    Integration(#[from] crate::integrators::IntegrationError),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
