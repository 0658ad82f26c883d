//! Conservative ODE stepping with event location.
//!
//! Two method families are provided: an embedded explicit Runge-Kutta pair
//! followed by orthogonal projection onto invariant level sets, and Gauss
//! collocation, which is symplectic.

mod collocation;
mod config;
mod driver;
mod explicit;
mod projection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use collocation::{step_collocation, GaussTableau};
pub use config::{IntegratorConfig, Method};
pub use driver::{
    integrate_to, integrate_until_event, Direction, EventKind, EventSpec, IntegrationReport,
    Outcome, DEFAULT_CONTACT_EPSILON,
};
pub use projection::{project, step_projection};

/// Marker returned by a right-hand side evaluated outside its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainViolation;

/// First integrals a system may expose for projection and monitoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    Energy,
    AngularMomentum,
}

/// Autonomous or time-dependent first-order system `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), DomainViolation>;

    /// Distance used by radial events, if the system has one.
    fn radius(&self, _y: &[f64]) -> Option<f64> {
        None
    }

    fn invariant(&self, _kind: InvariantKind, _y: &[f64]) -> Option<f64> {
        None
    }

    /// Writes the gradient of an invariant; `false` means "not available",
    /// in which case callers fall back to finite differences.
    fn invariant_gradient(&self, _kind: InvariantKind, _y: &[f64], _grad: &mut [f64]) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("state dimension {found} does not match the system dimension {expected}")]
    Dimension { expected: usize, found: usize },

    #[error("initial state lies outside the domain of the right-hand side")]
    InitialDomain,

    #[error("invariant {0:?} is not defined for this system")]
    MissingInvariant(InvariantKind),

    #[error("step size underflow at t = {t:.17e}: h = {h:.3e} < min_step (last failure: {reason})")]
    StepUnderflow { t: f64, h: f64, reason: String },
}

/// Why a single step attempt was refused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StepFailure {
    Domain,
    Newton,
}

impl StepFailure {
    pub(crate) fn describe(self) -> &'static str {
        match self {
            StepFailure::Domain => "right-hand side left its domain",
            StepFailure::Newton => "Newton iteration did not converge",
        }
    }
}

pub(crate) fn eval(
    sys: &impl OdeSystem,
    t: f64,
    y: &[f64],
    out: &mut [f64],
) -> Result<(), StepFailure> {
    sys.rhs(t, y, out).map_err(|_| StepFailure::Domain)?;
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StepFailure::Domain)
    }
}
