//! Dynamics of a circular foil and a point source in an ideal fluid.

pub mod balanced;
pub mod contour;
pub mod error;
pub mod integrators;
pub mod model;
pub mod quadrature;
pub mod scattering;
pub mod unbalanced;

pub use error::{ModelError, Result};
