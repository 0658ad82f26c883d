use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::model::{FoilParams, FullState};

/// Instantaneous data that fixes the complex potential of the flow: a moving
/// circle of radius `radius`, a source at `z_q`, and the Milne-Thomson image
/// of the source inside the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowField {
    pub z_c: Complex64,
    pub vel_c: Complex64,
    pub z_q: Complex64,
    pub q: f64,
    pub radius: f64,
}

impl FlowField {
    pub fn new(state: &FullState, vel_c: Complex64, params: &FoilParams, q: f64) -> Self {
        FlowField {
            z_c: Complex64::new(state.x_c, state.y_c),
            vel_c,
            z_q: Complex64::new(state.x_q, state.y_q),
            q,
            radius: params.radius,
        }
    }

    fn check(&self, z: Complex64) -> Result<()> {
        let distance = (z - self.z_c).norm();
        if distance <= self.radius {
            return Err(ModelError::InsideFoil {
                distance,
                radius: self.radius,
            });
        }
        if z == self.z_q {
            return Err(ModelError::AtSource);
        }
        Ok(())
    }

    /// `W(Z)` with principal-branch logarithms; only defined up to a multiple of `i q`.
    pub fn potential(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let r2 = self.radius * self.radius;
        let w = z - self.z_c;
        let k = self.q / (2.0 * PI);
        let image = r2 / w - (self.z_q - self.z_c).conj();
        Ok(-r2 * self.vel_c / w + k * (z - self.z_q).ln() + k * image.ln())
    }

    /// `dW/dZ`, analytic in `Z` away from the foil and the source.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        Ok(self.derivative_unchecked(z))
    }

    pub(crate) fn derivative_unchecked(&self, z: Complex64) -> Complex64 {
        let r2 = self.radius * self.radius;
        let w = z - self.z_c;
        let w2 = w * w;
        let k = self.q / (2.0 * PI);
        let image = r2 / w - (self.z_q - self.z_c).conj();
        r2 * self.vel_c / w2 + k / (z - self.z_q) - k * r2 / (w2 * image)
    }

    /// Derivative of the regular part `W* = W - q/(2 pi) ln(Z - Z_q)` evaluated at the source.
    pub fn regular_derivative_at_source(&self) -> Complex64 {
        let r2 = self.radius * self.radius;
        let zeta = self.z_q - self.z_c;
        let k = self.q / (2.0 * PI);
        r2 * self.vel_c / (zeta * zeta) + k * r2 / (zeta * (zeta.norm_sqr() - r2))
    }
}

/// Complex potential `W(Z)` of the flow around the foil and the source.
pub fn complex_potential(
    z: Complex64,
    state: &FullState,
    vel_c: Complex64,
    params: &FoilParams,
    q: f64,
) -> Result<Complex64> {
    FlowField::new(state, vel_c, params, q).potential(z)
}

/// Physical fluid velocity `conj(dW/dZ)` at `Z`.
pub fn flow_velocity(
    z: Complex64,
    state: &FullState,
    vel_c: Complex64,
    params: &FoilParams,
    q: f64,
) -> Result<Complex64> {
    Ok(FlowField::new(state, vel_c, params, q).derivative(z)?.conj())
}
