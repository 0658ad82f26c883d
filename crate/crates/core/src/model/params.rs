use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Physical constants of the foil and the fluid, per unit length of the cylinder.
///
/// The total translational mass `m = m_c + rho * pi * R^2` (body plus added
/// mass) is never stored; it is recomputed from the other fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct FoilParams {
    pub m_c: f64,
    pub i_c: f64,
    pub radius: f64,
    pub d: f64,
    pub rho: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    m_c: f64,
    #[serde(rename = "I_c")]
    i_c: f64,
    #[serde(rename = "R")]
    radius: f64,
    d: f64,
    rho: f64,
}

impl TryFrom<RawParams> for FoilParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self> {
        FoilParams::new(raw.m_c, raw.i_c, raw.radius, raw.d, raw.rho)
    }
}

impl From<FoilParams> for RawParams {
    fn from(p: FoilParams) -> Self {
        RawParams {
            m_c: p.m_c,
            i_c: p.i_c,
            radius: p.radius,
            d: p.d,
            rho: p.rho,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl FoilParams {
    pub fn new(m_c: f64, i_c: f64, radius: f64, d: f64, rho: f64) -> Result<Self> {
        let p = FoilParams {
            m_c,
            i_c,
            radius,
            d,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit foil used throughout the figures: `m_c = I_c = R = rho = 1`.
    pub fn unit(d: f64) -> Self {
        FoilParams::new(1.0, 1.0, 1.0, d, 1.0).expect("unit foil with 0 <= d < 1")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("m_c", self.m_c)?;
        positive("I_c", self.i_c)?;
        positive("R", self.radius)?;
        positive("rho", self.rho)?;
        if !(self.d.is_finite() && self.d >= 0.0 && self.d < self.radius) {
            return Err(invalid("d", format!("must satisfy 0 <= d < R, got {}", self.d)));
        }
        Ok(())
    }

    /// Added mass of the fluid, `rho * pi * R^2`.
    pub fn added_mass(&self) -> f64 {
        self.rho * PI * self.radius * self.radius
    }

    /// Total translational mass `m`.
    pub fn m(&self) -> f64 {
        self.m_c + self.added_mass()
    }

    /// Static moment `m_c d` of the offset center of mass.
    pub fn static_moment(&self) -> f64 {
        self.m_c * self.d
    }

    /// Moment of inertia about the geometric center, `I_c + m_c d^2`.
    pub fn inertia_about_center(&self) -> f64 {
        self.i_c + self.m_c * self.d * self.d
    }

    /// `I_c + m_c d^2 - m_c^2 d^2 / m`, the inertia that multiplies the
    /// squared angular velocity in the reduced Hamiltonian.
    pub fn reduced_inertia(&self) -> f64 {
        let a = self.static_moment();
        self.inertia_about_center() - a * a / self.m()
    }

    /// `rho q^2 R^2 / (2 pi)`, the strength of the foil/source attraction.
    pub fn attraction(&self, q: f64) -> f64 {
        self.rho * q * q * self.radius * self.radius / (2.0 * PI)
    }

    pub fn is_balanced(&self) -> bool {
        self.d == 0.0
    }
}
