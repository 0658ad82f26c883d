use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Which momenta a [`FullState`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumChart {
    /// Momenta of the foil alone, `(P_x, P_y, P_theta)`.
    Foil,
    /// Canonical momenta `(Pi_x, Pi_y, Pi_theta)` of the fixed-source Hamiltonian.
    Canonical,
}

impl MomentumChart {
    pub fn name(self) -> &'static str {
        match self {
            MomentumChart::Foil => "foil",
            MomentumChart::Canonical => "canonical",
        }
    }
}

/// Fixed-frame pose and momenta of the foil together with the source position.
///
/// `theta` is never wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullState {
    pub x_c: f64,
    pub y_c: f64,
    pub theta: f64,
    pub momenta: [f64; 3],
    pub chart: MomentumChart,
    #[serde(default)]
    pub x_q: f64,
    #[serde(default)]
    pub y_q: f64,
}

impl FullState {
    pub fn new(x_c: f64, y_c: f64, theta: f64, momenta: [f64; 3], chart: MomentumChart) -> Self {
        FullState {
            x_c,
            y_c,
            theta,
            momenta,
            chart,
            x_q: 0.0,
            y_q: 0.0,
        }
    }

    pub fn with_source(mut self, x_q: f64, y_q: f64) -> Self {
        self.x_q = x_q;
        self.y_q = y_q;
        self
    }

    /// Distance between the foil center and the source.
    pub fn separation(&self) -> f64 {
        (self.x_q - self.x_c).hypot(self.y_q - self.y_c)
    }

    pub fn require_chart(&self, expected: MomentumChart) -> Result<()> {
        if self.chart == expected {
            Ok(())
        } else {
            Err(ModelError::WrongChart {
                expected: expected.name(),
                found: self.chart.name(),
            })
        }
    }

    /// Fails unless the configuration-space condition `|Z_q - Z_c| > R` holds.
    pub fn require_admissible(&self, radius: f64) -> Result<()> {
        let separation = self.separation();
        if separation > radius {
            Ok(())
        } else {
            Err(ModelError::Contact { separation, radius })
        }
    }

    /// Layout `(X_c, Y_c, theta, P_1, P_2, P_3, X_q, Y_q)`.
    pub fn to_array(&self) -> [f64; 8] {
        let [a, b, c] = self.momenta;
        [self.x_c, self.y_c, self.theta, a, b, c, self.x_q, self.y_q]
    }

    pub fn from_slice(y: &[f64], chart: MomentumChart) -> Self {
        FullState {
            x_c: y[0],
            y_c: y[1],
            theta: y[2],
            momenta: [y[3], y[4], y[5]],
            chart,
            x_q: y.get(6).copied().unwrap_or(0.0),
            y_q: y.get(7).copied().unwrap_or(0.0),
        }
    }
}

/// Point of the reduced unbalanced system in polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    /// Distance from the source to the foil center.
    pub r: f64,
    /// Polar angle of the center in the co-rotating frame.
    pub phi: f64,
    /// Magnitude of the translational momentum.
    pub p: f64,
    /// Polar angle of the translational momentum.
    pub alpha: f64,
    /// Level of the angular-momentum integral.
    pub k: f64,
}

impl ReducedState {
    /// Co-rotating Cartesian chart `(x, y, p_x, p_y)` used for stepping.
    pub fn to_cartesian(&self) -> [f64; 4] {
        let (sp, cp) = self.phi.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        [self.r * cp, self.r * sp, self.p * ca, self.p * sa]
    }

    /// Inverse of [`ReducedState::to_cartesian`]; a zero momentum gets `alpha = 0`.
    pub fn from_cartesian(y: &[f64], k: f64) -> Self {
        let r = y[0].hypot(y[1]);
        let p = y[2].hypot(y[3]);
        let alpha = if p > 0.0 { y[3].atan2(y[2]) } else { 0.0 };
        ReducedState {
            r,
            phi: y[1].atan2(y[0]),
            p,
            alpha,
            k,
        }
    }

    /// Copy with `phi` and `alpha` wrapped into `[0, 2 pi)`.
    pub fn wrapped(&self) -> Self {
        ReducedState {
            phi: wrap_angle(self.phi),
            alpha: wrap_angle(self.alpha),
            ..*self
        }
    }
}

/// Result of charting a full state into reduced variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedChart {
    pub state: ReducedState,
    /// Set when `p == 0`; `alpha` was then fixed to zero by convention.
    pub momentum_degenerate: bool,
}

/// Values of the first integrals at a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrals {
    pub h: f64,
    pub k: f64,
    /// Rotational integral of a balanced foil.
    pub c: Option<f64>,
    /// Orbital integral of a balanced foil.
    pub f: Option<f64>,
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let w = a.rem_euclid(tau);
    if w >= tau {
        0.0
    } else {
        w
    }
}
