use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{ModelError, Result};
use crate::integrators::{DomainViolation, InvariantKind, OdeSystem};
use crate::model::dynamics::{solve3, total_mass_matrix, vector_potential};
use crate::model::{FoilParams, FullState, Integrals, MomentumChart};

/// Interaction potential `(rho q^2 / 4 pi) ln(1 - R^2 / s2)` for squared separation `s2`.
pub fn interaction_potential(s2: f64, params: &FoilParams, q: f64) -> f64 {
    let r2 = params.radius * params.radius;
    params.rho * q * q / (4.0 * PI) * (-r2 / s2).ln_1p()
}

fn relative(state: &FullState) -> (f64, f64) {
    (state.x_c - state.x_q, state.y_c - state.y_q)
}

fn kinetic_momentum(state: &FullState, params: &FoilParams, q: f64) -> Vector3<f64> {
    let (ax, ay) = vector_potential(state, params, q);
    let [px, py, pt] = state.momenta;
    Vector3::new(px + ax, py + ay, pt)
}

fn check(state: &FullState, params: &FoilParams) -> Result<()> {
    state.require_chart(MomentumChart::Canonical)?;
    state.require_admissible(params.radius)
}

/// Velocities `Q^{-1} (Pi + A)` in the canonical chart.
pub fn canonical_velocities(state: &FullState, params: &FoilParams, q: f64) -> Result<[f64; 3]> {
    check(state, params)?;
    let v = solve3(
        total_mass_matrix(state.theta, params),
        kinetic_momentum(state, params, q),
    );
    Ok([v[0], v[1], v[2]])
}

/// Hamiltonian of the foil in the field of a fixed source of constant intensity.
pub fn hamiltonian(state: &FullState, params: &FoilParams, q: f64) -> Result<f64> {
    check(state, params)?;
    let momentum = kinetic_momentum(state, params, q);
    let v = solve3(total_mass_matrix(state.theta, params), momentum);
    let (x, y) = relative(state);
    Ok(0.5 * momentum.dot(&v) + interaction_potential(x * x + y * y, params, q))
}

/// `(dH/dX, dH/dY, dH/dtheta, dH/dPi_x, dH/dPi_y, dH/dPi_theta)`.
pub fn hamiltonian_gradient(state: &FullState, params: &FoilParams, q: f64) -> Result<[f64; 6]> {
    let v = canonical_velocities(state, params, q)?;
    let (x, y) = relative(state);
    let s2 = x * x + y * y;
    let r2 = params.radius * params.radius;
    let c = params.rho * q * r2;
    let inv = 1.0 / (s2 * s2);
    // Jacobian of the vector potential.
    let dax_dx = c * (y * y - x * x) * inv;
    let day_dx = -2.0 * c * x * y * inv;
    let dax_dy = day_dx;
    let day_dy = -dax_dx;
    let dv = params.attraction(q) / (s2 * (s2 - r2));
    let (sn, cs) = state.theta.sin_cos();
    let a = params.static_moment();
    Ok([
        v[0] * dax_dx + v[1] * day_dx + dv * x,
        v[0] * dax_dy + v[1] * day_dy + dv * y,
        a * v[2] * (v[0] * cs + v[1] * sn),
        v[0],
        v[1],
        v[2],
    ])
}

/// Canonical equations of motion; layout `(X_c, Y_c, theta, Pi_x, Pi_y, Pi_theta)`.
pub fn hamiltonian_rhs(state: &FullState, params: &FoilParams, q: f64) -> Result<[f64; 6]> {
    let g = hamiltonian_gradient(state, params, q)?;
    Ok([g[3], g[4], g[5], -g[0], -g[1], -g[2]])
}

/// Angular momentum integral `K = Pi_theta + Pi_y X_c - Pi_x Y_c` about the source.
pub fn angular_momentum_k(state: &FullState) -> f64 {
    let (x, y) = relative(state);
    let [px, py, pt] = state.momenta;
    pt + py * x - px * y
}

/// Generator of simultaneous rotations of the foil position, orientation and momenta.
pub fn symmetry_field(state: &FullState) -> [f64; 6] {
    let (x, y) = relative(state);
    let [px, py, _] = state.momenta;
    [-y, x, 1.0, -py, px, 0.0]
}

/// Energy, angular momentum and, for a balanced foil, the split `K = C + F`.
pub fn integrals(state: &FullState, params: &FoilParams, q: f64) -> Result<Integrals> {
    let h = hamiltonian(state, params, q)?;
    let k = angular_momentum_k(state);
    if params.is_balanced() {
        let c = state.momenta[2];
        Ok(Integrals {
            h,
            k,
            c: Some(c),
            f: Some(k - c),
        })
    } else {
        Ok(Integrals {
            h,
            k,
            c: None,
            f: None,
        })
    }
}

/// Fixed source at the origin, constant intensity; `y = (X, Y, theta, Pi_x, Pi_y, Pi_theta)`.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalSystem {
    pub params: FoilParams,
    pub q: f64,
}

impl CanonicalSystem {
    pub fn new(params: FoilParams, q: f64) -> Self {
        CanonicalSystem { params, q }
    }

    pub fn state(y: &[f64]) -> FullState {
        FullState::new(y[0], y[1], y[2], [y[3], y[4], y[5]], MomentumChart::Canonical)
    }

    pub fn to_vector(state: &FullState) -> Result<[f64; 6]> {
        state.require_chart(MomentumChart::Canonical)?;
        if state.x_q != 0.0 || state.y_q != 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "source",
                reason: "canonical system expects the source at the origin".into(),
            });
        }
        let [a, b, c] = state.momenta;
        Ok([state.x_c, state.y_c, state.theta, a, b, c])
    }
}

impl OdeSystem for CanonicalSystem {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), DomainViolation> {
        let d = hamiltonian_rhs(&Self::state(y), &self.params, self.q)?;
        dydt.copy_from_slice(&d);
        Ok(())
    }

    fn radius(&self, y: &[f64]) -> Option<f64> {
        Some(y[0].hypot(y[1]))
    }

    fn invariant(&self, kind: InvariantKind, y: &[f64]) -> Option<f64> {
        let state = Self::state(y);
        match kind {
            InvariantKind::Energy => hamiltonian(&state, &self.params, self.q).ok(),
            InvariantKind::AngularMomentum => Some(angular_momentum_k(&state)),
        }
    }

    fn invariant_gradient(&self, kind: InvariantKind, y: &[f64], grad: &mut [f64]) -> bool {
        match kind {
            InvariantKind::Energy => {
                match hamiltonian_gradient(&Self::state(y), &self.params, self.q) {
                    Ok(g) => {
                        grad.copy_from_slice(&g);
                        true
                    }
                    Err(_) => false,
                }
            }
            InvariantKind::AngularMomentum => {
                grad.copy_from_slice(&[y[4], -y[3], 0.0, -y[1], y[0], 1.0]);
                true
            }
        }
    }
}
