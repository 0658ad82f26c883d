use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{ModelError, Result};
use crate::integrators::{DomainViolation, InvariantKind, OdeSystem};
use crate::model::force::source_force;
use crate::model::potential::FlowField;
use crate::model::{hamiltonian, FoilParams, FullState, MomentumChart, SourceSpec};

/// Mass matrix of the bare foil relating `(dX_c, dY_c, dtheta)` to `(P_x, P_y, P_theta)`.
pub fn foil_mass_matrix(theta: f64, params: &FoilParams) -> Matrix3<f64> {
    mass_matrix(theta, params.m_c, params)
}

/// Mass matrix of foil plus added fluid mass.
pub fn total_mass_matrix(theta: f64, params: &FoilParams) -> Matrix3<f64> {
    mass_matrix(theta, params.m(), params)
}

fn mass_matrix(theta: f64, translational: f64, params: &FoilParams) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    let a = params.static_moment();
    let j = params.inertia_about_center();
    Matrix3::new(
        translational, 0.0, -a * s,
        0.0, translational, a * c,
        -a * s, a * c, j,
    )
}

pub(crate) fn solve3(m: Matrix3<f64>, b: Vector3<f64>) -> Vector3<f64> {
    // Both mass matrices are symmetric positive definite for valid parameters.
    m.cholesky()
        .expect("mass matrix is positive definite for admissible foil parameters")
        .solve(&b)
}

/// Vector potential `A = rho q R^2 (R_c - R_q) / |R_c - R_q|^2`.
pub fn vector_potential(state: &FullState, params: &FoilParams, q: f64) -> (f64, f64) {
    let dx = state.x_c - state.x_q;
    let dy = state.y_c - state.y_q;
    let s2 = dx * dx + dy * dy;
    let coef = params.rho * q * params.radius * params.radius / s2;
    (coef * dx, coef * dy)
}

/// Foil velocities `(dX_c, dY_c, dtheta)` from the foil-chart momenta.
pub fn foil_velocities(state: &FullState, params: &FoilParams) -> Result<[f64; 3]> {
    state.require_chart(MomentumChart::Foil)?;
    let v = solve3(
        foil_mass_matrix(state.theta, params),
        Vector3::from(state.momenta),
    );
    Ok([v[0], v[1], v[2]])
}

/// Converts foil-chart momenta to canonical momenta of the fixed-source Hamiltonian.
pub fn to_canonical(state: &FullState, params: &FoilParams, q: f64) -> Result<FullState> {
    state.require_admissible(params.radius)?;
    let v = foil_velocities(state, params)?;
    let (ax, ay) = vector_potential(state, params, q);
    let added = params.added_mass();
    let [px, py, pt] = state.momenta;
    Ok(FullState {
        momenta: [px + added * v[0] - ax, py + added * v[1] - ay, pt],
        chart: MomentumChart::Canonical,
        ..*state
    })
}

/// Converts canonical momenta back to foil-chart momenta.
pub fn to_foil_chart(state: &FullState, params: &FoilParams, q: f64) -> Result<FullState> {
    state.require_admissible(params.radius)?;
    let v = hamiltonian::canonical_velocities(state, params, q)?;
    let p = foil_mass_matrix(state.theta, params) * Vector3::from(v);
    Ok(FullState {
        momenta: [p[0], p[1], p[2]],
        chart: MomentumChart::Foil,
        ..*state
    })
}

/// Velocities, accelerations and forces realized by the equations of motion at a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullKinematics {
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
    pub source_velocity: [f64; 2],
    pub force: [f64; 2],
    pub q: f64,
    pub q_rate: f64,
}

pub fn full_kinematics(
    state: &FullState,
    t: f64,
    params: &FoilParams,
    source: &SourceSpec,
) -> Result<FullKinematics> {
    state.require_chart(MomentumChart::Foil)?;
    state.require_admissible(params.radius)?;
    let v = foil_velocities(state, params)?;
    let q = source.q(t);
    let q_rate = source.q_rate(t);
    let vel_c = Complex64::new(v[0], v[1]);

    let vel_q = if source.mobile {
        FlowField::new(state, vel_c, params, q)
            .regular_derivative_at_source()
            .conj()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let zeta = Complex64::new(state.x_q - state.x_c, state.y_q - state.y_c);
    let f0 = source_force(zeta, vel_q, q, q_rate, params);

    // The added-mass reaction depends on the acceleration, so the translational
    // and rotational equations are solved together with the total mass matrix.
    let (s, c) = state.theta.sin_cos();
    let a = params.static_moment();
    let w2 = v[2] * v[2];
    let rhs = Vector3::new(f0.re + a * w2 * c, f0.im + a * w2 * s, 0.0);
    let acc = solve3(total_mass_matrix(state.theta, params), rhs);
    let added = params.added_mass();
    Ok(FullKinematics {
        velocity: v,
        acceleration: [acc[0], acc[1], acc[2]],
        source_velocity: [vel_q.re, vel_q.im],
        force: [f0.re - added * acc[0], f0.im - added * acc[1]],
        q,
        q_rate,
    })
}

/// Right-hand side of the joint foil/source equations in the foil momentum chart.
///
/// Output layout matches [`FullState::to_array`].
pub fn full_rhs(
    state: &FullState,
    t: f64,
    params: &FoilParams,
    source: &SourceSpec,
) -> Result<[f64; 8]> {
    let kin = full_kinematics(state, t, params, source)?;
    let [px, py, _] = state.momenta;
    let (s, c) = state.theta.sin_cos();
    let torque_free = -params.d * (px * c + py * s) * kin.velocity[2];
    Ok([
        kin.velocity[0],
        kin.velocity[1],
        kin.velocity[2],
        kin.force[0],
        kin.force[1],
        torque_free,
        kin.source_velocity[0],
        kin.source_velocity[1],
    ])
}

/// Full foil/source system as an ODE in the layout of [`FullState::to_array`].
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub params: FoilParams,
    pub source: SourceSpec,
}

impl FullSystem {
    pub fn new(params: FoilParams, source: SourceSpec) -> Self {
        FullSystem { params, source }
    }

    fn conserving(&self) -> bool {
        !self.source.mobile && self.source.intensity.is_constant()
    }

    /// `(H, K)` of the state when the source is fixed with constant intensity.
    pub fn integrals(&self, y: &[f64]) -> Option<(f64, f64)> {
        if !self.conserving() {
            return None;
        }
        let q = self.source.q(0.0);
        let state = FullState::from_slice(y, MomentumChart::Foil);
        let canonical = to_canonical(&state, &self.params, q).ok()?;
        let h = hamiltonian::hamiltonian(&canonical, &self.params, q).ok()?;
        Some((h, hamiltonian::angular_momentum_k(&canonical)))
    }
}

impl OdeSystem for FullSystem {
    fn dim(&self) -> usize {
        8
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), DomainViolation> {
        let state = FullState::from_slice(y, MomentumChart::Foil);
        match full_rhs(&state, t, &self.params, &self.source) {
            Ok(d) => {
                dydt.copy_from_slice(&d);
                Ok(())
            }
            Err(_) => Err(DomainViolation),
        }
    }

    fn radius(&self, y: &[f64]) -> Option<f64> {
        Some((y[6] - y[0]).hypot(y[7] - y[1]))
    }

    fn invariant(&self, kind: InvariantKind, y: &[f64]) -> Option<f64> {
        let (h, k) = self.integrals(y)?;
        Some(match kind {
            InvariantKind::Energy => h,
            InvariantKind::AngularMomentum => k,
        })
    }

    // The source is pinned, so projection must leave its coordinates alone.
    fn invariant_gradient(&self, kind: InvariantKind, y: &[f64], grad: &mut [f64]) -> bool {
        let mut probe = y.to_vec();
        grad.fill(0.0);
        for i in 0..6 {
            let h = 1e-6 * y[i].abs().max(1.0);
            probe[i] = y[i] + h;
            let up = self.invariant(kind, &probe);
            probe[i] = y[i] - h;
            let down = self.invariant(kind, &probe);
            probe[i] = y[i];
            match (up, down) {
                (Some(u), Some(d)) => grad[i] = (u - d) / (2.0 * h),
                _ => return false,
            }
        }
        true
    }
}

impl From<ModelError> for DomainViolation {
    fn from(_: ModelError) -> Self {
        DomainViolation
    }
}
