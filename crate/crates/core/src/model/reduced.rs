use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::integrators::{DomainViolation, InvariantKind, OdeSystem};
use crate::model::dynamics::vector_potential;
use crate::model::hamiltonian::{angular_momentum_k, interaction_potential};
use crate::model::{FoilParams, FullState, MomentumChart, ReducedChart, ReducedState};

/// Which root of the energy relation to use for the momentum magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Largest,
    Smallest,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Largest => "largest",
            Branch::Smallest => "smallest",
        }
    }
}

/// Charts a canonical fixed-source state into the co-rotating reduced variables.
pub fn to_reduced(state: &FullState, params: &FoilParams, q: f64) -> Result<ReducedChart> {
    state.require_chart(MomentumChart::Canonical)?;
    state.require_admissible(params.radius)?;
    let (sn, cs) = state.theta.sin_cos();
    let big_x = state.x_c - state.x_q;
    let big_y = state.y_c - state.y_q;
    let (ax, ay) = vector_potential(state, params, q);
    let kx = state.momenta[0] + ax;
    let ky = state.momenta[1] + ay;
    let cart = [
        big_x * cs + big_y * sn,
        -big_x * sn + big_y * cs,
        kx * cs + ky * sn,
        -kx * sn + ky * cs,
    ];
    let k = angular_momentum_k(state);
    let momentum_degenerate = cart[2] == 0.0 && cart[3] == 0.0;
    Ok(ReducedChart {
        state: ReducedState::from_cartesian(&cart, k),
        momentum_degenerate,
    })
}

/// Rebuilds the canonical state (source at the origin) from reduced variables and an orientation.
pub fn from_reduced(rs: &ReducedState, theta: f64, params: &FoilParams, q: f64) -> FullState {
    let [x, y, px, py] = rs.to_cartesian();
    let (sn, cs) = theta.sin_cos();
    let big_x = x * cs - y * sn;
    let big_y = x * sn + y * cs;
    let kx = px * cs - py * sn;
    let ky = px * sn + py * cs;
    let mut state = FullState::new(big_x, big_y, theta, [0.0; 3], MomentumChart::Canonical);
    let (ax, ay) = vector_potential(&state, params, q);
    let p_theta = rs.k - (x * py - y * px);
    state.momenta = [kx - ax, ky - ay, p_theta];
    state
}

/// `b = r sin(alpha - phi) + m_c d sin(alpha) / m`.
pub fn impact_parameter(rs: &ReducedState, params: &FoilParams) -> f64 {
    rs.r * (rs.alpha - rs.phi).sin() + params.static_moment() / params.m() * rs.alpha.sin()
}

/// Angular velocity of the foil, `dtheta/dt`, on the level `K = k`.
pub fn angular_velocity(rs: &ReducedState, params: &FoilParams) -> f64 {
    (rs.k - rs.p * impact_parameter(rs, params)) / params.reduced_inertia()
}

fn require_outside(r: f64, params: &FoilParams) -> Result<()> {
    if r > params.radius {
        Ok(())
    } else {
        Err(ModelError::Contact {
            separation: r,
            radius: params.radius,
        })
    }
}

/// Time derivatives of `(r, phi, p, alpha)`.
pub fn reduced_rhs(rs: &ReducedState, params: &FoilParams, q: f64) -> Result<[f64; 4]> {
    require_outside(rs.r, params)?;
    if rs.p == 0.0 {
        return Err(ModelError::DegenerateMomentum);
    }
    let m = params.m();
    let a = params.static_moment();
    let omega = angular_velocity(rs, params);
    let (s_rel, c_rel) = (rs.alpha - rs.phi).sin_cos();
    let (s_phi, c_phi) = rs.phi.sin_cos();
    let r2 = params.radius * params.radius;
    let pull = params.attraction(q) / (rs.r * (rs.r * rs.r - r2));
    Ok([
        rs.p * c_rel / m - a * s_phi * omega / m,
        rs.p * s_rel / (m * rs.r) - a * c_phi * omega / (m * rs.r) - omega,
        -pull * c_rel,
        pull * s_rel / rs.p - omega,
    ])
}

/// Energy of the reduced system.
pub fn reduced_hamiltonian(rs: &ReducedState, params: &FoilParams, q: f64) -> Result<f64> {
    require_outside(rs.r, params)?;
    let omega = angular_velocity(rs, params);
    Ok(0.5 * (rs.p * rs.p / params.m() + params.reduced_inertia() * omega * omega)
        + interaction_potential(rs.r * rs.r, params, q))
}

/// Real roots, in ascending order, of the energy relation viewed as a quadratic in `p`.
pub fn momentum_roots(
    r: f64,
    phi: f64,
    alpha: f64,
    h: f64,
    k: f64,
    params: &FoilParams,
    q: f64,
) -> Result<Option<(f64, f64)>> {
    require_outside(r, params)?;
    let j = params.reduced_inertia();
    let beta = r * (alpha - phi).sin() + params.static_moment() / params.m() * alpha.sin();
    // H = A p^2 + B p + C with Omega = (k - p beta) / j.
    let qa = 0.5 * (1.0 / params.m() + beta * beta / j);
    let qb = -k * beta / j;
    let qc = 0.5 * k * k / j + interaction_potential(r * r, params, q) - h;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Ok(None);
    }
    // Cancellation-free pair of roots.
    let root = disc.sqrt();
    let t = -0.5 * (qb + qb.signum() * root);
    let (p1, p2) = if t == 0.0 {
        (0.0, 0.0)
    } else {
        (t / qa, qc / t)
    };
    Ok(Some((p1.min(p2), p1.max(p2))))
}

/// Momentum magnitude on the energy level `h` at a point of the secant.
pub fn momentum_on_energy_level(
    r: f64,
    phi: f64,
    alpha: f64,
    h: f64,
    k: f64,
    branch: Branch,
    params: &FoilParams,
    q: f64,
) -> Result<f64> {
    let (lo, hi) =
        momentum_roots(r, phi, alpha, h, k, params, q)?.ok_or(ModelError::UnreachableEnergy { h })?;
    if hi < 0.0 {
        return Err(ModelError::UnreachableEnergy { h });
    }
    Ok(match branch {
        Branch::Largest => hi,
        Branch::Smallest if lo >= 0.0 => lo,
        Branch::Smallest => hi,
    })
}

/// Reduced dynamics stepped in the co-rotating Cartesian chart `(x, y, p_x, p_y)`.
///
/// The polar chart has a `1/p` singularity in the momentum angle; the
/// Cartesian chart does not.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSystem {
    pub params: FoilParams,
    pub q: f64,
    pub k: f64,
}

impl ReducedSystem {
    pub fn new(params: FoilParams, q: f64, k: f64) -> Self {
        ReducedSystem { params, q, k }
    }

    fn omega(&self, y: &[f64]) -> f64 {
        let a_m = self.params.static_moment() / self.params.m();
        (self.k - y[0] * y[3] + y[1] * y[2] - a_m * y[3]) / self.params.reduced_inertia()
    }

    pub fn state(&self, y: &[f64]) -> ReducedState {
        ReducedState::from_cartesian(y, self.k)
    }

    pub fn energy(&self, y: &[f64]) -> f64 {
        let omega = self.omega(y);
        let p2 = y[2] * y[2] + y[3] * y[3];
        0.5 * (p2 / self.params.m() + self.params.reduced_inertia() * omega * omega)
            + interaction_potential(y[0] * y[0] + y[1] * y[1], &self.params, self.q)
    }
}

impl OdeSystem for ReducedSystem {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<(), DomainViolation> {
        let s2 = y[0] * y[0] + y[1] * y[1];
        let r2 = self.params.radius * self.params.radius;
        if s2 <= r2 || !s2.is_finite() {
            return Err(DomainViolation);
        }
        let m = self.params.m();
        let a_m = self.params.static_moment() / m;
        let omega = self.omega(y);
        let pull = self.params.attraction(self.q) / (s2 * (s2 - r2));
        dydt[0] = y[2] / m + y[1] * omega;
        dydt[1] = y[3] / m - a_m * omega - y[0] * omega;
        dydt[2] = -pull * y[0] + y[3] * omega;
        dydt[3] = -pull * y[1] - y[2] * omega;
        Ok(())
    }

    fn radius(&self, y: &[f64]) -> Option<f64> {
        Some(y[0].hypot(y[1]))
    }

    fn invariant(&self, kind: InvariantKind, y: &[f64]) -> Option<f64> {
        match kind {
            InvariantKind::Energy => Some(self.energy(y)),
            InvariantKind::AngularMomentum => Some(self.k),
        }
    }

    fn invariant_gradient(&self, kind: InvariantKind, y: &[f64], grad: &mut [f64]) -> bool {
        match kind {
            InvariantKind::Energy => {
                let m = self.params.m();
                let a_m = self.params.static_moment() / m;
                let omega = self.omega(y);
                let s2 = y[0] * y[0] + y[1] * y[1];
                let r2 = self.params.radius * self.params.radius;
                let pull = self.params.attraction(self.q) / (s2 * (s2 - r2));
                grad[0] = -omega * y[3] + pull * y[0];
                grad[1] = omega * y[2] + pull * y[1];
                grad[2] = y[2] / m + omega * y[1];
                grad[3] = y[3] / m - omega * (y[0] + a_m);
                true
            }
            InvariantKind::AngularMomentum => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian::{hamiltonian, hamiltonian_rhs};
    use std::f64::consts::PI;

    fn params() -> FoilParams {
        FoilParams::new(1.2, 0.9, 1.0, 0.3, 1.1).unwrap()
    }

    fn generic() -> FullState {
        FullState::new(2.3, -1.4, 0.7, [0.35, 0.2, -0.15], MomentumChart::Canonical)
    }

    #[test]
    fn identity_rotation_keeps_coordinates() {
        let mut s = generic();
        s.theta = 0.0;
        let [x, y, _, _] = to_reduced(&s, &params(), 1.0).unwrap().state.to_cartesian();
        assert!((x - 2.3).abs() < 1e-15 && (y + 1.4).abs() < 1e-15);
    }

    #[test]
    fn round_trip_is_identity() {
        let p = params();
        let s = generic();
        let rc = to_reduced(&s, &p, 0.8).unwrap();
        assert!(!rc.momentum_degenerate);
        let back = from_reduced(&rc.state, s.theta, &p, 0.8);
        for (a, b) in s.to_array().iter().zip(back.to_array()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn rotations_leave_reduced_state_unchanged() {
        let p = params();
        let s = generic();
        let delta = 1.1;
        let (sn, cs) = f64::sin_cos(delta);
        let rot = |x: f64, y: f64| (x * cs - y * sn, x * sn + y * cs);
        let (x, y) = rot(s.x_c, s.y_c);
        let (px, py) = rot(s.momenta[0], s.momenta[1]);
        let turned = FullState::new(x, y, s.theta + delta, [px, py, s.momenta[2]], MomentumChart::Canonical);
        let a = to_reduced(&s, &p, 1.0).unwrap().state;
        let b = to_reduced(&turned, &p, 1.0).unwrap().state;
        assert!((a.r - b.r).abs() < 1e-12 && (a.p - b.p).abs() < 1e-12 && (a.k - b.k).abs() < 1e-12);
        assert!(((a.phi - b.phi).sin()).abs() < 1e-12 && ((a.alpha - b.alpha).sin()).abs() < 1e-12);
    }

    #[test]
    fn k_is_the_same_in_both_charts() {
        let p = params();
        let s = generic();
        let rs = to_reduced(&s, &p, 1.0).unwrap().state;
        let [x, y, px, py] = rs.to_cartesian();
        let p_theta = s.momenta[2];
        assert!((p_theta + py * x - px * y - angular_momentum_k(&s)).abs() < 1e-12);
    }

    #[test]
    fn zero_momentum_is_flagged() {
        let p = params();
        let mut s = generic();
        let (ax, ay) = vector_potential(&s, &p, 1.0);
        s.momenta = [-ax, -ay, 0.2];
        let rc = to_reduced(&s, &p, 1.0).unwrap();
        assert!(rc.momentum_degenerate);
        assert_eq!(rc.state.alpha, 0.0);
    }

    #[test]
    fn energies_agree_between_charts() {
        let p = params();
        let s = generic();
        let rs = to_reduced(&s, &p, 0.9).unwrap().state;
        let h_full = hamiltonian(&s, &p, 0.9).unwrap();
        let h_red = reduced_hamiltonian(&rs, &p, 0.9).unwrap();
        assert!((h_full - h_red).abs() < 1e-12);
    }

    #[test]
    fn polar_rhs_matches_canonical_flow() {
        // Push the canonical vector field through the chart map by finite differences.
        let p = params();
        let q = 0.9;
        let s = generic();
        let d = hamiltonian_rhs(&s, &p, q).unwrap();
        let eps = 1e-6;
        let shifted = |sign: f64| {
            let mut y = s.to_array();
            for i in 0..6 {
                y[i] += sign * eps * d[i];
            }
            to_reduced(&FullState::from_slice(&y, MomentumChart::Canonical), &p, q)
                .unwrap()
                .state
        };
        let (a, b) = (shifted(1.0), shifted(-1.0));
        let fd = [
            (a.r - b.r) / (2.0 * eps),
            (a.phi - b.phi) / (2.0 * eps),
            (a.p - b.p) / (2.0 * eps),
            (a.alpha - b.alpha) / (2.0 * eps),
        ];
        let rs = to_reduced(&s, &p, q).unwrap().state;
        let exact = reduced_rhs(&rs, &p, q).unwrap();
        for i in 0..4 {
            assert!((fd[i] - exact[i]).abs() < 1e-7, "{i}: {} vs {}", fd[i], exact[i]);
        }
    }

    #[test]
    fn cartesian_and_polar_fields_agree() {
        let p = params();
        let rs = ReducedState { r: 3.0, phi: 0.4, p: 0.6, alpha: 2.0, k: 0.7 };
        let sys = ReducedSystem::new(p, 1.0, rs.k);
        let y = rs.to_cartesian();
        let mut dy = [0.0; 4];
        sys.rhs(0.0, &y, &mut dy).unwrap();
        let polar = reduced_rhs(&rs, &p, 1.0).unwrap();
        let [x, yy, px, py] = y;
        let r_dot = (x * dy[0] + yy * dy[1]) / rs.r;
        let phi_dot = (x * dy[1] - yy * dy[0]) / (rs.r * rs.r);
        let p_dot = (px * dy[2] + py * dy[3]) / rs.p;
        let alpha_dot = (px * dy[3] - py * dy[2]) / (rs.p * rs.p);
        for (a, b) in [r_dot, phi_dot, p_dot, alpha_dot].iter().zip(polar) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((sys.energy(&y) - reduced_hamiltonian(&rs, &p, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn radial_momentum_is_stationary_for_tangential_motion() {
        let rs = ReducedState { r: 4.0, phi: 0.3, p: 0.5, alpha: 0.3 + PI / 2.0, k: 0.2 };
        let d = reduced_rhs(&rs, &params(), 1.0).unwrap();
        assert!(d[2].abs() < 1e-16);
    }

    #[test]
    fn rest_energy_is_negative_log() {
        let p = params();
        let rs = ReducedState { r: 1.5, phi: 0.0, p: 0.0, alpha: 0.0, k: 0.0 };
        let h = reduced_hamiltonian(&rs, &p, 1.0).unwrap();
        assert!((h - interaction_potential(2.25, &p, 1.0)).abs() < 1e-16 && h < 0.0);
    }

    #[test]
    fn far_field_energy_is_translational() {
        let p = FoilParams::unit(0.0);
        let rs = ReducedState { r: 1e8, phi: 0.0, p: 0.3, alpha: PI, k: 0.0 };
        let h = reduced_hamiltonian(&rs, &p, 1.0).unwrap();
        assert!((h - 0.5 * 0.09 / p.m()).abs() < 1e-14);
    }

    #[test]
    fn energy_roots_are_consistent() {
        let p = FoilParams::unit(0.01);
        let (r, h, k) = (100.0, 0.001, 1.0);
        for (phi, alpha) in [(3.0, 0.1), (2.0, 5.5), (0.4, 3.5)] {
            if let Some((lo, hi)) = momentum_roots(r, phi, alpha, h, k, &p, 1.0).unwrap() {
                for p_root in [lo, hi] {
                    let rs = ReducedState { r, phi, p: p_root, alpha, k };
                    assert!((reduced_hamiltonian(&rs, &p, 1.0).unwrap() - h).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn scattering_configuration_has_two_distinct_roots() {
        let p = FoilParams::unit(0.01);
        // Inward launch with impact parameter ~ 30.
        let alpha = 0.5;
        let phi = alpha - PI + (30.0f64 / 100.0).asin();
        let (lo, hi) = momentum_roots(100.0, phi, alpha, 0.001, 1.0, &p, 1.0).unwrap().unwrap();
        assert!(lo > 0.0 && hi > lo * 1.01);
        let largest = momentum_on_energy_level(100.0, phi, alpha, 0.001, 1.0, Branch::Largest, &p, 1.0).unwrap();
        let smallest = momentum_on_energy_level(100.0, phi, alpha, 0.001, 1.0, Branch::Smallest, &p, 1.0).unwrap();
        assert_eq!((smallest, largest), (lo, hi));
    }

    #[test]
    fn balanced_far_field_roots_degenerate() {
        let p = FoilParams::unit(0.0);
        let h = 0.02;
        // Head-on: beta = 0, so p^2 / 2m = h - V(r) for both branches.
        let r = 1e7;
        let a = momentum_on_energy_level(r, PI, 0.0, h, 0.0, Branch::Largest, &p, 1.0).unwrap();
        let b = momentum_on_energy_level(r, PI, 0.0, h, 0.0, Branch::Smallest, &p, 1.0).unwrap();
        let expected = (2.0 * p.m() * h).sqrt();
        assert!((a - expected).abs() < 1e-9 && (b - expected).abs() < 1e-9);
    }

    #[test]
    fn unreachable_levels_are_reported() {
        let p = FoilParams::unit(0.01);
        let err = momentum_on_energy_level(100.0, PI, 0.0, 0.001, 1.0, Branch::Largest, &p, 1.0);
        assert_eq!(err, Err(ModelError::UnreachableEnergy { h: 0.001 }));
    }

    #[test]
    fn impact_parameter_of_balanced_foil() {
        let p = FoilParams::unit(0.0);
        let head_on = ReducedState { r: 50.0, phi: 0.2, p: 1.0, alpha: 0.2 + PI, k: 0.0 };
        assert!(impact_parameter(&head_on, &p).abs() < 1e-13);
        let rs = ReducedState { r: 50.0, phi: 0.2, p: 1.0, alpha: 2.9, k: 0.0 };
        assert_eq!(impact_parameter(&rs, &p), 50.0 * (2.9f64 - 0.2).sin());
    }
}
