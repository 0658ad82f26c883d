use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::dynamics::full_kinematics;
use crate::model::hamiltonian::interaction_potential;
use crate::model::{FoilParams, FullState, SourceSpec};

/// Configuration, velocities and accelerations of the foil and source at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicSample {
    pub t: f64,
    /// `(X_c, Y_c, theta, X_q, Y_q)`.
    pub config: [f64; 5],
    pub velocity: [f64; 3],
    pub acceleration: [f64; 3],
    pub source_velocity: [f64; 2],
}

impl KinematicSample {
    /// Sample realized by the Newtonian equations at a foil-chart state.
    pub fn from_state(
        state: &FullState,
        t: f64,
        params: &FoilParams,
        source: &SourceSpec,
    ) -> Result<Self> {
        let kin = full_kinematics(state, t, params, source)?;
        Ok(KinematicSample {
            t,
            config: [state.x_c, state.y_c, state.theta, state.x_q, state.y_q],
            velocity: kin.velocity,
            acceleration: kin.acceleration,
            source_velocity: kin.source_velocity,
        })
    }
}

/// `L = T - U - (A, dR_c)` for the foil with a constant-intensity source.
pub fn lagrangian(config: &[f64; 5], velocity: &[f64; 3], params: &FoilParams, q: f64) -> f64 {
    let [x, y, theta, xq, yq] = *config;
    let [vx, vy, w] = *velocity;
    let (s, c) = theta.sin_cos();
    let kinetic = 0.5 * params.m() * (vx * vx + vy * vy)
        + params.static_moment() * (-s * vx + c * vy) * w
        + 0.5 * params.inertia_about_center() * w * w;
    let (dx, dy) = (x - xq, y - yq);
    let s2 = dx * dx + dy * dy;
    let coef = params.rho * q * params.radius * params.radius / s2;
    kinetic - interaction_potential(s2, params, q) - coef * (dx * vx + dy * vy)
}

/// Maximum Euler-Lagrange residuals along a set of samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianResidual {
    pub max_body_residual: f64,
    /// `None` when `q = 0`, where the source identity carries no information.
    pub max_source_residual: Option<f64>,
}

// Richardson-extrapolated central difference.
fn derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn body_residual(sample: &KinematicSample, params: &FoilParams, q: f64) -> [f64; 3] {
    let cfg = sample.config;
    let vel = sample.velocity;
    let h = 1e-3;
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        // d/dt dL/dv_i along the sampled motion.
        let momentum_along = |tau: f64| {
            let mut c = cfg;
            for j in 0..3 {
                c[j] += tau * vel[j];
            }
            c[3] += tau * sample.source_velocity[0];
            c[4] += tau * sample.source_velocity[1];
            let mut v = vel;
            for j in 0..3 {
                v[j] += tau * sample.acceleration[j];
            }
            derivative(
                |e| {
                    let mut vv = v;
                    vv[i] += e;
                    lagrangian(&c, &vv, params, q)
                },
                h,
            )
        };
        let rate = derivative(momentum_along, h);
        let generalized_force = derivative(
            |e| {
                let mut c = cfg;
                c[i] += e;
                lagrangian(&c, &vel, params, q)
            },
            h,
        );
        *slot = rate - generalized_force;
    }
    out
}

fn source_residual(sample: &KinematicSample, params: &FoilParams, q: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &observed) in sample.source_velocity.iter().enumerate() {
        let dl = derivative(
            |e| {
                let mut c = sample.config;
                c[3 + i] += e;
                lagrangian(&c, &sample.velocity, params, q)
            },
            1e-3,
        );
        worst = worst.max((observed + dl / (params.rho * q)).abs());
    }
    worst
}

/// Checks the body equations in Lagrangian form and the source-velocity identity
/// `dR_q/dt = -(1/(rho q)) dL/dR_q` on each sample.
///
/// Body residuals are relative to the largest generalized force term, so the
/// check is insensitive to the overall scale of the motion.
pub fn lagrangian_forms_check(
    samples: &[KinematicSample],
    params: &FoilParams,
    q: f64,
) -> LagrangianResidual {
    let mut body: f64 = 0.0;
    let mut source: f64 = 0.0;
    for s in samples {
        let r = body_residual(s, params, q);
        body = r.iter().fold(body, |acc, v| acc.max(v.abs()));
        if q != 0.0 {
            source = source.max(source_residual(s, params, q));
        }
    }
    LagrangianResidual {
        max_body_residual: body,
        max_source_residual: (q != 0.0).then_some(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dynamics::vector_potential;
    use crate::model::{Intensity, MomentumChart};

    fn sample_state() -> FullState {
        FullState::new(2.1, 0.7, 0.9, [0.4, -0.3, 0.25], MomentumChart::Foil).with_source(0.2, -0.4)
    }

    #[test]
    fn newtonian_samples_satisfy_lagrange_equations() {
        let params = FoilParams::new(1.3, 0.8, 1.0, 0.35, 0.9).unwrap();
        let mut source = SourceSpec::fixed(0.7);
        source.position = [0.2, -0.4];
        let s = KinematicSample::from_state(&sample_state(), 0.0, &params, &source).unwrap();
        let res = lagrangian_forms_check(&[s], &params, 0.7);
        assert!(res.max_body_residual < 1e-9, "{res:?}");
    }

    #[test]
    fn mobile_source_satisfies_source_identity() {
        let params = FoilParams::new(1.3, 0.8, 1.0, 0.35, 0.9).unwrap();
        let source = SourceSpec {
            position: [0.2, -0.4],
            intensity: Intensity::Constant { q: 0.7 },
            mobile: true,
        };
        let s = KinematicSample::from_state(&sample_state(), 0.0, &params, &source).unwrap();
        let res = lagrangian_forms_check(&[s], &params, 0.7);
        assert!(res.max_body_residual < 1e-9, "{res:?}");
        assert!(res.max_source_residual.unwrap() < 1e-9, "{res:?}");
    }

    #[test]
    fn arbitrary_accelerations_are_detected() {
        let params = FoilParams::new(1.3, 0.8, 1.0, 0.35, 0.9).unwrap();
        let source = SourceSpec::fixed(0.7);
        let mut s = KinematicSample::from_state(&sample_state(), 0.0, &params, &source).unwrap();
        s.acceleration = [0.8, -0.6, 1.1];
        s.source_velocity = [0.5, 0.5];
        let res = lagrangian_forms_check(&[s], &params, 0.7);
        assert!(res.max_body_residual > 0.1);
        assert!(res.max_source_residual.unwrap() > 0.1);
    }

    #[test]
    fn zero_intensity_skips_source_check() {
        let params = FoilParams::unit(0.2);
        let s = KinematicSample::from_state(&sample_state(), 0.0, &params, &SourceSpec::fixed(0.0)).unwrap();
        assert_eq!(lagrangian_forms_check(&[s], &params, 0.0).max_source_residual, None);
    }

    #[test]
    fn vector_potential_magnitude() {
        let params = FoilParams::unit(0.0);
        let state = sample_state();
        let (ax, ay) = vector_potential(&state, &params, -0.6);
        let expected = params.rho * 0.6 * params.radius.powi(2) / state.separation();
        assert!((ax.hypot(ay) - expected).abs() < 1e-15);
    }
}
