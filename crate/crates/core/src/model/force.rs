use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::potential::FlowField;
use crate::model::{FoilParams, FullState};

/// Kinematic data entering the pressure force on the foil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceKinematics {
    pub z_c: Complex64,
    pub vel_c: Complex64,
    pub acc_c: Complex64,
    pub z_q: Complex64,
    pub vel_q: Complex64,
    pub q: f64,
    pub q_rate: f64,
}

impl ForceKinematics {
    pub fn from_state(
        state: &FullState,
        vel_c: Complex64,
        acc_c: Complex64,
        vel_q: Complex64,
        q: f64,
        q_rate: f64,
    ) -> Self {
        ForceKinematics {
            z_c: Complex64::new(state.x_c, state.y_c),
            vel_c,
            acc_c,
            z_q: Complex64::new(state.x_q, state.y_q),
            vel_q,
            q,
            q_rate,
        }
    }
}

/// Pressure force on the foil, excluding the added-mass reaction `-rho pi R^2 acc_c`.
pub(crate) fn source_force(
    zeta: Complex64,
    vel_q: Complex64,
    q: f64,
    q_rate: f64,
    params: &FoilParams,
) -> Complex64 {
    let r2 = params.radius * params.radius;
    let rho = params.rho;
    let n2 = zeta.norm_sqr();
    rho * q * r2 * zeta * zeta / (n2 * n2) * vel_q.conj() - rho * q_rate * r2 * zeta / n2
        + rho * q * q * r2 / (2.0 * PI) * zeta / ((n2 - r2) * n2)
}

/// Closed-form principal vector of pressure forces `(F_x, F_y)`.
///
/// The foil velocity cancels from the closed form; it is accepted so the
/// signature mirrors the kinematic data of the contour formula.
pub fn sedov_force(
    state: &FullState,
    _vel_c: Complex64,
    acc_c: Complex64,
    vel_q: Complex64,
    q: f64,
    q_rate: f64,
    params: &FoilParams,
) -> Result<(f64, f64)> {
    state.require_admissible(params.radius)?;
    let zeta = Complex64::new(state.x_q - state.x_c, state.y_q - state.y_c);
    let f = source_force(zeta, vel_q, q, q_rate, params) - params.added_mass() * acc_c;
    Ok((f.re, f.im))
}

/// Trapezoidal rule on the circle `|Z - center| = radius`; spectrally accurate
/// for integrands analytic in an annulus around it.
fn circle_integral(
    center: Complex64,
    radius: f64,
    nodes: usize,
    f: impl Fn(Complex64) -> Complex64,
) -> Complex64 {
    let dt = 2.0 * PI / nodes as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let e = Complex64::from_polar(1.0, j as f64 * dt);
        let z = center + radius * e;
        sum += f(z) * Complex64::new(0.0, radius) * e;
    }
    sum * dt
}

fn adaptive_circle_integral(
    center: Complex64,
    radius: f64,
    f: impl Fn(Complex64) -> Complex64,
) -> Complex64 {
    let mut nodes = 256;
    let mut prev = circle_integral(center, radius, nodes, &f);
    while nodes < 1 << 17 {
        nodes *= 2;
        let next = circle_integral(center, radius, nodes, &f);
        if (next - prev).norm() <= 1e-15 * next.norm().max(1e-300) {
            return next;
        }
        prev = next;
    }
    prev
}

fn field_at_time(kin: &ForceKinematics, radius: f64, tau: f64) -> FlowField {
    FlowField {
        z_c: kin.z_c + tau * kin.vel_c + 0.5 * tau * tau * kin.acc_c,
        vel_c: kin.vel_c + tau * kin.acc_c,
        z_q: kin.z_q + tau * kin.vel_q,
        q: kin.q + tau * kin.q_rate,
        radius,
    }
}

/// Independent evaluation of the pressure force straight from the contour
/// form of Sedov's formula,
/// `conj(i rho/2 oint (W')^2 dZ) + d/dt (rho S dZ_c/dt + i rho oint Z W' dZ)`,
/// using quadrature on the foil boundary and a Richardson-extrapolated
/// central difference for the time derivative.
pub fn sedov_force_quadrature(kin: &ForceKinematics, params: &FoilParams) -> Result<Complex64> {
    let radius = params.radius;
    let separation = (kin.z_q - kin.z_c).norm();
    if separation <= radius {
        return Err(ModelError::Contact { separation, radius });
    }
    let rho = params.rho;
    let field = field_at_time(kin, radius, 0.0);
    let pressure = adaptive_circle_integral(field.z_c, radius, |z| {
        let w = field.derivative_unchecked(z);
        w * w
    });

    let moment = |tau: f64| {
        let field = field_at_time(kin, radius, tau);
        adaptive_circle_integral(field.z_c, radius, |z| z * field.derivative_unchecked(z))
    };
    let speed = 1.0 + kin.vel_c.norm() + kin.vel_q.norm() + kin.acc_c.norm();
    let eps = 1e-3 * ((separation - radius) / speed).min(1.0);
    let central = |h: f64| (moment(h) - moment(-h)) / (2.0 * h);
    let moment_rate = (4.0 * central(0.5 * eps) - central(eps)) / 3.0;

    let i = Complex64::new(0.0, 1.0);
    Ok((0.5 * i * rho * pressure).conj()
        + rho * PI * radius * radius * kin.acc_c
        + i * rho * moment_rate)
}

/// Summary of a closed-form vs quadrature force comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceCheckReport {
    pub n_samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    pub worst_sample: Option<usize>,
    pub passed: bool,
}

/// Relative discrepancy, with `0/0` counted as agreement.
fn relative_error(reference: Complex64, other: Complex64) -> f64 {
    let diff = (reference - other).norm();
    if diff == 0.0 {
        0.0
    } else {
        diff / reference.norm().max(f64::MIN_POSITIVE)
    }
}

/// Random admissible kinematics: separation in `[1.2 R, 4 R]`, unit-scale rates.
pub fn random_kinematics(rng: &mut impl Rng, params: &FoilParams) -> ForceKinematics {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let z_c = c();
    let vel_c = c();
    let acc_c = c();
    let vel_q = c();
    let direction = rng.gen_range(0.0..2.0 * PI);
    let distance = params.radius * rng.gen_range(1.2..4.0);
    ForceKinematics {
        z_c,
        vel_c,
        acc_c,
        z_q: z_c + Complex64::from_polar(distance, direction),
        vel_q,
        q: rng.gen_range(-2.0..2.0),
        q_rate: rng.gen_range(-1.0..1.0),
    }
}

/// Compares [`sedov_force`] with [`sedov_force_quadrature`] on `n` random
/// configurations drawn from a seeded generator; foil parameters are
/// resampled for each configuration.
pub fn force_check(n: usize, seed: u64, tolerance: f64) -> Result<ForceCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_error: f64 = 0.0;
    let mut sum = 0.0;
    let mut worst_sample = None;
    for i in 0..n {
        let radius = rng.gen_range(0.5..2.0);
        let params = FoilParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            radius,
            radius * rng.gen_range(0.0..0.9),
            rng.gen_range(0.5..2.0),
        )?;
        let kin = random_kinematics(&mut rng, &params);
        let err = compare(&kin, &params)?;
        sum += err;
        if err > max_rel_error || worst_sample.is_none() {
            max_rel_error = max_rel_error.max(err);
            worst_sample = Some(i);
        }
    }
    Ok(ForceCheckReport {
        n_samples: n,
        seed,
        tolerance,
        max_rel_error,
        mean_rel_error: if n > 0 { sum / n as f64 } else { 0.0 },
        worst_sample,
        passed: max_rel_error <= tolerance,
    })
}

/// Relative error between the closed form and the quadrature oracle for one configuration.
pub fn compare(kin: &ForceKinematics, params: &FoilParams) -> Result<f64> {
    let state = FullState::new(
        kin.z_c.re,
        kin.z_c.im,
        0.0,
        [0.0; 3],
        crate::model::MomentumChart::Foil,
    )
    .with_source(kin.z_q.re, kin.z_q.im);
    let (fx, fy) = sedov_force(&state, kin.vel_c, kin.acc_c, kin.vel_q, kin.q, kin.q_rate, params)?;
    let oracle = sedov_force_quadrature(kin, params)?;
    Ok(relative_error(Complex64::new(fx, fy), oracle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MomentumChart;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state() -> FullState {
        FullState::new(0.1, 0.2, 0.0, [0.0; 3], MomentumChart::Foil).with_source(2.0, -0.5)
    }

    #[test]
    fn vanishes_without_source_or_acceleration() {
        let p = FoilParams::unit(0.2);
        let zero = c(0.0, 0.0);
        let f = sedov_force(&state(), c(0.3, 0.4), zero, c(1.0, 1.0), 0.0, 0.0, &p).unwrap();
        assert_eq!(f, (0.0, 0.0));
    }

    #[test]
    fn pure_added_mass_reaction() {
        let p = FoilParams::new(1.0, 1.0, 0.7, 0.0, 1.3).unwrap();
        let a = c(0.25, -1.5);
        let (fx, fy) = sedov_force(&state(), c(0.0, 0.0), a, c(0.0, 0.0), 0.0, 0.0, &p).unwrap();
        assert!((fx + p.added_mass() * a.re).abs() < 1e-15);
        assert!((fy + p.added_mass() * a.im).abs() < 1e-15);
    }

    #[test]
    fn rejects_contact() {
        let p = FoilParams::unit(0.0);
        let s = FullState::new(0.0, 0.0, 0.0, [0.0; 3], MomentumChart::Foil).with_source(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!(matches!(
            sedov_force(&s, zero, zero, zero, 1.0, 0.0, &p),
            Err(ModelError::Contact { .. })
        ));
    }

    #[test]
    fn closed_form_matches_contour_quadrature() {
        let report = force_check(25, 7, 1e-8).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn zero_configuration_is_exactly_zero_both_ways() {
        let p = FoilParams::unit(0.0);
        let zero = c(0.0, 0.0);
        let kin = ForceKinematics {
            z_c: zero,
            vel_c: zero,
            acc_c: zero,
            z_q: c(2.0, 0.0),
            vel_q: zero,
            q: 0.0,
            q_rate: 0.0,
        };
        assert_eq!(sedov_force_quadrature(&kin, &p).unwrap(), zero);
        assert_eq!(compare(&kin, &p).unwrap(), 0.0);
    }
}
