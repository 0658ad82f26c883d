use nalgebra::{DMatrix, DVector};

use super::explicit::DormandPrince;
use super::{IntegrationError, IntegratorConfig, InvariantKind, OdeSystem, StepFailure};

/// Values of the projection targets at a state.
pub(crate) fn levels(
    sys: &impl OdeSystem,
    targets: &[InvariantKind],
    y: &[f64],
) -> Result<Vec<(InvariantKind, f64)>, IntegrationError> {
    targets
        .iter()
        .map(|&kind| {
            sys.invariant(kind, y)
                .map(|v| (kind, v))
                .ok_or(IntegrationError::MissingInvariant(kind))
        })
        .collect()
}

fn gradient(sys: &impl OdeSystem, kind: InvariantKind, y: &[f64]) -> Option<Vec<f64>> {
    let mut g = vec![0.0; y.len()];
    if sys.invariant_gradient(kind, y, &mut g) {
        return Some(g);
    }
    let mut probe = y.to_vec();
    for i in 0..y.len() {
        let h = 1e-6 * y[i].abs().max(1.0);
        probe[i] = y[i] + h;
        let up = sys.invariant(kind, &probe)?;
        probe[i] = y[i] - h;
        let down = sys.invariant(kind, &probe)?;
        probe[i] = y[i];
        g[i] = (up - down) / (2.0 * h);
    }
    Some(g)
}

fn residuals(
    sys: &impl OdeSystem,
    y: &[f64],
    levels: &[(InvariantKind, f64)],
) -> Option<Vec<f64>> {
    levels
        .iter()
        .map(|&(kind, c)| sys.invariant(kind, y).map(|v| v - c))
        .collect()
}

fn converged(r: &[f64], levels: &[(InvariantKind, f64)], tol: f64) -> bool {
    r.iter()
        .zip(levels)
        .all(|(ri, (_, c))| ri.abs() <= tol * c.abs().max(1.0))
}

/// Orthogonal projection of `y` onto `{g_i = c_i}`.
///
/// Simplified Newton on the multipliers with the constraint gradients frozen at
/// the unprojected point. A state already within `tol` of the levels is
/// returned untouched.
pub fn project(
    sys: &impl OdeSystem,
    y: &mut [f64],
    levels: &[(InvariantKind, f64)],
    tol: f64,
    max_iter: usize,
) -> bool {
    if levels.is_empty() {
        return true;
    }
    let Some(mut r) = residuals(sys, y, levels) else {
        return false;
    };
    if converged(&r, levels, tol) {
        return true;
    }
    let n = y.len();
    let m = levels.len();
    let mut g = DMatrix::zeros(m, n);
    for (row, &(kind, _)) in levels.iter().enumerate() {
        let Some(grad) = gradient(sys, kind, y) else {
            return false;
        };
        for (j, v) in grad.into_iter().enumerate() {
            g[(row, j)] = v;
        }
    }
    let Some(gram) = (&g * g.transpose()).lu().try_inverse() else {
        return false;
    };
    let base = y.to_vec();
    let mut lambda = DVector::zeros(m);
    for _ in 0..max_iter {
        lambda -= &gram * DVector::from_vec(r);
        let shift = g.transpose() * &lambda;
        for i in 0..n {
            y[i] = base[i] + shift[i];
        }
        r = match residuals(sys, y, levels) {
            Some(r) => r,
            None => return false,
        };
        if converged(&r, levels, tol) {
            return true;
        }
    }
    y.copy_from_slice(&base);
    false
}

pub(crate) fn attempt(
    dp: &mut DormandPrince,
    sys: &impl OdeSystem,
    t: f64,
    y: &[f64],
    h: f64,
    levels: &[(InvariantKind, f64)],
    config: &IntegratorConfig,
) -> Result<(Vec<f64>, f64), StepFailure> {
    let step = dp.attempt(sys, t, y, h, config.rel_tol, config.abs_tol)?;
    let mut y_new = step.y;
    if step.err <= 1.0 && !project(sys, &mut y_new, levels, config.newton_tol, config.newton_max_iter)
    {
        return Err(StepFailure::Newton);
    }
    Ok((y_new, step.err))
}

/// One explicit step of size `dt` followed by projection onto `levels`.
///
/// On a failed projection or a domain violation the step is halved; returns the
/// step actually taken together with the new state.
pub fn step_projection(
    sys: &impl OdeSystem,
    t: f64,
    y: &[f64],
    dt: f64,
    levels: &[(InvariantKind, f64)],
    config: &IntegratorConfig,
) -> Result<(f64, Vec<f64>), IntegrationError> {
    let mut dp = DormandPrince::new(y.len());
    let mut h = dt;
    loop {
        let step = dp.attempt(sys, t, y, h, config.rel_tol, config.abs_tol);
        let failure = match step {
            Ok(s) => {
                let mut y_new = s.y;
                if project(sys, &mut y_new, levels, config.newton_tol, config.newton_max_iter) {
                    return Ok((h, y_new));
                }
                StepFailure::Newton
            }
            Err(f) => f,
        };
        h *= 0.5;
        if h.abs() < config.min_step {
            return Err(IntegrationError::StepUnderflow {
                t,
                h,
                reason: failure.describe().into(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::test_systems::{Oscillator, Pendulum};

    #[test]
    fn states_on_the_level_are_untouched() {
        let sys = Oscillator { omega: 1.3 };
        let mut y = [0.4, -0.7];
        let level = sys.invariant(InvariantKind::Energy, &y).unwrap();
        assert!(project(&sys, &mut y, &[(InvariantKind::Energy, level)], 1e-14, 10));
        assert_eq!(y, [0.4, -0.7]);
    }

    #[test]
    fn projection_reaches_the_level() {
        let sys = Pendulum;
        let mut y = [0.9, 0.3];
        assert!(project(&sys, &mut y, &[(InvariantKind::Energy, -0.55)], 1e-14, 20));
        assert!((sys.invariant(InvariantKind::Energy, &y).unwrap() + 0.55).abs() <= 1e-14);
    }

    #[test]
    fn missing_invariants_are_reported() {
        let err = levels(&Pendulum, &[InvariantKind::AngularMomentum], &[0.0, 0.0]);
        assert_eq!(err, Err(IntegrationError::MissingInvariant(InvariantKind::AngularMomentum)));
    }

    #[test]
    fn energy_drift_stays_below_newton_tolerance() {
        let sys = Oscillator { omega: 1.0 };
        let config = IntegratorConfig::projection(1e-6, &[InvariantKind::Energy]);
        let mut y = vec![1.0, 0.0];
        let lv = levels(&sys, &config.projection_targets, &y).unwrap();
        let mut t = 0.0;
        let mut worst: f64 = 0.0;
        for _ in 0..1_000_000 {
            let (h, next) = step_projection(&sys, t, &y, 0.05, &lv, &config).unwrap();
            t += h;
            y = next;
            worst = worst.max((sys.invariant(InvariantKind::Energy, &y).unwrap() - 0.5).abs());
        }
        assert!(worst <= config.newton_tol, "drift {worst}");
    }
}
