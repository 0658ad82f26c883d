use nalgebra::{DMatrix, DVector};

use super::{eval, IntegrationError, IntegratorConfig, OdeSystem, StepFailure};

/// Butcher tableau of an s-stage Gauss-Legendre method.
#[derive(Debug, Clone)]
pub struct GaussTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl GaussTableau {
    pub fn new(stages: usize) -> Self {
        match stages {
            2 => {
                let r = 3f64.sqrt() / 6.0;
                GaussTableau {
                    a: vec![vec![0.25, 0.25 - r], vec![0.25 + r, 0.25]],
                    b: vec![0.5, 0.5],
                    c: vec![0.5 - r, 0.5 + r],
                }
            }
            3 => {
                let r = 15f64.sqrt();
                GaussTableau {
                    a: vec![
                        vec![5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0],
                        vec![5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0],
                        vec![5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0],
                    ],
                    b: vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
                    c: vec![0.5 - r / 10.0, 0.5, 0.5 + r / 10.0],
                }
            }
            _ => panic!("Gauss collocation is implemented for 2 or 3 stages"),
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }
}

fn jacobian(sys: &impl OdeSystem, t: f64, y: &[f64]) -> Result<DMatrix<f64>, StepFailure> {
    let n = y.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = y.to_vec();
    let mut up = vec![0.0; n];
    let mut down = vec![0.0; n];
    for j in 0..n {
        let h = 1e-7 * y[j].abs().max(1.0);
        probe[j] = y[j] + h;
        eval(sys, t, &probe, &mut up)?;
        probe[j] = y[j] - h;
        eval(sys, t, &probe, &mut down)?;
        probe[j] = y[j];
        for i in 0..n {
            jac[(i, j)] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Solves the stage equations `Z_i = h sum_j a_ij f(t + c_j h, y + Z_j)` and returns
/// `y + h sum_i b_i f(t + c_i h, y + Z_i)`.
pub(crate) fn attempt(
    sys: &impl OdeSystem,
    tab: &GaussTableau,
    t: f64,
    y: &[f64],
    h: f64,
    config: &IntegratorConfig,
) -> Result<Vec<f64>, StepFailure> {
    let n = y.len();
    let s = tab.stages();
    let jac = jacobian(sys, t, y)?;

    // Simplified Newton matrix I - h (A kron J).
    let mut m = DMatrix::identity(n * s, n * s);
    for i in 0..s {
        for j in 0..s {
            let coef = h * tab.a[i][j];
            for r in 0..n {
                for c in 0..n {
                    m[(i * n + r, j * n + c)] -= coef * jac[(r, c)];
                }
            }
        }
    }
    let lu = m.lu();

    let mut f0 = vec![0.0; n];
    eval(sys, t, y, &mut f0)?;
    let mut z = DVector::zeros(n * s);
    for i in 0..s {
        for r in 0..n {
            z[i * n + r] = tab.c[i] * h * f0[r];
        }
    }

    let mut f = vec![vec![0.0; n]; s];
    let mut stage = vec![0.0; n];
    let mut last_norm = f64::INFINITY;
    let mut done = false;
    for iter in 0..config.newton_max_iter {
        for i in 0..s {
            for r in 0..n {
                stage[r] = y[r] + z[i * n + r];
            }
            eval(sys, t + tab.c[i] * h, &stage, &mut f[i])?;
        }
        let mut residual = DVector::zeros(n * s);
        for i in 0..s {
            for r in 0..n {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += tab.a[i][j] * f[j][r];
                }
                residual[i * n + r] = -(z[i * n + r] - h * acc);
            }
        }
        let Some(dz) = lu.solve(&residual) else {
            return Err(StepFailure::Newton);
        };
        z += &dz;
        let norm = (0..n * s)
            .map(|k| dz[k].abs() / (1.0 + y[k % n].abs()))
            .fold(0.0, f64::max);
        if !norm.is_finite() {
            return Err(StepFailure::Newton);
        }
        // Beyond the tolerance, stop once the increments stall at round-off.
        if norm <= config.newton_tol || (norm <= 1e3 * config.newton_tol && norm >= last_norm) {
            done = true;
            break;
        }
        if iter >= 2 && norm > last_norm {
            return Err(StepFailure::Newton);
        }
        last_norm = norm;
    }
    if !done {
        return Err(StepFailure::Newton);
    }

    for i in 0..s {
        for r in 0..n {
            stage[r] = y[r] + z[i * n + r];
        }
        eval(sys, t + tab.c[i] * h, &stage, &mut f[i])?;
    }
    let mut y_new = y.to_vec();
    for r in 0..n {
        let mut acc = 0.0;
        for i in 0..s {
            acc += tab.b[i] * f[i][r];
        }
        y_new[r] += h * acc;
    }
    Ok(y_new)
}

/// One Gauss collocation step of size `dt` with `config.order` stages, halving on
/// solver failure. Returns the step taken and the new state.
pub fn step_collocation(
    sys: &impl OdeSystem,
    t: f64,
    y: &[f64],
    dt: f64,
    config: &IntegratorConfig,
) -> Result<(f64, Vec<f64>), IntegrationError> {
    config.validate()?;
    let tab = GaussTableau::new(config.order);
    let mut h = dt;
    loop {
        match attempt(sys, &tab, t, y, h, config) {
            Ok(y_new) => return Ok((h, y_new)),
            Err(failure) => {
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
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::test_systems::{Linear, Pendulum};
    use crate::integrators::InvariantKind;
    use num_complex::Complex64;

    #[test]
    fn tableaus_satisfy_simplifying_conditions() {
        for s in [2, 3] {
            let tab = GaussTableau::new(s);
            for i in 0..s {
                let row: f64 = tab.a[i].iter().sum();
                assert!((row - tab.c[i]).abs() < 1e-15);
            }
            // B(2s): sum b_i c_i^(k-1) = 1/k.
            for k in 1..=2 * s {
                let q: f64 = (0..s).map(|i| tab.b[i] * tab.c[i].powi(k as i32 - 1)).sum();
                assert!((q - 1.0 / k as f64).abs() < 1e-15, "s={s} k={k}");
            }
        }
    }

    #[test]
    fn two_stage_step_is_the_diagonal_pade_approximant() {
        let lambda = Complex64::new(-0.4, 1.7);
        let sys = Linear { re: lambda.re, im: lambda.im };
        let config = IntegratorConfig::collocation(2, 0.1);
        for h in [0.05, 0.1, 0.3] {
            let (taken, y) = step_collocation(&sys, 0.0, &[1.0, 0.0], h, &config).unwrap();
            assert_eq!(taken, h);
            let z = lambda * h;
            let r = (1.0 + z / 2.0 + z * z / 12.0) / (1.0 - z / 2.0 + z * z / 12.0);
            assert!((y[0] - r.re).abs() < 1e-12 && (y[1] - r.im).abs() < 1e-12);
        }
    }

    fn convergence_order(stages: usize) -> f64 {
        let sys = Linear { re: -0.2, im: 1.0 };
        let config = IntegratorConfig::collocation(stages, 1.0);
        let error_for = |n: usize| {
            let h = 4.0 / n as f64;
            let mut y = vec![1.0, 0.0];
            for i in 0..n {
                y = step_collocation(&sys, i as f64 * h, &y, h, &config).unwrap().1;
            }
            let a = (-0.8f64).exp();
            (y[0] - a * 4f64.cos()).hypot(y[1] - a * 4f64.sin())
        };
        (error_for(8) / error_for(16)).log2()
    }

    #[test]
    fn nominal_orders() {
        let o2 = convergence_order(2);
        let o3 = convergence_order(3);
        assert!((o2 - 4.0).abs() < 0.2, "{o2}");
        assert!((o3 - 6.0).abs() < 0.2, "{o3}");
    }

    #[test]
    fn pendulum_energy_has_no_drift() {
        let sys = Pendulum;
        let config = IntegratorConfig::collocation(3, 0.2);
        let mut y = vec![1.2, 0.0];
        let h0 = sys.invariant(InvariantKind::Energy, &y).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..20_000 {
            y = step_collocation(&sys, i as f64 * 0.2, &y, 0.2, &config).unwrap().1;
            worst = worst.max((sys.invariant(InvariantKind::Energy, &y).unwrap() - h0).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }
}
