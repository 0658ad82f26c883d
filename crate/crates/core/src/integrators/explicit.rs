use super::{eval, OdeSystem, StepFailure};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand-Prince 5(4) pair with local extrapolation.
pub(crate) struct DormandPrince {
    k: Vec<Vec<f64>>,
    stage: Vec<f64>,
}

pub(crate) struct ExplicitStep {
    pub y: Vec<f64>,
    /// Weighted RMS norm of the embedded error estimate.
    pub err: f64,
}

impl DormandPrince {
    pub fn new(n: usize) -> Self {
        DormandPrince {
            k: vec![vec![0.0; n]; 7],
            stage: vec![0.0; n],
        }
    }

    pub fn attempt(
        &mut self,
        sys: &impl OdeSystem,
        t: f64,
        y: &[f64],
        h: f64,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Result<ExplicitStep, StepFailure> {
        let n = y.len();
        eval(sys, t, y, &mut self.k[0])?;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.stage[i] = y[i] + h * acc;
            }
            eval(sys, t + C[s] * h, &self.stage, &mut self.k[s])?;
        }
        // Stage 7 is evaluated at the fifth-order solution itself.
        let y_new = self.stage.clone();
        let mut sum = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * self.k[s][i];
            }
            let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            let r = h * e / scale;
            sum += r * r;
        }
        let err = (sum / n as f64).sqrt();
        Ok(ExplicitStep {
            y: y_new,
            err: if err.is_finite() { err } else { f64::INFINITY },
        })
    }
}

/// PI step-size controller.
pub(crate) struct PiController {
    err_old: f64,
}

const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

impl PiController {
    pub fn new() -> Self {
        PiController { err_old: 1e-4 }
    }

    /// Factor for the next step after an accepted step with error `err`.
    pub fn accept(&mut self, err: f64) -> f64 {
        let err = err.max(1e-10);
        let fac = SAFETY * err.powf(-EXPO1) * self.err_old.powf(BETA);
        self.err_old = err;
        fac.clamp(MIN_FACTOR, MAX_FACTOR)
    }

    pub fn reject(&self, err: f64) -> f64 {
        if err.is_finite() {
            (SAFETY * err.powf(-EXPO1)).clamp(MIN_FACTOR, 1.0)
        } else {
            MIN_FACTOR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::test_systems::Linear;

    #[test]
    fn tableau_rows_are_consistent() {
        for s in 1..7 {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-15, "row {s}");
        }
        let b: f64 = A[6].iter().sum();
        assert!((b - 1.0).abs() < 1e-15);
        assert!(E.iter().sum::<f64>().abs() < 1e-16);
    }

    #[test]
    fn fifth_order_convergence() {
        let sys = Linear { re: -0.3, im: 1.0 };
        let exact = |t: f64| {
            let a = (-0.3 * t).exp();
            [a * t.cos(), a * t.sin()]
        };
        let error_for = |n: usize| {
            let h = 2.0 / n as f64;
            let mut y = vec![1.0, 0.0];
            let mut dp = DormandPrince::new(2);
            for i in 0..n {
                y = dp.attempt(&sys, i as f64 * h, &y, h, 1.0, 1.0).unwrap().y;
            }
            let e = exact(2.0);
            (y[0] - e[0]).hypot(y[1] - e[1])
        };
        let order = (error_for(10) / error_for(20)).log2();
        assert!((order - 5.0).abs() < 0.2, "order {order}");
    }
}
