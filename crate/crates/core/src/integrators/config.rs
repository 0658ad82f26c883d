use serde::{Deserialize, Serialize};

use super::{IntegrationError, InvariantKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dormand-Prince 5(4) with projection onto invariant levels.
    ExplicitRkProjection,
    /// Gauss-Legendre collocation with `order` stages.
    GaussCollocation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Order of the explicit base method, or the number of collocation stages.
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; the collocation method steps with exactly this size.
    pub max_step: f64,
    pub min_step: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub projection_targets: Vec<InvariantKind>,
    /// Budget of accepted plus rejected steps per integration.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::ExplicitRkProjection,
            order: 5,
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_step: 100.0,
            min_step: 1e-14,
            newton_tol: 1e-12,
            newton_max_iter: 20,
            projection_targets: vec![InvariantKind::Energy],
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Plain adaptive Dormand-Prince without projection.
    pub fn explicit(tol: f64) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol,
            projection_targets: Vec::new(),
            ..Self::default()
        }
    }

    pub fn projection(tol: f64, targets: &[InvariantKind]) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol,
            projection_targets: targets.to_vec(),
            ..Self::default()
        }
    }

    pub fn collocation(stages: usize, step: f64) -> Self {
        IntegratorConfig {
            method: Method::GaussCollocation,
            order: stages,
            max_step: step,
            newton_tol: 1e-15,
            newton_max_iter: 50,
            projection_targets: Vec::new(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |msg: String| Err(IntegrationError::InvalidConfig(msg));
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("newton_tol", self.newton_tol),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
        ] {
            if !(v > 0.0) || v.is_nan() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.min_step >= self.max_step {
            return bad(format!(
                "min_step ({}) must be smaller than max_step ({})",
                self.min_step, self.max_step
            ));
        }
        if self.newton_max_iter == 0 || self.max_steps == 0 {
            return bad("iteration budgets must be nonzero".into());
        }
        match self.method {
            Method::ExplicitRkProjection if self.order != 5 => {
                bad(format!("the projection base method has order 5, got {}", self.order))
            }
            Method::GaussCollocation if !(2..=3).contains(&self.order) => {
                bad(format!("collocation supports 2 or 3 stages, got {}", self.order))
            }
            _ => Ok(()),
        }
    }
}
