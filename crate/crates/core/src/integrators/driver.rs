use serde::{Deserialize, Serialize};

use super::collocation::{self, GaussTableau};
use super::explicit::{DormandPrince, PiController};
use super::projection::{self, levels, project};
use super::{eval, IntegrationError, IntegratorConfig, InvariantKind, Method, OdeSystem, StepFailure};

/// Relative offset of the contact threshold from the foil radius.
pub const DEFAULT_CONTACT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EventKind {
    /// The radius crosses `radius`.
    Secant { radius: f64 },
    /// The radius falls to `radius * (1 + epsilon)`.
    Contact { radius: f64, epsilon: f64 },
    /// The radius grows to `radius`.
    Escape { radius: f64 },
    MaxTime { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    pub refinement_tol: f64,
}

const REFINEMENT_TOL: f64 = 1e-12;

impl EventSpec {
    pub fn secant(radius: f64, direction: Direction) -> Self {
        EventSpec {
            kind: EventKind::Secant { radius },
            direction,
            refinement_tol: REFINEMENT_TOL,
        }
    }

    pub fn contact(radius: f64) -> Self {
        EventSpec {
            kind: EventKind::Contact {
                radius,
                epsilon: DEFAULT_CONTACT_EPSILON,
            },
            direction: Direction::Decreasing,
            refinement_tol: REFINEMENT_TOL,
        }
    }

    pub fn escape(radius: f64) -> Self {
        EventSpec {
            kind: EventKind::Escape { radius },
            direction: Direction::Increasing,
            refinement_tol: REFINEMENT_TOL,
        }
    }

    pub fn max_time(t: f64) -> Self {
        EventSpec {
            kind: EventKind::MaxTime { t },
            direction: Direction::Increasing,
            refinement_tol: REFINEMENT_TOL,
        }
    }

    fn threshold(&self) -> Option<f64> {
        match self.kind {
            EventKind::Secant { radius } | EventKind::Escape { radius } => Some(radius),
            EventKind::Contact { radius, epsilon } => Some(radius * (1.0 + epsilon)),
            EventKind::MaxTime { .. } => None,
        }
    }

    fn outcome(&self) -> Outcome {
        match self.kind {
            EventKind::Secant { .. } => Outcome::Secant,
            EventKind::Contact { .. } => Outcome::Contact,
            EventKind::Escape { .. } => Outcome::Escape,
            EventKind::MaxTime { .. } => Outcome::MaxTime,
        }
    }

    fn fires(&self, g0: f64, g1: f64) -> bool {
        let up = g0 < 0.0 && g1 >= 0.0;
        let down = g0 > 0.0 && g1 <= 0.0;
        match self.direction {
            Direction::Increasing => up,
            Direction::Decreasing => down,
            Direction::Any => up || down,
        }
    }

    fn validate(&self) -> Result<(), IntegrationError> {
        let ok = self.refinement_tol > 0.0
            && match self.kind {
                EventKind::Secant { radius } | EventKind::Escape { radius } => radius > 0.0,
                EventKind::Contact { radius, epsilon } => radius > 0.0 && epsilon >= 0.0,
                EventKind::MaxTime { t } => !t.is_nan(),
            };
        if ok {
            Ok(())
        } else {
            Err(IntegrationError::InvalidConfig(format!("invalid event {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Secant,
    Contact,
    Escape,
    MaxTime,
    /// The step budget ran out before any event fired.
    StepBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationReport {
    pub t: f64,
    pub y: Vec<f64>,
    pub outcome: Outcome,
    /// Index into the supplied events of the event that fired.
    pub event: Option<usize>,
    /// Contact declared after step-size underflow close to the contact threshold.
    pub near_contact: bool,
    pub steps: usize,
    pub rejected: usize,
    /// Samples `(t, y)` at the requested interval, plus the start and end states.
    pub trace: Vec<(f64, Vec<f64>)>,
}

enum Engine {
    Explicit {
        dp: DormandPrince,
        ctrl: PiController,
        levels: Vec<(InvariantKind, f64)>,
    },
    Gauss(GaussTableau),
}

impl Engine {
    fn attempt(
        &mut self,
        sys: &impl OdeSystem,
        t: f64,
        y: &[f64],
        h: f64,
        config: &IntegratorConfig,
    ) -> Result<(Vec<f64>, f64), StepFailure> {
        match self {
            Engine::Explicit { dp, levels, .. } => {
                projection::attempt(dp, sys, t, y, h, levels, config)
            }
            Engine::Gauss(tab) => collocation::attempt(sys, tab, t, y, h, config).map(|y| (y, 0.0)),
        }
    }

    /// A step of arbitrary length inside an already accepted step.
    fn substep(
        &mut self,
        sys: &impl OdeSystem,
        t: f64,
        y: &[f64],
        h: f64,
        config: &IntegratorConfig,
    ) -> Result<Vec<f64>, StepFailure> {
        if h == 0.0 {
            return Ok(y.to_vec());
        }
        match self {
            Engine::Explicit { dp, levels, .. } => {
                let mut y_new = dp.attempt(sys, t, y, h, config.rel_tol, config.abs_tol)?.y;
                if project(sys, &mut y_new, levels, config.newton_tol, config.newton_max_iter) {
                    Ok(y_new)
                } else {
                    Err(StepFailure::Newton)
                }
            }
            Engine::Gauss(tab) => collocation::attempt(sys, tab, t, y, h, config),
        }
    }

    fn next_step(&mut self, h: f64, err: f64, config: &IntegratorConfig) -> f64 {
        match self {
            Engine::Explicit { ctrl, .. } => (h * ctrl.accept(err)).min(config.max_step),
            Engine::Gauss(_) => (2.0 * h).min(config.max_step),
        }
    }

    fn shrink(&self, h: f64, err: f64) -> f64 {
        match self {
            Engine::Explicit { ctrl, .. } => h * ctrl.reject(err),
            Engine::Gauss(_) => 0.5 * h,
        }
    }
}

fn initial_step(y: &[f64], f0: &[f64], config: &IntegratorConfig) -> f64 {
    if matches!(config.method, Method::GaussCollocation) {
        return config.max_step;
    }
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = config.abs_tol + config.rel_tol * yi.abs();
        d0 = d0.max((yi / sc).abs());
        d1 = d1.max((fi / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.clamp(config.min_step * 10.0, config.max_step)
}

fn event_value(sys: &impl OdeSystem, ev: &EventSpec, y: &[f64]) -> Option<f64> {
    Some(sys.radius(y)? - ev.threshold()?)
}

/// Advances `y0` from `t0` until the first event fires.
///
/// Event times are located by regula falsi (Illinois variant) on the length of a
/// single method step taken from the start of the step that bracketed the
/// crossing, so the reported state is itself a state produced by the method.
pub fn integrate_until_event(
    sys: &impl OdeSystem,
    t0: f64,
    y0: &[f64],
    events: &[EventSpec],
    config: &IntegratorConfig,
    trace_interval: Option<f64>,
) -> Result<IntegrationReport, IntegrationError> {
    config.validate()?;
    if y0.len() != sys.dim() {
        return Err(IntegrationError::Dimension {
            expected: sys.dim(),
            found: y0.len(),
        });
    }
    for ev in events {
        ev.validate()?;
    }
    if let Some(dt) = trace_interval {
        if !(dt > 0.0) {
            return Err(IntegrationError::InvalidConfig(format!(
                "trace interval must be positive, got {dt}"
            )));
        }
    }

    let mut report = IntegrationReport {
        t: t0,
        y: y0.to_vec(),
        outcome: Outcome::MaxTime,
        event: None,
        near_contact: false,
        steps: 0,
        rejected: 0,
        trace: vec![(t0, y0.to_vec())],
    };

    let t_end = events
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match e.kind {
            EventKind::MaxTime { t } => Some((i, t)),
            _ => None,
        })
        .fold(None, |best: Option<(usize, f64)>, (i, t)| match best {
            Some((_, bt)) if bt <= t => best,
            _ => Some((i, t)),
        });

    // Terminal regions already occupied at the start.
    let r0 = sys.radius(y0);
    for (i, ev) in events.iter().enumerate() {
        let inside = match (ev.kind, r0) {
            (EventKind::Contact { .. }, Some(r)) => r <= ev.threshold().unwrap_or(0.0),
            (EventKind::Escape { radius }, Some(r)) => r >= radius,
            (EventKind::MaxTime { t }, _) => t0 >= t,
            _ => false,
        };
        if inside {
            report.outcome = ev.outcome();
            report.event = Some(i);
            return Ok(report);
        }
    }

    let mut f0 = vec![0.0; y0.len()];
    eval(sys, t0, y0, &mut f0).map_err(|_| IntegrationError::InitialDomain)?;

    let mut engine = match config.method {
        Method::ExplicitRkProjection => Engine::Explicit {
            dp: DormandPrince::new(y0.len()),
            ctrl: PiController::new(),
            levels: levels(sys, &config.projection_targets, y0)?,
        },
        Method::GaussCollocation => Engine::Gauss(GaussTableau::new(config.order)),
    };

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = initial_step(y0, &f0, config);
    let mut g: Vec<Option<f64>> = events.iter().map(|e| event_value(sys, e, &y)).collect();
    let mut next_sample = trace_interval.map_or(f64::INFINITY, |dt| t0 + dt);
    let mut sample_index = 1usize;

    loop {
        if report.steps >= config.max_steps {
            report.outcome = Outcome::StepBudget;
            break;
        }
        let remaining = t_end.map_or(f64::INFINITY, |(_, te)| te - t);
        let final_step = h >= remaining;
        let h_try = if final_step { remaining } else { h };
        report.steps += 1;

        let (y1, err) = match engine.attempt(sys, t, &y, h_try, config) {
            Ok((y1, err)) if err <= 1.0 => (y1, err),
            other => {
                report.rejected += 1;
                let (err, reason) = match other {
                    Ok((_, err)) => (err, "error estimate above tolerance"),
                    Err(f) => (f64::INFINITY, f.describe()),
                };
                h = engine.shrink(h_try, err);
                if h < config.min_step {
                    let contact = events.iter().position(|e| {
                        matches!(e.kind, EventKind::Contact { .. })
                            && sys
                                .radius(&y)
                                .zip(e.threshold())
                                .is_some_and(|(r, thr)| r <= thr * 1.01)
                    });
                    if let Some(i) = contact {
                        report.outcome = Outcome::Contact;
                        report.event = Some(i);
                        report.near_contact = true;
                        break;
                    }
                    return Err(IntegrationError::StepUnderflow {
                        t,
                        h,
                        reason: reason.into(),
                    });
                }
                continue;
            }
        };
        let t1 = if final_step { t_end.unwrap().1 } else { t + h_try };

        // Earliest event bracketed by this step.
        let mut hit: Option<(usize, f64, Vec<f64>)> = None;
        let g1: Vec<Option<f64>> = events.iter().map(|e| event_value(sys, e, &y1)).collect();
        for (i, ev) in events.iter().enumerate() {
            let (Some(a), Some(b)) = (g[i], g1[i]) else {
                continue;
            };
            if !ev.fires(a, b) {
                continue;
            }
            let (tau, y_ev) = locate(sys, &mut engine, ev, t, &y, h_try, a, b, &y1, config)?;
            if hit.as_ref().map_or(true, |(_, best, _)| tau < *best) {
                hit = Some((i, tau, y_ev));
            }
        }

        let step_end = hit.as_ref().map_or(t1, |(_, tau, _)| t + tau);
        while next_sample < step_end {
            let ys = engine
                .substep(sys, t, &y, next_sample - t, config)
                .map_err(|f| IntegrationError::StepUnderflow {
                    t,
                    h: next_sample - t,
                    reason: f.describe().into(),
                })?;
            report.trace.push((next_sample, ys));
            sample_index += 1;
            next_sample = t0 + sample_index as f64 * trace_interval.unwrap();
        }

        if let Some((i, tau, y_ev)) = hit {
            t += tau;
            y = y_ev;
            report.outcome = events[i].outcome();
            report.event = Some(i);
            break;
        }

        t = t1;
        y = y1;
        g = g1;
        if final_step {
            report.outcome = Outcome::MaxTime;
            report.event = t_end.map(|(i, _)| i);
            break;
        }
        h = engine.next_step(h_try, err, config);
    }

    report.t = t;
    if report.trace.last().map(|(ts, _)| *ts) != Some(t) || report.trace.len() == 1 {
        report.trace.push((t, y.clone()));
    }
    report.y = y;
    if trace_interval.is_none() {
        let first = report.trace.remove(0);
        let last = report.trace.pop();
        report.trace = std::iter::once(first).chain(last).collect();
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn locate(
    sys: &impl OdeSystem,
    engine: &mut Engine,
    ev: &EventSpec,
    t: f64,
    y: &[f64],
    h: f64,
    g0: f64,
    g1: f64,
    y1: &[f64],
    config: &IntegratorConfig,
) -> Result<(f64, Vec<f64>), IntegrationError> {
    let scale = ev.threshold().unwrap_or(1.0).abs().max(1.0);
    let target = 1e-13 * scale;
    let (mut a, mut ga) = (0.0, g0);
    let (mut b, mut gb, mut yb) = (h, g1, y1.to_vec());
    if gb.abs() <= target {
        return Ok((b, yb));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let yc = engine
            .substep(sys, t, y, c, config)
            .map_err(|f| IntegrationError::StepUnderflow {
                t,
                h: c,
                reason: f.describe().into(),
            })?;
        let gc = event_value(sys, ev, &yc).unwrap_or(f64::NAN);
        if gc.abs() <= target {
            return Ok((c, yc));
        }
        // Keep the bracket on the side that contains the crossing.
        if (gc > 0.0) == (gb > 0.0) {
            b = c;
            gb = gc;
            yb = yc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
        if b - a <= ev.refinement_tol {
            break;
        }
    }
    Ok((b, yb))
}

/// Integrates from `t0` to `t1` with no other events.
pub fn integrate_to(
    sys: &impl OdeSystem,
    t0: f64,
    y0: &[f64],
    t1: f64,
    config: &IntegratorConfig,
) -> Result<IntegrationReport, IntegrationError> {
    integrate_until_event(sys, t0, y0, &[EventSpec::max_time(t1)], config, None)
}
