//! Scattering map of the reduced unbalanced system: flight from the secant
//! `r = r_max` back to it, followed by reinjection of the angles.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::integrators::{
    integrate_until_event, Direction, EventSpec, IntegrationError, IntegratorConfig,
    InvariantKind, OdeSystem, Outcome,
};
use crate::model::reduced::momentum_roots;
use crate::model::{
    from_reduced, impact_parameter, momentum_on_energy_level, reduced_hamiltonian, to_reduced,
    wrap_angle, Branch, CanonicalSystem, FoilParams, ReducedState, ReducedSystem,
};
use crate::unbalanced::{find_critical, k_critical};

fn default_flight_time() -> f64 {
    1e6
}

fn default_integrator() -> IntegratorConfig {
    IntegratorConfig::projection(1e-12, &[InvariantKind::Energy])
}

/// Coordinates a leg is stepped in; both carry the same reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegChart {
    /// Canonical variables in the fixed frame, reduced again at the secant.
    ///
    /// Far from the source the motion is nearly uniform here, so steps can be long.
    #[default]
    Inertial,
    /// The co-rotating chart `(x, y, p_x, p_y)`; near the secant it turns at the
    /// foil's angular velocity, which caps the step length.
    CoRotating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    pub params: FoilParams,
    pub q: f64,
    pub r_max: f64,
    pub h: f64,
    pub k: f64,
    pub branch: Branch,
    /// Time budget of a single secant-to-secant leg.
    #[serde(default = "default_flight_time")]
    pub max_flight_time: f64,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub chart: LegChart,
    /// Permit levels on which orbits may reach the contact circle.
    #[serde(default)]
    pub allow_unsafe_level: bool,
}

impl ScatterConfig {
    pub fn new(params: FoilParams, q: f64, r_max: f64, h: f64, k: f64, branch: Branch) -> Self {
        ScatterConfig {
            params,
            q,
            r_max,
            h,
            k,
            branch,
            max_flight_time: default_flight_time(),
            integrator: default_integrator(),
            chart: LegChart::default(),
            allow_unsafe_level: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.integrator.validate()?;
        let bad = |name, reason: String| Err(ModelError::InvalidParameter { name, reason });
        if !(self.r_max > self.params.radius) || !self.r_max.is_finite() {
            return bad("r_max", format!("secant radius {} must exceed R = {}", self.r_max, self.params.radius));
        }
        if !(self.max_flight_time > 0.0) {
            return bad("max_flight_time", format!("must be positive, got {}", self.max_flight_time));
        }
        if !self.h.is_finite() || !self.k.is_finite() || !self.q.is_finite() {
            return bad("level", "h, k and q must be finite".into());
        }
        let n = 32;
        let reachable = (0..n).any(|i| {
            (0..n).any(|j| {
                let phi = 2.0 * PI * i as f64 / n as f64;
                let alpha = 2.0 * PI * j as f64 / n as f64;
                momentum_on_energy_level(self.r_max, phi, alpha, self.h, self.k, self.branch, &self.params, self.q)
                    .is_ok()
            })
        });
        if !reachable {
            return Err(ModelError::UnreachableEnergy { h: self.h });
        }
        if !self.allow_unsafe_level {
            if let Some(reason) = self.level_hazard() {
                return bad("h", reason);
            }
        }
        Ok(())
    }

    /// Why orbits on this level might fall on the source, if they can.
    pub fn level_hazard(&self) -> Option<String> {
        let k_cr = k_critical(&self.params, self.q);
        if self.k.abs() <= k_cr {
            return Some(format!("|k| = {} does not exceed k_cr = {k_cr}", self.k.abs()));
        }
        if !(self.h > 0.0) {
            return Some(format!("h = {} is not positive", self.h));
        }
        let barrier = find_critical(self.k, &self.params, self.q)
            .0
            .iter()
            .map(|c| c.value)
            .fold(f64::INFINITY, f64::min);
        if !(self.h < barrier) {
            return Some(format!("h = {} is not below the saddle value {barrier}", self.h));
        }
        None
    }

    fn system(&self) -> ReducedSystem {
        ReducedSystem::new(self.params, self.q, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegOutcome {
    Returned,
    Contact,
    Timeout,
}

impl LegOutcome {
    pub fn name(self) -> &'static str {
        match self {
            LegOutcome::Returned => "returned",
            LegOutcome::Contact => "contact",
            LegOutcome::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    /// Reduced state where the leg ended; on the secant when it returned.
    pub end: ReducedState,
    pub outcome: LegOutcome,
    pub flight_time: f64,
    /// The chosen root pointed outward, so the leg has zero length.
    pub degenerate: bool,
}

fn radial_rate(sys: &ReducedSystem, y: &[f64]) -> Result<f64> {
    let mut d = [0.0; 4];
    sys.rhs(0.0, y, &mut d).map_err(|_| ModelError::Contact {
        separation: y[0].hypot(y[1]),
        radius: sys.params.radius,
    })?;
    Ok((y[0] * d[0] + y[1] * d[1]) / y[0].hypot(y[1]))
}

/// Direct map: flight from the secant point `(phi, alpha)` until it crosses the secant outward.
pub fn direct_map(phi: f64, alpha: f64, cfg: &ScatterConfig) -> Result<Leg> {
    let p = momentum_on_energy_level(cfg.r_max, phi, alpha, cfg.h, cfg.k, cfg.branch, &cfg.params, cfg.q)?;
    let start = ReducedState { r: cfg.r_max, phi, p, alpha, k: cfg.k };
    let sys = cfg.system();
    let y0 = start.to_cartesian();
    if radial_rate(&sys, &y0)? > 0.0 {
        return Ok(Leg { end: start, outcome: LegOutcome::Returned, flight_time: 0.0, degenerate: true });
    }
    let events = [
        EventSpec::secant(cfg.r_max, Direction::Increasing),
        EventSpec::contact(cfg.params.radius),
        EventSpec::max_time(cfg.max_flight_time),
    ];
    let (report, mut end) = match cfg.chart {
        LegChart::CoRotating => {
            let report = integrate_until_event(&sys, 0.0, &y0, &events, &cfg.integrator, None)?;
            let end = sys.state(&report.y);
            (report, end)
        }
        LegChart::Inertial => {
            let canonical = CanonicalSystem::new(cfg.params, cfg.q);
            let y0 = CanonicalSystem::to_vector(&from_reduced(&start, 0.0, &cfg.params, cfg.q))?;
            let report = integrate_until_event(&canonical, 0.0, &y0, &events, &cfg.integrator, None)?;
            let end = to_reduced(&CanonicalSystem::state(&report.y), &cfg.params, cfg.q)?.state;
            (report, end)
        }
    };
    let outcome = match report.outcome {
        Outcome::Secant => LegOutcome::Returned,
        Outcome::Contact => LegOutcome::Contact,
        Outcome::MaxTime | Outcome::StepBudget | Outcome::Escape => LegOutcome::Timeout,
    };
    end.k = cfg.k;
    if outcome == LegOutcome::Returned {
        // The event is located to round-off; pin the radius to the secant exactly.
        end.r = cfg.r_max;
    }
    Ok(Leg { end, outcome, flight_time: report.t, degenerate: false })
}

/// Feedback map: `alpha' = alpha`, `phi' = 2 alpha - phi + pi`, both wrapped to `[0, 2 pi)`.
pub fn feedback_map(alpha: f64, phi: f64) -> (f64, f64) {
    (wrap_angle(alpha), wrap_angle(2.0 * alpha - phi + PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    /// Zero for the launch point, `n` for the end of the `n`-th leg.
    pub iter: usize,
    pub alpha: f64,
    pub phi: f64,
    pub b: f64,
    pub p: f64,
    pub r: f64,
    pub outcome: LegOutcome,
    /// Momentum root the point lies on.
    pub branch: Branch,
    pub degenerate: bool,
}

impl ScatterPoint {
    fn at(iter: usize, rs: &ReducedState, outcome: LegOutcome, branch: Branch, degenerate: bool, params: &FoilParams) -> Self {
        ScatterPoint {
            iter,
            alpha: wrap_angle(rs.alpha),
            phi: wrap_angle(rs.phi),
            b: impact_parameter(rs, params),
            p: rs.p,
            r: rs.r,
            outcome,
            branch,
            degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitEnd {
    Completed,
    Contact,
    Timeout,
    /// The reinjected angles admit no momentum on the chosen branch.
    Unreachable,
    /// The integrator gave up; the message is in `ScatterOrbit::failure`.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterOrbit {
    pub points: Vec<ScatterPoint>,
    pub end: OrbitEnd,
    pub failure: Option<String>,
}

/// Branch whose root is nearest to `p` at a point of the secant, with the distance to it.
pub fn realized_branch(rs: &ReducedState, cfg: &ScatterConfig) -> Option<(Branch, f64)> {
    let (lo, hi) = momentum_roots(rs.r, rs.phi, rs.alpha, cfg.h, cfg.k, &cfg.params, cfg.q).ok()??;
    let (dlo, dhi) = ((rs.p - lo).abs(), (rs.p - hi).abs());
    Some(if dlo < dhi { (Branch::Smallest, dlo) } else { (Branch::Largest, dhi) })
}

/// Iterates the composition of the feedback and direct maps from a launch point.
pub fn scatter_orbit(phi0: f64, alpha0: f64, n_iter: usize, cfg: &ScatterConfig) -> Result<ScatterOrbit> {
    let p0 = momentum_on_energy_level(cfg.r_max, phi0, alpha0, cfg.h, cfg.k, cfg.branch, &cfg.params, cfg.q)?;
    let launch = ReducedState { r: cfg.r_max, phi: phi0, p: p0, alpha: alpha0, k: cfg.k };
    let branch0 = realized_branch(&launch, cfg).map_or(cfg.branch, |b| b.0);
    let mut points = vec![ScatterPoint::at(0, &launch, LegOutcome::Returned, branch0, false, &cfg.params)];
    let (mut phi, mut alpha) = (phi0, alpha0);
    for iter in 1..=n_iter {
        let leg = match direct_map(phi, alpha, cfg) {
            Ok(leg) => leg,
            Err(ModelError::UnreachableEnergy { .. }) => {
                return Ok(ScatterOrbit { points, end: OrbitEnd::Unreachable, failure: None });
            }
            Err(ModelError::Integration(e)) => {
                return Ok(ScatterOrbit { points, end: OrbitEnd::Failed, failure: Some(describe(&e)) });
            }
            Err(e) => return Err(e),
        };
        let branch = if leg.outcome == LegOutcome::Returned {
            realized_branch(&leg.end, cfg).map_or(cfg.branch, |b| b.0)
        } else {
            cfg.branch
        };
        points.push(ScatterPoint::at(iter, &leg.end, leg.outcome, branch, leg.degenerate, &cfg.params));
        match leg.outcome {
            LegOutcome::Returned => {}
            LegOutcome::Contact => return Ok(ScatterOrbit { points, end: OrbitEnd::Contact, failure: None }),
            LegOutcome::Timeout => return Ok(ScatterOrbit { points, end: OrbitEnd::Timeout, failure: None }),
        }
        (alpha, phi) = feedback_map(leg.end.alpha, leg.end.phi);
    }
    Ok(ScatterOrbit { points, end: OrbitEnd::Completed, failure: None })
}

fn describe(e: &IntegrationError) -> String {
    e.to_string()
}

/// Launch angle `phi` on the secant for a given `alpha` and impact parameter, moving inward.
pub fn launch_phi(alpha: f64, b: f64, cfg: &ScatterConfig) -> Option<f64> {
    let a_m = cfg.params.static_moment() / cfg.params.m();
    let u = (b - a_m * alpha.sin()) / cfg.r_max;
    if u.abs() > 1.0 {
        return None;
    }
    // cos(alpha - phi) < 0 points the momentum toward the source.
    Some(wrap_angle(alpha - (PI - u.asin())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Span {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Initial conditions: `alpha` against either the impact parameter or `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ordinate", rename_all = "snake_case", deny_unknown_fields)]
pub enum PortraitGrid {
    B { alpha: Span, b: Span },
    Phi { alpha: Span, phi: Span },
}

impl PortraitGrid {
    /// `(alpha, ordinate)` pairs in row-major order, `alpha` varying fastest.
    pub fn starts(&self) -> Vec<(f64, f64)> {
        let (alpha, other) = match self {
            PortraitGrid::B { alpha, b } => (alpha, b),
            PortraitGrid::Phi { alpha, phi } => (alpha, phi),
        };
        let alphas = alpha.values();
        other
            .values()
            .into_iter()
            .flat_map(|o| alphas.iter().map(move |&a| (a, o)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitOrbit {
    pub orbit_id: usize,
    pub alpha0: f64,
    pub ordinate0: f64,
    pub orbit: ScatterOrbit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub r_max: f64,
    pub branch: Branch,
    pub orbits: Vec<PortraitOrbit>,
    /// Grid indices whose start admits no launch on the secant.
    pub holes: Vec<usize>,
}

impl Portrait {
    /// Returned, non-degenerate points suitable for plotting.
    pub fn points(&self) -> impl Iterator<Item = (usize, &ScatterPoint)> {
        self.orbits.iter().flat_map(|o| {
            o.orbit
                .points
                .iter()
                .filter(|p| p.outcome == LegOutcome::Returned && !p.degenerate)
                .map(move |p| (o.orbit_id, p))
        })
    }
}

pub fn scatter_portrait(grid: &PortraitGrid, n_iter: usize, cfg: &ScatterConfig) -> Result<Portrait> {
    cfg.validate()?;
    let starts = grid.starts();
    let results: Vec<Result<Option<ScatterOrbit>>> = starts
        .par_iter()
        .map(|&(alpha, ord)| {
            let phi = match grid {
                PortraitGrid::B { .. } => match launch_phi(alpha, ord, cfg) {
                    Some(phi) => phi,
                    None => return Ok(None),
                },
                PortraitGrid::Phi { .. } => ord,
            };
            match scatter_orbit(phi, alpha, n_iter, cfg) {
                Ok(o) => Ok(Some(o)),
                Err(ModelError::UnreachableEnergy { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut portrait = Portrait { r_max: cfg.r_max, branch: cfg.branch, orbits: Vec::new(), holes: Vec::new() };
    for (id, (res, &(alpha0, ordinate0))) in results.into_iter().zip(&starts).enumerate() {
        match res? {
            Some(orbit) => portrait.orbits.push(PortraitOrbit { orbit_id: id, alpha0, ordinate0, orbit }),
            None => portrait.holes.push(id),
        }
    }
    Ok(portrait)
}

/// Energy of a recorded point minus the level `h`.
pub fn energy_residual(point: &ScatterPoint, cfg: &ScatterConfig) -> Result<f64> {
    let rs = ReducedState { r: point.r, phi: point.phi, p: point.p, alpha: point.alpha, k: cfg.k };
    Ok(reduced_hamiltonian(&rs, &cfg.params, cfg.q)? - cfg.h)
}

/// Composed map in portrait coordinates: a launch `(alpha, b)` to the next launch `(alpha', b')`.
///
/// The feedback map leaves both `alpha` and `b` unchanged, so the image is read at the end of the leg.
pub fn portrait_map(alpha: f64, b: f64, cfg: &ScatterConfig) -> Result<(f64, f64)> {
    let phi = launch_phi(alpha, b, cfg).ok_or(ModelError::UnreachableEnergy { h: cfg.h })?;
    let leg = direct_map(phi, alpha, cfg)?;
    if leg.outcome != LegOutcome::Returned {
        return Err(ModelError::UnreachableEnergy { h: cfg.h });
    }
    Ok((leg.end.alpha, impact_parameter(&leg.end, &cfg.params)))
}

/// Central-difference Jacobian of [`portrait_map`], with the angle unwrapped around the centre image.
pub fn map_jacobian(alpha: f64, b: f64, eps: f64, cfg: &ScatterConfig) -> Result<[[f64; 2]; 2]> {
    let centre = portrait_map(alpha, b, cfg)?;
    let unwrap = |x: f64| centre.0 + (x - centre.0 + PI).rem_euclid(2.0 * PI) - PI;
    let mut jac = [[0.0; 2]; 2];
    for (col, (da, db)) in [(eps, 0.0), (0.0, eps)].into_iter().enumerate() {
        let plus = portrait_map(alpha + da, b + db, cfg)?;
        let minus = portrait_map(alpha - da, b - db, cfg)?;
        jac[0][col] = (unwrap(plus.0) - unwrap(minus.0)) / (2.0 * eps);
        jac[1][col] = (plus.1 - minus.1) / (2.0 * eps);
    }
    Ok(jac)
}
