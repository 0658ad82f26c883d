use std::path::{Path, PathBuf};

use fsd_core::balanced::bifurcation_diagram;
use fsd_core::integrators::{integrate_until_event, EventSpec, IntegratorConfig, Outcome};
use fsd_core::model::force::{force_check, ForceCheckReport};
use fsd_core::model::dynamics::to_foil_chart;
use fsd_core::model::{FullState, FullSystem, MomentumChart};
use fsd_core::scattering::{scatter_portrait, OrbitEnd, ScatterConfig};
use fsd_core::unbalanced::{critical_points, hill_regions, potential_grid, HillRegion};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{json_line, num, sidecar, write_json, CsvWriter};

pub struct Context {
    pub cfg: RunConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Context {
    fn out(&self) -> Result<&Path, Failure> {
        self.out
            .as_deref()
            .ok_or_else(|| Failure::Config("this subcommand needs --out <path>".into()))
    }

    fn metadata(&self, command: &str, integrator: Option<&IntegratorConfig>) -> Vec<(String, String)> {
        let mut meta = vec![
            ("command".into(), command.into()),
            ("version".into(), env!("FSD_GIT_DESCRIBE").into()),
            ("params".into(), json_line(&self.cfg.params)),
            ("source".into(), json_line(&self.cfg.source)),
        ];
        if let Some(i) = integrator {
            meta.push(("integrator".into(), json_line(i)));
        }
        meta.push(("seed".into(), self.seed.to_string()));
        meta
    }
}

/// Serialized name of a unit enum variant.
fn tag<T: Serialize>(value: &T) -> String {
    json_line(value).trim_matches('"').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantDrift {
    pub h0: f64,
    pub k0: f64,
    pub max_h_drift: f64,
    pub max_k_drift: f64,
}

/// Sidecar of `simulate`: how and when the run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationEvents {
    pub outcome: Outcome,
    pub t_final: f64,
    pub near_contact: bool,
    pub steps: usize,
    pub rejected: usize,
    pub samples: usize,
    pub final_state: FullState,
    /// Present only for a fixed source of constant intensity.
    pub invariants: Option<InvariantDrift>,
}

pub fn simulate(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let spec = cfg.block(&cfg.simulate, "simulate")?;
    let out = ctx.out()?;
    if !(spec.t_end > 0.0 && spec.t_end.is_finite() && spec.sample_dt > 0.0) {
        return Err(Failure::Config(format!(
            "t_end = {} and sample_dt = {} must be positive and finite",
            spec.t_end, spec.sample_dt
        )));
    }
    let params = cfg.params;
    let init = spec.initial;
    let [x_q, y_q] = cfg.source.position;
    let mut state = FullState::new(init.x_c, init.y_c, init.theta, init.momenta, init.chart).with_source(x_q, y_q);
    state.require_admissible(params.radius)?;
    if init.chart == MomentumChart::Canonical {
        state = to_foil_chart(&state, &params, cfg.fixed_q()?)?;
    }
    let sys = FullSystem::new(params, cfg.source.clone());
    let y0 = state.to_array();
    let conserving = sys.integrals(&y0);
    let integrator = cfg.integrator_or(if conserving.is_some() {
        IntegratorConfig::default()
    } else {
        IntegratorConfig::explicit(1e-12)
    });
    let mut events = vec![EventSpec::contact(params.radius), EventSpec::max_time(spec.t_end)];
    if let Some(r) = spec.escape_radius {
        events.push(EventSpec::escape(r));
    }
    let report = integrate_until_event(&sys, 0.0, &y0, &events, &integrator, Some(spec.sample_dt))?;

    let mut meta = ctx.metadata("simulate", Some(&integrator));
    meta.push(("simulate".into(), json_line(spec)));
    let mut header = vec!["t", "X_c", "Y_c", "theta", "P_x", "P_y", "P_theta", "X_q", "Y_q"];
    if conserving.is_some() {
        header.extend(["H", "K"]);
    }
    let mut csv = CsvWriter::create(out, &meta, &header)?;
    let mut drift = conserving.map(|(h0, k0)| InvariantDrift { h0, k0, max_h_drift: 0.0, max_k_drift: 0.0 });
    let mut last_t = f64::NEG_INFINITY;
    let mut samples = 0;
    for (t, y) in &report.trace {
        if *t <= last_t {
            continue;
        }
        last_t = *t;
        let mut row: Vec<String> = std::iter::once(*t).chain(y.iter().copied()).map(num).collect();
        if let Some(d) = drift.as_mut() {
            let (h, k) = sys
                .integrals(y)
                .ok_or_else(|| Failure::Numerical(format!("integrals undefined at t = {t}")))?;
            d.max_h_drift = d.max_h_drift.max((h - d.h0).abs());
            d.max_k_drift = d.max_k_drift.max((k - d.k0).abs());
            row.extend([num(h), num(k)]);
        }
        csv.row(&row)?;
        samples += 1;
    }
    csv.finish()?;
    let events = SimulationEvents {
        outcome: report.outcome,
        t_final: report.t,
        near_contact: report.near_contact,
        steps: report.steps,
        rejected: report.rejected,
        samples,
        final_state: FullState::from_slice(&report.y, MomentumChart::Foil),
        invariants: drift,
    };
    write_json(&sidecar(out, "json"), &events)?;
    if report.outcome == Outcome::StepBudget {
        return Err(Failure::Budget(format!("{} steps reached at t = {}", report.steps, report.t)));
    }
    Ok(())
}

pub fn force_check_cmd(ctx: &Context) -> Result<(), Failure> {
    let spec = ctx.cfg.block(&ctx.cfg.force_check, "force_check")?;
    let report: ForceCheckReport = force_check(spec.n_samples, ctx.seed, spec.tolerance)?;
    match &ctx.out {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?),
    }
    if !report.passed {
        return Err(Failure::Numerical(format!(
            "closed-form force differs from quadrature by {:.3e} > {:.1e}",
            report.max_rel_error, report.tolerance
        )));
    }
    Ok(())
}

pub fn bifurcation(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let spec = cfg.block(&cfg.bifurcation, "bifurcation")?;
    let out = ctx.out()?;
    let q = cfg.fixed_q()?;
    if !cfg.params.is_balanced() {
        return Err(Failure::Config(format!("the bifurcation diagram needs d = 0, got d = {}", cfg.params.d)));
    }
    let diagram = bifurcation_diagram(&cfg.params, q, spec)?;
    let mut meta = ctx.metadata("bifurcation", None);
    meta.push(("bifurcation".into(), json_line(spec)));
    meta.push(("f_cr".into(), num(diagram.f_cr)));
    let mut csv = CsvWriter::create(out, &meta, &["f", "sigma_id", "h"])?;
    for p in &diagram.sigma {
        csv.row(&[num(p.f), tag(&p.sigma), num(p.h)])?;
    }
    csv.finish()?;
    if spec.n_h > 0 {
        meta.push(("leaf_resolution".into(), spec.resolution.to_string()));
        let mut leaves = CsvWriter::create(&sidecar(out, "leaves.csv"), &meta, &["f", "h", "count"])?;
        for c in &diagram.leaf_count {
            leaves.row(&[num(c.f), num(c.h), c.count.to_string()])?;
        }
        leaves.finish()?;
    }
    Ok(())
}

pub fn potential(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let spec = cfg.block(&cfg.potential, "potential")?;
    let out = ctx.out()?;
    let q = cfg.fixed_q()?;
    let grid = potential_grid(spec.k, &cfg.params, q, &spec.window)?;
    let mut meta = ctx.metadata("potential", None);
    meta.push(("potential".into(), json_line(spec)));
    let mut csv = CsvWriter::create(out, &meta, &["x", "y", "u_e"])?;
    for (j, &y) in grid.ys.iter().enumerate() {
        for (i, &x) in grid.xs.iter().enumerate() {
            csv.row(&[num(x), num(y), num(grid.value(i, j))])?;
        }
    }
    csv.finish()?;
    write_json(&sidecar(out, "json"), &critical_points(spec.k, &cfg.params, q))
}

/// Sidecar of `hill`: region labels and the contact point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillSummary {
    pub h: f64,
    pub k: f64,
    pub contact_radius: f64,
    pub contact_point: Option<[f64; 2]>,
    pub window_warning: bool,
    pub regions: Vec<HillRegion>,
    pub polylines: usize,
}

pub fn hill(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let spec = cfg.block(&cfg.hill, "hill")?;
    let out = ctx.out()?;
    let q = cfg.fixed_q()?;
    let regions = hill_regions(spec.h, spec.k, &cfg.params, q, &spec.window)?;
    let mut meta = ctx.metadata("hill", None);
    meta.push(("hill".into(), json_line(spec)));
    let mut csv = CsvWriter::create(out, &meta, &["polyline", "closed", "vertex", "x", "y"])?;
    for (id, line) in regions.boundaries.iter().enumerate() {
        for (v, [x, y]) in line.points.iter().enumerate() {
            csv.row(&[id.to_string(), line.closed.to_string(), v.to_string(), num(*x), num(*y)])?;
        }
    }
    csv.finish()?;
    let summary = HillSummary {
        h: regions.h,
        k: regions.k,
        contact_radius: regions.contact_radius,
        contact_point: regions.contact_point,
        window_warning: regions.window_warning,
        polylines: regions.boundaries.len(),
        regions: regions.regions,
    };
    write_json(&sidecar(out, "json"), &summary)
}

pub fn scatter(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.cfg;
    let spec = cfg.block(&cfg.scatter, "scatter")?;
    let out = ctx.out()?;
    let mut sc = ScatterConfig::new(cfg.params, cfg.fixed_q()?, spec.r_max, spec.h, spec.k, spec.branch);
    if let Some(integrator) = &cfg.integrator {
        sc.integrator = integrator.clone();
    }
    if let Some(t) = spec.max_flight_time {
        sc.max_flight_time = t;
    }
    sc.chart = spec.chart;
    sc.allow_unsafe_level = spec.allow_unsafe_level;
    let portrait = scatter_portrait(&spec.grid, spec.n_iter, &sc)?;

    let failed: Vec<String> = portrait
        .orbits
        .iter()
        .filter(|o| o.orbit.end == OrbitEnd::Failed)
        .map(|o| format!("{} ({})", o.orbit_id, o.orbit.failure.as_deref().unwrap_or("no message")))
        .collect();
    let mut meta = ctx.metadata("scatter", Some(&sc.integrator));
    meta.push(("scatter".into(), json_line(spec)));
    meta.push(("holes".into(), json_line(&portrait.holes)));
    // Zero-length legs from outward launches never enter the interaction region.
    let degenerate = portrait.orbits.iter().flat_map(|o| &o.orbit.points).filter(|p| p.degenerate).count();
    meta.push(("degenerate_points".into(), degenerate.to_string()));
    for end in [OrbitEnd::Completed, OrbitEnd::Contact, OrbitEnd::Timeout, OrbitEnd::Unreachable, OrbitEnd::Failed] {
        let n = portrait.orbits.iter().filter(|o| o.orbit.end == end).count();
        meta.push((format!("orbits_{}", tag(&end)), n.to_string()));
    }
    let mut csv = CsvWriter::create(out, &meta, &["orbit_id", "iter", "alpha", "b", "phi", "p", "branch", "outcome"])?;
    for o in &portrait.orbits {
        for p in o.orbit.points.iter().filter(|p| !p.degenerate) {
            csv.row(&[
                o.orbit_id.to_string(),
                p.iter.to_string(),
                num(p.alpha),
                num(p.b),
                num(p.phi),
                num(p.p),
                p.branch.name().to_string(),
                p.outcome.name().to_string(),
            ])?;
        }
    }
    csv.finish()?;
    if !failed.is_empty() {
        return Err(Failure::Numerical(format!("integration failed on orbits {}", failed.join(", "))));
    }
    Ok(())
}
