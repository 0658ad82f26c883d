//! Integrable case of a balanced foil (`d = 0`): radial potential, fixed point,
//! phase portraits and the bifurcation diagram on the plane `(f, h)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{contour_lines, geomspace, linspace, Grid, Polyline};
use crate::error::{ModelError, Result};
use crate::integrators::{DomainViolation, InvariantKind, OdeSystem};
use crate::model::hamiltonian::interaction_potential;
use crate::model::FoilParams;
use crate::quadrature;

fn require_outside(s: f64, params: &FoilParams) -> Result<()> {
    if s > params.radius {
        Ok(())
    } else {
        Err(ModelError::Contact {
            separation: s,
            radius: params.radius,
        })
    }
}

/// `U(s) = f^2 / (2 m s^2) + (rho q^2 / 4 pi) ln(1 - R^2 / s^2)`.
pub fn radial_potential(s: f64, f: f64, params: &FoilParams, q: f64) -> Result<f64> {
    require_outside(s, params)?;
    Ok(f * f / (2.0 * params.m() * s * s) + interaction_potential(s * s, params, q))
}

/// `dU/ds`.
pub fn radial_potential_slope(s: f64, f: f64, params: &FoilParams, q: f64) -> f64 {
    let r2 = params.radius * params.radius;
    -f * f / (params.m() * s.powi(3)) + params.attraction(q) / (s * (s * s - r2))
}

/// `f_cr = |q| R sqrt(rho m / 2 pi)`.
pub fn f_critical(params: &FoilParams, q: f64) -> f64 {
    q.abs() * params.radius * (params.rho * params.m() / (2.0 * PI)).sqrt()
}

/// Location of the maximum of `U`, which exists only for `|f| > f_cr`.
pub fn saddle_radius(f: f64, params: &FoilParams, q: f64) -> Result<f64> {
    let f_cr = f_critical(params, q);
    if f.abs() <= f_cr {
        return Err(ModelError::NoSaddle { f, f_cr });
    }
    let r = params.radius;
    Ok(r * f.abs() * (2.0 * PI / (2.0 * PI * f * f - params.rho * params.m() * q * q * r * r)).sqrt())
}

/// `(ds/dt, dP_s/dt)` of the decoupled radial system.
pub fn radial_rhs(s: f64, p_s: f64, f: f64, params: &FoilParams, q: f64) -> Result<(f64, f64)> {
    require_outside(s, params)?;
    Ok((p_s / params.m(), -radial_potential_slope(s, f, params, q)))
}

/// Radial system on the level `F = f`, `y = (s, P_s)`.
#[derive(Debug, Clone, Copy)]
pub struct RadialSystem {
    pub params: FoilParams,
    pub q: f64,
    pub f: f64,
}

impl RadialSystem {
    pub fn new(params: FoilParams, q: f64, f: f64) -> Self {
        RadialSystem { params, q, f }
    }

    pub fn energy(&self, y: &[f64]) -> Option<f64> {
        let u = radial_potential(y[0], self.f, &self.params, self.q).ok()?;
        Some(0.5 * y[1] * y[1] / self.params.m() + u)
    }
}

impl OdeSystem for RadialSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) -> Result<(), DomainViolation> {
        let (a, b) = radial_rhs(y[0], y[1], self.f, &self.params, self.q)?;
        d[0] = a;
        d[1] = b;
        Ok(())
    }

    fn radius(&self, y: &[f64]) -> Option<f64> {
        Some(y[0])
    }

    fn invariant(&self, kind: InvariantKind, y: &[f64]) -> Option<f64> {
        match kind {
            InvariantKind::Energy => self.energy(y),
            InvariantKind::AngularMomentum => Some(self.f),
        }
    }

    fn invariant_gradient(&self, kind: InvariantKind, y: &[f64], grad: &mut [f64]) -> bool {
        match kind {
            InvariantKind::Energy => {
                grad[0] = radial_potential_slope(y[0], self.f, &self.params, self.q);
                grad[1] = y[1] / self.params.m();
            }
            InvariantKind::AngularMomentum => grad.fill(0.0),
        }
        true
    }
}

/// Polar angle `alpha(t) = alpha_0 + (f/m) int_0^t ds / s^2` along a sampled radius.
pub fn alpha_quadrature(trace: &[(f64, f64)], f: f64, alpha0: f64, params: &FoilParams) -> Vec<f64> {
    let ts: Vec<f64> = trace.iter().map(|&(t, _)| t).collect();
    let rates: Vec<f64> = trace
        .iter()
        .map(|&(_, s)| f / (params.m() * s * s))
        .collect();
    quadrature::cumulative(&ts, &rates)
        .into_iter()
        .map(|a| alpha0 + a)
        .collect()
}

/// Foil-center path `(X_c, Y_c) = s (cos alpha, sin alpha)` with the source at the origin.
pub fn reconstruct_center(trace: &[(f64, f64)], f: f64, alpha0: f64, params: &FoilParams) -> Vec<[f64; 2]> {
    alpha_quadrature(trace, f, alpha0, params)
        .into_iter()
        .zip(trace)
        .map(|(a, &(_, s))| [s * a.cos(), s * a.sin()])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialShape {
    Monotone,
    HasMaximum,
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub f: f64,
    pub samples: Vec<(f64, f64)>,
    pub classification: RadialShape,
    /// Numerically located maximum `(s, U)`, if any.
    pub maximum: Option<(f64, f64)>,
}

/// Samples `U` on `(R, s_max]` and classifies it by maximizing `U` numerically.
///
/// The search runs in `u = 1/s^2`, where `U` is concave and the maximum at
/// `s = infinity` sits at the boundary `u = 0`.
pub fn classify_radial_potential(
    f: f64,
    params: &FoilParams,
    q: f64,
    s_max: f64,
    n_samples: usize,
) -> Result<RadialProfile> {
    let r = params.radius;
    if !(s_max > r) {
        return Err(ModelError::EmptyWindow(format!("s_max = {s_max} must exceed R = {r}")));
    }
    let samples = geomspace(1e-6 * r, s_max - r, n_samples)
        .into_iter()
        .map(|ds| {
            let s = r + ds;
            radial_potential(s, f, params, q).map(|u| (s, u))
        })
        .collect::<Result<Vec<_>>>()?;

    let u_of = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            f * f * u / (2.0 * params.m()) + interaction_potential(1.0 / u, params, q)
        }
    };
    let (mut lo, mut hi) = (0.0, (1.0 - 1e-12) / (r * r));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (u_of(x1), u_of(x2));
    for _ in 0..300 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = u_of(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = u_of(x1);
        }
    }
    let u_star = 0.5 * (lo + hi);
    let f_cr = f_critical(params, q);
    let (classification, maximum) = if (f.abs() - f_cr).abs() <= 1e-9 * f_cr {
        (RadialShape::Critical, None)
    } else if u_star > 1e-7 / (r * r) && u_of(u_star) > 0.0 {
        let s = 1.0 / u_star.sqrt();
        (RadialShape::HasMaximum, Some((s, u_of(u_star))))
    } else {
        (RadialShape::Monotone, None)
    };
    Ok(RadialProfile {
        f,
        samples,
        classification,
        maximum,
    })
}

/// Sampling window of the `(s, P_s)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitWindow {
    pub s_min: f64,
    pub s_max: f64,
    pub p_max: f64,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitLevel {
    pub h: f64,
    /// Level of the saddle (`f > f_cr`) or the critical level `h = 0` (`f < f_cr`).
    pub critical: bool,
    pub lines: Vec<Polyline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub f: f64,
    /// Saddle `(s_0, U(s_0))` when `f > f_cr`.
    pub saddle: Option<(f64, f64)>,
    pub levels: Vec<PortraitLevel>,
}

fn energy_grid(f: f64, params: &FoilParams, q: f64, xs: Vec<f64>, ys: Vec<f64>) -> Grid {
    let m = params.m();
    let u: Vec<f64> = xs
        .iter()
        .map(|&s| radial_potential(s, f, params, q).unwrap_or(f64::NAN))
        .collect();
    let values = ys
        .iter()
        .flat_map(|&p| u.iter().map(move |&ui| 0.5 * p * p / m + ui))
        .collect();
    Grid { xs, ys, values }
}

/// Level curves of `H = P_s^2 / 2m + U(s)`, with the critical level added automatically.
pub fn phase_portrait(
    f: f64,
    h_levels: &[f64],
    params: &FoilParams,
    q: f64,
    window: &PortraitWindow,
) -> Result<PhasePortrait> {
    let r = params.radius;
    if !(window.s_min > r && window.s_max > window.s_min && window.p_max > 0.0 && window.resolution >= 2) {
        return Err(ModelError::EmptyWindow(format!("{window:?} with R = {r}")));
    }
    let xs = geomspace(window.s_min - r, window.s_max - r, window.resolution)
        .into_iter()
        .map(|ds| r + ds)
        .collect();
    // An even node count keeps P_s = 0 off the grid, so the portrait is symmetric.
    let n_p = window.resolution + window.resolution % 2;
    let ys = linspace(-window.p_max, window.p_max, n_p);
    let grid = energy_grid(f, params, q, xs, ys);

    let saddle = saddle_radius(f, params, q)
        .ok()
        .map(|s0| (s0, radial_potential(s0, f, params, q).unwrap()));
    let critical_level = saddle.map_or(0.0, |(_, u)| u);
    let mut levels: Vec<(f64, bool)> = h_levels.iter().map(|&h| (h, false)).collect();
    if !h_levels.contains(&critical_level) {
        levels.push((critical_level, true));
    } else {
        for l in &mut levels {
            l.1 = l.0 == critical_level;
        }
    }
    let levels = levels
        .into_iter()
        .map(|(h, critical)| PortraitLevel {
            h,
            critical,
            lines: contour_lines(&grid, h),
        })
        .collect();
    Ok(PhasePortrait { f, saddle, levels })
}

/// Number of connected components of `{H = h}` in the window `s in (R, s_big]`.
pub fn leaf_count(f: f64, h: f64, params: &FoilParams, q: f64, s_big: f64, resolution: usize) -> usize {
    let r = params.radius;
    let m = params.m();
    let u0 = saddle_radius(f, params, q)
        .ok()
        .and_then(|s0| radial_potential(s0, f, params, q).ok())
        .unwrap_or(0.0);
    // The curves leave through the top and bottom only near the contact singularity.
    let p_max = 2.0 * (2.0 * m * (h.abs() + u0.abs())).sqrt().max(1e-12);
    let xs = geomspace(1e-9 * r, s_big - r, resolution)
        .into_iter()
        .map(|ds| r + ds)
        .collect();
    let ys = linspace(-p_max, p_max, resolution + resolution % 2);
    contour_lines(&energy_grid(f, params, q, xs, ys), h).len()
}

/// One energy curve in the `(f, h)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaId {
    /// Critical trajectories for `f < f_cr`, at `h = 0`.
    A,
    /// Saddle level `h = U(s_0(f))` for `f > f_cr`.
    B,
    /// Leaf boundary `h = 0` for `f > f_cr`.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub f: f64,
    pub sigma: SigmaId,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafSample {
    pub f: f64,
    pub h: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub f_cr: f64,
    pub f_grid: Vec<f64>,
    pub sigma: Vec<SigmaPoint>,
    pub leaf_count: Vec<LeafSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    pub f_min: f64,
    pub f_max: f64,
    pub n_f: usize,
    /// Energies probed for leaf counts; zero disables the count.
    pub n_h: usize,
    pub h_max: f64,
    pub s_big: f64,
    pub resolution: usize,
}

/// Builds the sigma curves on a grid of `f` and counts leaves on an `(f, h)` grid.
///
/// Energies too close to zero for the turning points to lie inside
/// `(R, s_big]` are skipped, since the count is then a window artifact.
pub fn bifurcation_diagram(params: &FoilParams, q: f64, spec: &DiagramSpec) -> Result<BifurcationDiagram> {
    if spec.n_f > 0 && !(spec.f_min > 0.0 && spec.f_max >= spec.f_min) {
        return Err(ModelError::EmptyWindow(format!(
            "f range [{}, {}] must lie in (0, inf)",
            spec.f_min, spec.f_max
        )));
    }
    let f_cr = f_critical(params, q);
    let f_grid = linspace(spec.f_min, spec.f_max, spec.n_f);
    let mut sigma = Vec::new();
    for &f in &f_grid {
        if f < f_cr {
            sigma.push(SigmaPoint { f, sigma: SigmaId::A, h: 0.0 });
        } else if f > f_cr {
            let s0 = saddle_radius(f, params, q)?;
            sigma.push(SigmaPoint {
                f,
                sigma: SigmaId::B,
                h: radial_potential(s0, f, params, q)?,
            });
            sigma.push(SigmaPoint { f, sigma: SigmaId::C, h: 0.0 });
        }
    }

    let mut cells = Vec::new();
    if spec.n_h > 0 {
        let r = params.radius;
        let s_big = spec.s_big;
        for &f in &f_grid {
            // Far-field coefficient of U ~ C / s^2 sets the smallest resolvable |h|.
            let c_far = (f * f - f_cr * f_cr).abs() / (2.0 * params.m()) + f_cr * f_cr / params.m();
            let h_floor = 10.0 * c_far / (s_big * s_big) + 1e-12 * r;
            for h in linspace(-spec.h_max, spec.h_max, spec.n_h) {
                let near_saddle = saddle_radius(f, params, q)
                    .ok()
                    .map(|s0| radial_potential(s0, f, params, q).unwrap_or(0.0))
                    .is_some_and(|u0| (h - u0).abs() < 1e-3 * spec.h_max);
                if h.abs() >= h_floor && !near_saddle && (f - f_cr).abs() > 1e-9 {
                    cells.push((f, h));
                }
            }
        }
    }
    let leaf_count = cells
        .par_iter()
        .map(|&(f, h)| LeafSample {
            f,
            h,
            count: leaf_count(f, h, params, q, spec.s_big, spec.resolution),
        })
        .collect();
    Ok(BifurcationDiagram {
        f_cr,
        f_grid,
        sigma,
        leaf_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{integrate_to, integrate_until_event, EventSpec, IntegratorConfig, Outcome};

    fn unit() -> FoilParams {
        FoilParams::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn critical_value_matches_closed_form() {
        let p = unit();
        let f_cr = f_critical(&p, 1.0);
        assert!((f_cr - ((1.0 + PI) / (2.0 * PI)).sqrt()).abs() < 1e-15);
        assert_eq!(format!("{f_cr:.5}"), "0.81188");
        assert_eq!(f_critical(&p, 0.0), 0.0);
        assert!((f_critical(&p, 2.0) - 2.0 * f_cr).abs() < 1e-15);
    }

    #[test]
    fn saddle_at_twice_critical() {
        let p = unit();
        let f = 2.0 * f_critical(&p, 1.0);
        let s0 = saddle_radius(f, &p, 1.0).unwrap();
        assert!((s0 - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(radial_potential_slope(s0, f, &p, 1.0).abs() < 1e-10);
        let (ds, dp) = radial_rhs(s0, 0.0, f, &p, 1.0).unwrap();
        assert!(ds == 0.0 && dp.abs() < 1e-10);
    }

    #[test]
    fn saddle_limits() {
        let p = unit();
        let f_cr = f_critical(&p, 1.0);
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let f = f_cr * (1.0 + 1e-6 * 1.5f64.powi(k));
            let s0 = saddle_radius(f, &p, 1.0).unwrap();
            assert!(s0 < prev);
            prev = s0;
        }
        assert!(saddle_radius(f_cr * (1.0 + 1e-10), &p, 1.0).unwrap() > 1e4);
        assert!(saddle_radius(1e6, &p, 1.0).unwrap() - 1.0 < 1e-10);
        assert!(matches!(saddle_radius(f_cr, &p, 1.0), Err(ModelError::NoSaddle { .. })));
    }

    #[test]
    fn potential_limits() {
        let p = unit();
        for s in [1.001, 2.0, 10.0, 1e3] {
            assert!(radial_potential(s, 0.0, &p, 1.0).unwrap() < 0.0);
        }
        assert!(radial_potential(1e8, 0.0, &p, 1.0).unwrap().abs() < 1e-16);
        assert!(radial_potential(1.0 + 1e-12, 0.3, &p, 1.0).unwrap() < -2.0);
        assert!(radial_potential(1.0, 0.3, &p, 1.0).is_err());
    }

    #[test]
    fn classification_agrees_with_sign_test() {
        let p = unit();
        let f_cr = f_critical(&p, 1.0);
        for rel in [-0.5, -1e-3, -2e-6, 2e-6, 1e-3, 0.5, 3.0] {
            let f = f_cr * (1.0 + rel);
            let prof = classify_radial_potential(f, &p, 1.0, 1e3, 200).unwrap();
            let expected = if rel > 0.0 { RadialShape::HasMaximum } else { RadialShape::Monotone };
            assert_eq!(prof.classification, expected, "rel {rel}");
            if let Some((s, _)) = prof.maximum {
                let s0 = saddle_radius(f, &p, 1.0).unwrap();
                assert!((s - s0).abs() / s0 < 1e-3, "{s} vs {s0}");
            }
        }
    }

    #[test]
    fn energy_is_conserved_along_the_radial_flow() {
        let p = unit();
        let sys = RadialSystem::new(p, 1.0, 1.3);
        let y0 = [3.0, -0.2];
        let rep = integrate_to(&sys, 0.0, &y0, 20.0, &IntegratorConfig::explicit(1e-13)).unwrap();
        assert!((sys.energy(&rep.y).unwrap() - sys.energy(&y0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn time_reversal_round_trip() {
        let p = unit();
        let sys = RadialSystem::new(p, 1.0, 1.1);
        let config = IntegratorConfig::explicit(1e-13);
        let y0 = [2.5, 0.15];
        let fwd = integrate_to(&sys, 0.0, &y0, 5.0, &config).unwrap().y;
        let back = integrate_to(&sys, 0.0, &[fwd[0], -fwd[1]], 5.0, &config).unwrap().y;
        assert!((back[0] - y0[0]).abs() < 1e-8 && (-back[1] - y0[1]).abs() < 1e-8);
    }

    #[test]
    fn alpha_for_circular_motion_is_linear() {
        let p = unit();
        let f = 2.0;
        let s0 = saddle_radius(f, &p, 1.0).unwrap();
        let trace: Vec<(f64, f64)> = (0..50).map(|i| (0.1 * i as f64, s0)).collect();
        let alpha = alpha_quadrature(&trace, f, 0.3, &p);
        let slope = f / (p.m() * s0 * s0);
        for ((t, _), a) in trace.iter().zip(alpha) {
            assert!((a - 0.3 - slope * t).abs() < 1e-13);
        }
        assert!(alpha_quadrature(&trace, 0.0, 0.3, &p).iter().all(|&a| a == 0.3));
    }

    #[test]
    fn portraits_are_symmetric_and_mark_the_saddle() {
        let p = unit();
        let window = PortraitWindow { s_min: 1.01, s_max: 6.0, p_max: 2.0, resolution: 120 };
        let above = phase_portrait(2.0, &[-0.1, 0.05], &p, 1.0, &window).unwrap();
        assert!(above.saddle.is_some());
        assert!(above.levels.iter().any(|l| l.critical));
        let below = phase_portrait(0.5, &[-0.1, 0.05], &p, 1.0, &window).unwrap();
        assert!(below.saddle.is_none());
        for level in &above.levels {
            let mut ys: Vec<f64> = level.lines.iter().flat_map(|l| l.points.iter().map(|q| q[1])).collect();
            let mut neg: Vec<f64> = ys.iter().map(|y| -y).collect();
            ys.sort_by(f64::total_cmp);
            neg.sort_by(f64::total_cmp);
            for (a, b) in ys.iter().zip(&neg) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let bad = PortraitWindow { s_min: 0.5, ..window };
        assert!(phase_portrait(2.0, &[0.0], &p, 1.0, &bad).is_err());
    }

    #[test]
    fn leaf_counts_follow_the_sign_of_h() {
        let p = unit();
        let f_cr = f_critical(&p, 1.0);
        for (f, h, expected) in [
            (0.5 * f_cr, 0.05, 2),
            (0.5 * f_cr, -0.05, 1),
            (1.5 * f_cr, -0.05, 1),
            (1.5 * f_cr, 0.02, 2),
            (1.5 * f_cr, 1.0, 2),
        ] {
            assert_eq!(leaf_count(f, h, &p, 1.0, 1e3, 400), expected, "f={f} h={h}");
        }
    }

    #[test]
    fn diagram_sigma_b_sits_on_maxima() {
        let p = unit();
        let spec = DiagramSpec { f_min: 0.1, f_max: 3.0, n_f: 30, n_h: 0, h_max: 1.0, s_big: 1e3, resolution: 100 };
        let d = bifurcation_diagram(&p, 1.0, &spec).unwrap();
        let mut seen_b = false;
        for pt in d.sigma.iter().filter(|s| s.sigma == SigmaId::B) {
            seen_b = true;
            let s0 = saddle_radius(pt.f, &p, 1.0).unwrap();
            assert!(radial_potential_slope(s0, pt.f, &p, 1.0).abs() < 1e-10);
            let h = 1e-4 * s0;
            let curvature = (radial_potential(s0 + h, pt.f, &p, 1.0).unwrap()
                - 2.0 * pt.h
                + radial_potential(s0 - h, pt.f, &p, 1.0).unwrap())
                / (h * h);
            assert!(curvature < 0.0);
        }
        assert!(seen_b);
        assert!(d.sigma.iter().filter(|s| s.sigma == SigmaId::A).all(|s| s.f < d.f_cr));
    }

    #[test]
    fn radial_fates() {
        let p = unit();
        let f_cr = f_critical(&p, 1.0);
        let config = IntegratorConfig::explicit(1e-11);
        // Outward launch with h > 0 and f < f_cr escapes.
        let sys = RadialSystem::new(p, 1.0, 0.5 * f_cr);
        let events = [EventSpec::contact(1.0), EventSpec::escape(1e3), EventSpec::max_time(1e6)];
        let rep = integrate_until_event(&sys, 0.0, &[2.0, 1.0], &events, &config, None).unwrap();
        assert_eq!(rep.outcome, Outcome::Escape);
        // Inward launch falls on the source.
        let rep = integrate_until_event(&sys, 0.0, &[2.0, -0.1], &events, &config, None).unwrap();
        assert_eq!(rep.outcome, Outcome::Contact);
    }
}
