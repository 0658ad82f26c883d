//! Effective potential of an unbalanced foil (`d > 0`) on a fixed level `K = k`:
//! critical points, threshold values of `k`, circular motions and Hill's regions.

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{contour_lines, linspace, node_components, Grid, Polyline};
use crate::error::{ModelError, Result};
use crate::integrators::{
    integrate_until_event, EventSpec, IntegratorConfig, OdeSystem, Outcome,
};
use crate::model::dynamics::{foil_mass_matrix, full_rhs};
use crate::model::hamiltonian::interaction_potential;
use crate::model::{FoilParams, FullState, MomentumChart, ReducedSystem, SourceSpec};

pub use crate::balanced::f_critical as k_critical;

/// `D(x, y) = m (x^2 + y^2) + 2 m_c d x + I_c + m_c d^2`.
fn inertia_about_source(x: f64, y: f64, params: &FoilParams) -> f64 {
    params.m() * (x * x + y * y) + 2.0 * params.static_moment() * x + params.inertia_about_center()
}

pub fn effective_potential(x: f64, y: f64, k: f64, params: &FoilParams, q: f64) -> Result<f64> {
    let s2 = x * x + y * y;
    if s2 <= params.radius * params.radius {
        return Err(ModelError::Contact {
            separation: s2.sqrt(),
            radius: params.radius,
        });
    }
    Ok(k * k / (2.0 * inertia_about_source(x, y, params)) + interaction_potential(s2, params, q))
}

/// `dU_e/dx` on the axis `y = 0`.
pub fn slope_on_axis(x: f64, k: f64, params: &FoilParams, q: f64) -> f64 {
    let d = inertia_about_source(x, 0.0, params);
    let lin = params.m() * x + params.static_moment();
    let r2 = params.radius * params.radius;
    -k * k * lin / (d * d) + params.attraction(q) / (x * (x * x - r2))
}

/// Diagonal of the Hessian `(U_xx, U_yy)` at `(x, 0)`; the mixed derivative vanishes there.
pub fn hessian_on_axis(x: f64, k: f64, params: &FoilParams, q: f64) -> [f64; 2] {
    let (uxx_k, uyy_k) = hessian_k_part(x, params);
    let s = x * x;
    let r2 = params.radius * params.radius;
    let c = params.attraction(q);
    let k2 = k * k;
    [
        k2 * uxx_k - c * (3.0 * s - r2) / (s * (s - r2) * (s - r2)),
        k2 * uyy_k + c / (s * (s - r2)),
    ]
}

// Coefficients of k^2 in U_xx and U_yy on the axis.
fn hessian_k_part(x: f64, params: &FoilParams) -> (f64, f64) {
    let m = params.m();
    let d = inertia_about_source(x, 0.0, params);
    let lin = m * x + params.static_moment();
    (-m / (d * d) + 4.0 * lin * lin / (d * d * d), -m / (d * d))
}

/// `(a_4, a_3, a_2, a_1, a_0)` of the quartic whose roots are the critical abscissae.
pub fn quartic_coefficients(k: f64, params: &FoilParams, q: f64) -> [f64; 5] {
    let c = params.attraction(q);
    let m = params.m();
    let a = params.static_moment();
    let j = params.inertia_about_center();
    let k2 = k * k;
    let r2 = params.radius * params.radius;
    [
        c * m * m - m * k2,
        4.0 * a * c * m - a * k2,
        c * (4.0 * a * a + 2.0 * m * j) + m * r2 * k2,
        4.0 * a * c * j + a * r2 * k2,
        c * j * j,
    ]
}

fn horner(coef: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coef {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Real roots of a polynomial (highest degree first) from companion-matrix eigenvalues.
fn real_roots(coef: &[f64]) -> Vec<f64> {
    let n = coef.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 4 && coef[1] == 0.0 && coef[3] == 0.0 {
        return biquadratic_roots(coef[0], coef[2], coef[4]);
    }
    let mut comp = DMatrix::zeros(n, n);
    for j in 0..n {
        comp[(0, j)] = -coef[j + 1] / coef[0];
    }
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    // Unshifted QR can cycle on companion matrices with symmetric spectra; a
    // diagonal shift breaks the symmetry without moving the roots.
    let scale = comp.row(0).amax().max(1.0);
    let eigenvalues = [0.0, 0.137 * scale, -0.291 * scale].into_iter().find_map(|shift| {
        let shifted = &comp + DMatrix::identity(n, n) * shift;
        shifted
            .try_schur(f64::EPSILON, 10_000)
            .map(|s| s.complex_eigenvalues().map(|z| z - shift))
    });
    let mut roots: Vec<f64> = eigenvalues
        .expect("companion matrix eigenvalues converge for some shift")
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real roots of `a x^4 + b x^2 + c`.
fn biquadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // Cancellation-free pair of roots in x^2.
    let t = -0.5 * (b + b.signum() * disc.sqrt());
    let mut squares = vec![];
    if t != 0.0 {
        squares.extend([t / a, c / t]);
    } else {
        squares.push(0.0);
    }
    let mut roots: Vec<f64> = squares
        .into_iter()
        .filter(|&s| s >= 0.0)
        .flat_map(|s| [-s.sqrt(), s.sqrt()])
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Maximum,
    Saddle,
    Minimum,
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub kind: CriticalKind,
    pub value: f64,
    pub hessian: [f64; 2],
    /// `|dU_e/dx|` at the reported abscissa.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NoCritical,
    Inflection,
    MaxPlusSaddleNegativeAxis,
    MaxOnly,
    MaxNegativeSaddlePositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Absent for a balanced foil.
    pub k_inf: Option<f64>,
    pub x_inf: Option<f64>,
    pub k_cr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotentialReport {
    pub k: f64,
    pub regime: Regime,
    pub critical_points: Vec<CriticalPoint>,
    pub thresholds: Thresholds,
    /// Set when `|k|` is so close to `k_cr` that the leading coefficient was dropped.
    pub boundary_case: bool,
}

const CUBIC_SWITCH: f64 = 1e-8;

/// Critical points of `U_e` on the axis `y = 0` outside the foil, in increasing `x`.
pub fn find_critical(k: f64, params: &FoilParams, q: f64) -> (Vec<CriticalPoint>, bool) {
    let coef = quartic_coefficients(k, params, q);
    let k_cr = k_critical(params, q);
    let boundary = k_cr > 0.0 && (k.abs() - k_cr).abs() < CUBIC_SWITCH * k_cr;
    let poly: &[f64] = if boundary || coef[0] == 0.0 { &coef[1..] } else { &coef };
    let poly_start = poly.iter().position(|&c| c != 0.0).unwrap_or(poly.len());
    let poly = &poly[poly_start..];
    if poly.len() < 2 {
        return (Vec::new(), boundary);
    }
    let r2 = params.radius * params.radius;
    let mut xs: Vec<f64> = Vec::new();
    for mut x in real_roots(poly) {
        for _ in 0..3 {
            let (p, dp) = horner(poly, x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            x -= step;
        }
        if x * x > r2 && xs.iter().all(|&y| (y - x).abs() > 1e-9 * x.abs().max(1.0)) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);

    let points = xs
        .into_iter()
        .map(|x| {
            let hessian = hessian_on_axis(x, k, params, q);
            let scale = hessian_k_part(x, params).0.abs() * k * k + 1e-300;
            let kind = if hessian[0].abs() <= 1e-6 * scale {
                CriticalKind::Inflection
            } else {
                match (hessian[0] < 0.0, hessian[1] < 0.0) {
                    (true, true) => CriticalKind::Maximum,
                    (false, false) => CriticalKind::Minimum,
                    _ => CriticalKind::Saddle,
                }
            };
            CriticalPoint {
                x,
                kind,
                value: effective_potential(x, 0.0, k, params, q).unwrap_or(f64::NAN),
                hessian,
                residual: slope_on_axis(x, k, params, q).abs(),
            }
        })
        .collect();
    (points, boundary)
}

fn classify_regime(points: &[CriticalPoint]) -> Regime {
    let of = |kind| points.iter().filter(move |p| p.kind == kind);
    let maxima: Vec<_> = of(CriticalKind::Maximum).collect();
    let saddles: Vec<_> = of(CriticalKind::Saddle).collect();
    if points.is_empty() {
        Regime::NoCritical
    } else if of(CriticalKind::Inflection).next().is_some() && maxima.is_empty() {
        Regime::Inflection
    } else if saddles.iter().any(|s| s.x > 0.0) {
        Regime::MaxNegativeSaddlePositive
    } else if !saddles.is_empty() {
        Regime::MaxPlusSaddleNegativeAxis
    } else if !maxima.is_empty() {
        Regime::MaxOnly
    } else {
        Regime::Inflection
    }
}

/// Full classification of `U_e` at level `k`, including the threshold values.
pub fn critical_points(k: f64, params: &FoilParams, q: f64) -> EffectivePotentialReport {
    let (points, boundary_case) = find_critical(k, params, q);
    let inflection = k_inflection(params, q).ok();
    EffectivePotentialReport {
        k,
        regime: classify_regime(&points),
        critical_points: points,
        thresholds: Thresholds {
            k_inf: inflection.map(|v| v.0),
            x_inf: inflection.map(|v| v.1),
            k_cr: k_critical(params, q),
        },
        boundary_case,
    }
}

fn negative_pair(k: f64, params: &FoilParams, q: f64) -> Option<(f64, f64)> {
    let (pts, _) = find_critical(k, params, q);
    let neg: Vec<f64> = pts.iter().filter(|p| p.x < 0.0).map(|p| p.x).collect();
    (neg.len() >= 2).then(|| (neg[0], neg[neg.len() - 1]))
}

/// Threshold `k_inf` at which an inflection point appears on `U_e(x, 0)`, and its abscissa.
///
/// Starting just below `k_cr`, where a maximum and a saddle coexist on the
/// negative axis, `k` is lowered until the pair disappears; the bracket is then
/// narrowed by bisection and the system `U_x = 0, U_xx = 0` is solved by Newton
/// iteration in `(x, k^2)`.
pub fn k_inflection(params: &FoilParams, q: f64) -> Result<(f64, f64)> {
    if params.is_balanced() {
        return Err(ModelError::InflectionUndefined(
            "a balanced foil has a symmetric potential without an inflection threshold".into(),
        ));
    }
    let k_cr = k_critical(params, q);
    if k_cr == 0.0 {
        return Err(ModelError::InflectionUndefined("zero source intensity".into()));
    }
    let mut hi = k_cr * (1.0 - 1e-7);
    if negative_pair(hi, params, q).is_none() {
        return Err(ModelError::InflectionSearch(format!(
            "no maximum-saddle pair on the negative axis at k = {hi:.10e}"
        )));
    }
    let mut lo = None;
    let mut delta = 1e-7 * k_cr;
    while delta < k_cr {
        let k = k_cr - delta;
        if negative_pair(k, params, q).is_some() {
            hi = k;
        } else {
            lo = Some(k);
            break;
        }
        delta *= 2.0;
    }
    let mut lo = lo.ok_or_else(|| {
        ModelError::InflectionSearch(format!("pair persists down to k = {hi:.10e}"))
    })?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if negative_pair(mid, params, q).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (x1, x2) = negative_pair(hi, params, q).expect("upper end of the bracket keeps the pair");

    // Newton on (U_x, U_xx) = 0, both linear in K2 = k^2.
    let c = params.attraction(q);
    let r2 = params.radius * params.radius;
    let g1 = |x: f64| c / (x * (x * x - r2));
    let g2 = |x: f64| {
        let s = x * x;
        -c * (3.0 * s - r2) / (s * (s - r2) * (s - r2))
    };
    let fx_k = |x: f64| {
        let d = inertia_about_source(x, 0.0, params);
        -(params.m() * x + params.static_moment()) / (d * d)
    };
    let fxx_k = |x: f64| hessian_k_part(x, params).0;
    let residual = |x: f64, k2: f64| [k2 * fx_k(x) + g1(x), k2 * fxx_k(x) + g2(x)];
    let deriv = |f: &dyn Fn(f64) -> f64, x: f64| {
        let h = 1e-4 * x.abs().max(1.0);
        let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    };
    let mut x = 0.5 * (x1 + x2);
    let mut k2 = hi * hi;
    for _ in 0..50 {
        let [r1, r2v] = residual(x, k2);
        let j11 = deriv(&|x| k2 * fx_k(x) + g1(x), x);
        let j12 = fx_k(x);
        let j21 = deriv(&|x| k2 * fxx_k(x) + g2(x), x);
        let j22 = fxx_k(x);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (r1 * j22 - r2v * j12) / det;
        let dk2 = (j11 * r2v - j21 * r1) / det;
        x -= dx;
        k2 -= dk2;
        if dx.abs() <= 1e-15 * x.abs() && dk2.abs() <= 1e-16 * k2 {
            break;
        }
    }
    let [r1, r2v] = residual(x, k2);
    if !(k2 > 0.0) || x * x <= r2 || r1.abs() > 1e-9 || r2v.abs() > 1e-9 {
        return Err(ModelError::InflectionSearch(format!(
            "Newton ended at x = {x:.6e}, k^2 = {k2:.6e} with residuals ({r1:.3e}, {r2v:.3e}); bracket [{lo:.10e}, {hi:.10e}]"
        )));
    }
    Ok((k2.sqrt(), x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSolution {
    pub x_star: f64,
    /// `dtheta/dt = k / D(x*, 0)`.
    pub angular_rate: f64,
    pub period: f64,
    /// Largest `|full_rhs - d/dt(circle law)|` over one period.
    pub residual: f64,
    /// Eigenvalues `(re, im)` of the reduced flow linearized at the fixed point.
    pub eigenvalues: Vec<(f64, f64)>,
    pub unstable: bool,
}

/// Foil-chart state on the circle `X_c + i Y_c = x* e^{i theta}`.
fn circle_state(x_star: f64, theta: f64, rate: f64, params: &FoilParams) -> FullState {
    let (s, c) = theta.sin_cos();
    let v = nalgebra::Vector3::new(-x_star * rate * s, x_star * rate * c, rate);
    let p = foil_mass_matrix(theta, params) * v;
    FullState::new(x_star * c, x_star * s, theta, [p[0], p[1], p[2]], MomentumChart::Foil)
}

/// Circular motion of the foil center around the source at a critical point of `U_e`.
pub fn circular_solution(x_star: f64, k: f64, params: &FoilParams, q: f64) -> Result<CircularSolution> {
    let slope = slope_on_axis(x_star, k, params, q);
    let scale = k * k * hessian_k_part(x_star, params).0.abs().max(1e-300) * x_star.abs().max(1.0);
    if x_star * x_star <= params.radius * params.radius || slope.abs() > 1e-9 * scale.max(1.0) {
        return Err(ModelError::NotCritical { residual: slope.abs() });
    }
    let rate = k / inertia_about_source(x_star, 0.0, params);
    let period = 2.0 * std::f64::consts::PI / rate.abs();
    let source = SourceSpec::fixed(q);
    let lever = params.m_c * x_star + params.static_moment();
    let mut residual: f64 = 0.0;
    for i in 0..64 {
        let t = period * i as f64 / 64.0;
        let theta = rate * t;
        let state = circle_state(x_star, theta, rate, params);
        let d = full_rhs(&state, t, params, &source)?;
        let (s, c) = theta.sin_cos();
        let exact = [
            -x_star * rate * s,
            x_star * rate * c,
            rate,
            -rate * rate * c * lever,
            -rate * rate * s * lever,
            0.0,
            0.0,
            0.0,
        ];
        for (a, b) in d.iter().zip(exact) {
            residual = residual.max((a - b).abs());
        }
    }

    // Linearization of the co-rotating Cartesian flow at the fixed point.
    let sys = ReducedSystem::new(*params, q, k);
    let y0 = [x_star, 0.0, 0.0, (params.m() * x_star + params.static_moment()) * rate];
    let mut jac = Matrix4::zeros();
    for j in 0..4 {
        let h = 1e-6 * y0[j].abs().max(1e-3);
        let mut up = y0;
        let mut down = y0;
        up[j] += h;
        down[j] -= h;
        let (mut fu, mut fd) = ([0.0; 4], [0.0; 4]);
        sys.rhs(0.0, &up, &mut fu).map_err(|_| ModelError::NotCritical { residual: slope.abs() })?;
        sys.rhs(0.0, &down, &mut fd).map_err(|_| ModelError::NotCritical { residual: slope.abs() })?;
        for i in 0..4 {
            jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    let eig = jac.complex_eigenvalues();
    let eigenvalues: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
    let spectral = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unstable = eig.iter().any(|z| z.re > 1e-6 * spectral.max(1e-300));
    Ok(CircularSolution {
        x_star,
        angular_rate: rate,
        period,
        residual,
        eigenvalues,
        unstable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: usize,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if self.x_max > self.x_min && self.y_max > self.y_min && self.resolution >= 3 {
            Ok(())
        } else {
            Err(ModelError::EmptyWindow(format!("{self:?}")))
        }
    }

    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        (
            linspace(self.x_min, self.x_max, self.resolution),
            linspace(self.y_min, self.y_max, self.resolution),
        )
    }
}

/// `U_e` sampled on the window; nodes inside the foil are NaN.
pub fn potential_grid(k: f64, params: &FoilParams, q: f64, window: &Window) -> Result<Grid> {
    window.validate()?;
    let (xs, ys) = window.axes();
    Ok(Grid::sample(xs, ys, |x, y| {
        effective_potential(x, y, k, params, q).unwrap_or(f64::NAN)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// Connected to infinity only.
    A,
    /// Connected to the contact circle only.
    B,
    Merged,
    /// Touches neither; a window artifact or an enclosed pocket.
    Enclosed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillRegion {
    pub label: RegionLabel,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillRegions {
    pub h: f64,
    pub k: f64,
    pub boundaries: Vec<Polyline>,
    pub regions: Vec<HillRegion>,
    pub contact_radius: f64,
    /// `(x_s, 0)` when `h` equals the saddle value within the grid tolerance.
    pub contact_point: Option<[f64; 2]>,
    /// The forbidden set reaches the window edge, so the barrier may not be fully enclosed.
    pub window_warning: bool,
}

/// Hill's regions `{U_e <= h}` and their boundaries on a window.
pub fn hill_regions(h: f64, k: f64, params: &FoilParams, q: f64, window: &Window) -> Result<HillRegions> {
    let grid = potential_grid(k, params, q, window)?;
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let dx = (window.x_max - window.x_min) / (nx - 1) as f64;
    let dy = (window.y_max - window.y_min) / (ny - 1) as f64;
    let near_foil = params.radius + 2.0 * dx.max(dy);
    let on_edge = |n: usize| {
        let (i, j) = (n % nx, n / nx);
        i == 0 || j == 0 || i == nx - 1 || j == ny - 1
    };
    let at_foil = |n: usize| {
        let (i, j) = (n % nx, n / nx);
        grid.xs[i].hypot(grid.ys[j]) <= near_foil
    };
    let regions = node_components(&grid, |v| v <= h)
        .into_iter()
        .map(|nodes| {
            let edge = nodes.iter().any(|&n| on_edge(n));
            let foil = nodes.iter().any(|&n| at_foil(n));
            let label = match (edge, foil) {
                (true, true) => RegionLabel::Merged,
                (true, false) => RegionLabel::A,
                (false, true) => RegionLabel::B,
                (false, false) => RegionLabel::Enclosed,
            };
            HillRegion { label, nodes: nodes.len() }
        })
        .collect();
    let window_warning = (0..nx * ny).any(|n| on_edge(n) && grid.values[n] > h);

    let (points, _) = find_critical(k, params, q);
    // Change of U_e across one cell next to the saddle.
    let cell_drop = |x: f64| slope_on_axis(x + dx, k, params, q).abs() * dx;
    let contact_point = points
        .iter()
        .filter(|p| p.kind == CriticalKind::Saddle)
        .find(|p| (p.value - h).abs() <= cell_drop(p.x).max(1e-12 * p.value.abs()))
        .map(|p| [p.x, 0.0]);

    Ok(HillRegions {
        h,
        k,
        boundaries: contour_lines(&grid, h),
        regions,
        contact_radius: params.radius,
        contact_point,
        window_warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FateCensus {
    pub escape: usize,
    pub contact: usize,
    pub unresolved: usize,
    /// Starts that could not be integrated (outside the domain).
    pub invalid: usize,
}

impl FateCensus {
    pub fn total(&self) -> usize {
        self.escape + self.contact + self.unresolved + self.invalid
    }

    pub fn unresolved_fraction(&self) -> f64 {
        let n = self.escape + self.contact + self.unresolved;
        if n == 0 {
            0.0
        } else {
            self.unresolved as f64 / n as f64
        }
    }
}

/// Integrates each co-rotating start `(x, y, p_x, p_y)` until escape, contact or `t_max`.
pub fn fate_census(
    params: &FoilParams,
    q: f64,
    k: f64,
    starts: &[[f64; 4]],
    r_escape: f64,
    t_max: f64,
    config: &IntegratorConfig,
) -> FateCensus {
    let sys = ReducedSystem::new(*params, q, k);
    let events = [
        EventSpec::contact(params.radius),
        EventSpec::escape(r_escape),
        EventSpec::max_time(t_max),
    ];
    let outcomes: Vec<Option<Outcome>> = starts
        .par_iter()
        .map(|y0| {
            integrate_until_event(&sys, 0.0, y0, &events, config, None)
                .ok()
                .map(|r| r.outcome)
        })
        .collect();
    let mut census = FateCensus::default();
    for o in outcomes {
        match o {
            Some(Outcome::Escape) => census.escape += 1,
            Some(Outcome::Contact) => census.contact += 1,
            Some(_) => census.unresolved += 1,
            None => census.invalid += 1,
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;

    fn foil(d: f64) -> FoilParams {
        FoilParams::new(1.0, 1.0, 1.0, d, 1.0).unwrap()
    }

    #[test]
    fn zero_k_potential_is_negative() {
        let p = foil(0.1);
        for (x, y) in [(1.5, 0.0), (-3.0, 2.0), (50.0, -40.0)] {
            assert!(effective_potential(x, y, 0.0, &p, 1.0).unwrap() < 0.0);
        }
        assert!(effective_potential(1e8, 0.0, 0.0, &p, 1.0).unwrap().abs() < 1e-15);
        assert!(effective_potential(0.5, 0.5, 1.0, &p, 1.0).is_err());
    }

    #[test]
    fn mirror_symmetry_in_y() {
        let p = foil(0.1);
        for (x, y) in [(1.5, 0.7), (-3.0, 2.0), (10.0, -4.0)] {
            assert_eq!(
                effective_potential(x, y, 0.8, &p, 1.0).unwrap(),
                effective_potential(x, -y, 0.8, &p, 1.0).unwrap()
            );
        }
    }

    #[test]
    fn quartic_coefficient_facts() {
        let p = foil(0.1);
        let k_cr = k_critical(&p, 1.0);
        let c = quartic_coefficients(k_cr, &p, 1.0);
        assert!(c[0].abs() < 1e-15);
        assert!(c[4] > 0.0);
        let b = quartic_coefficients(0.9, &foil(0.0), 1.0);
        assert!(b[1] == 0.0 && b[3] == 0.0);
        let expected_a0 = p.rho * p.radius.powi(2) * p.inertia_about_center().powi(2) / (2.0 * std::f64::consts::PI);
        assert!((c[4] - expected_a0).abs() < 1e-15);
    }

    #[test]
    fn quartic_roots_are_critical_points() {
        let p = foil(0.1);
        for k in [0.8117, 0.81156, 0.86872, 1.3] {
            let coef = quartic_coefficients(k, &p, 1.0);
            let amax = coef.iter().map(|c| c.abs()).fold(0.0, f64::max);
            for cp in find_critical(k, &p, 1.0).0 {
                let (val, _) = horner(&coef, cp.x);
                assert!(val.abs() <= 1e-10 * amax * cp.x.abs().powi(4).max(1.0), "k={k}");
                assert!(cp.residual <= 1e-9);
            }
        }
    }

    #[test]
    fn regimes_follow_the_thresholds() {
        let p = foil(0.1);
        assert_eq!(critical_points(0.7307, &p, 1.0).regime, Regime::NoCritical);
        assert_eq!(critical_points(0.81156, &p, 1.0).regime, Regime::MaxPlusSaddleNegativeAxis);
        let at_cr = critical_points(k_critical(&p, 1.0), &p, 1.0);
        assert!(at_cr.boundary_case);
        assert_eq!(at_cr.regime, Regime::MaxOnly);
        assert_eq!(critical_points(0.86872, &p, 1.0).regime, Regime::MaxNegativeSaddlePositive);
        assert_eq!(critical_points(0.0, &p, 1.0).critical_points.len(), 0);
    }

    #[test]
    fn inflection_threshold() {
        let p = foil(0.1);
        let (k_inf, x_inf) = k_inflection(&p, 1.0).unwrap();
        assert!(k_inf < k_critical(&p, 1.0));
        assert!(slope_on_axis(x_inf, k_inf, &p, 1.0).abs() < 1e-9);
        assert!(hessian_on_axis(x_inf, k_inf, &p, 1.0)[0].abs() < 1e-9);
        assert!(matches!(k_inflection(&foil(0.0), 1.0), Err(ModelError::InflectionUndefined(_))));
    }

    #[test]
    fn saddle_runs_off_to_infinity_near_k_cr() {
        let p = foil(0.1);
        let k_cr = k_critical(&p, 1.0);
        let saddle = |k: f64| {
            find_critical(k, &p, 1.0)
                .0
                .into_iter()
                .find(|c| c.kind == CriticalKind::Saddle)
                .unwrap()
                .x
        };
        let mut prev = f64::INFINITY;
        for j in (1..12).rev() {
            let x = saddle(k_cr * (1.0 - 1e-6 * 1.6f64.powi(j)));
            assert!(x < prev && x < 0.0);
            prev = x;
        }
        let mut prev = f64::NEG_INFINITY;
        for j in 1..12 {
            let x = saddle(k_cr * (1.0 + 1e-6 * 1.6f64.powi(j)));
            assert!(x > 0.0);
            if j > 1 {
                assert!(x < prev);
            }
            prev = x;
        }
    }

    #[test]
    fn circular_motion_at_the_maximum_is_unstable() {
        let p = foil(0.1);
        let k = 0.86872;
        let x_max = find_critical(k, &p, 1.0)
            .0
            .into_iter()
            .find(|c| c.kind == CriticalKind::Maximum)
            .unwrap()
            .x;
        let sol = circular_solution(x_max, k, &p, 1.0).unwrap();
        assert!(sol.residual <= 1e-9, "{}", sol.residual);
        assert!(sol.unstable, "{:?}", sol.eigenvalues);
        assert!(matches!(circular_solution(x_max + 0.5, k, &p, 1.0), Err(ModelError::NotCritical { .. })));
    }

    #[test]
    fn balanced_limit_is_symmetric() {
        let p = foil(0.0);
        let k = 2.0 * k_critical(&p, 1.0);
        let pts = find_critical(k, &p, 1.0).0;
        assert_eq!(pts.len(), 2);
        assert!((pts[0].x + pts[1].x).abs() < 1e-10 * pts[1].x);
        let x = pts[1].x;
        // The maximum over the split K = C + F of the balanced radial potential.
        let f = k * p.m() * x * x / (p.m() * x * x + p.i_c);
        let u = (k - f).powi(2) / (2.0 * p.i_c) + crate::balanced::radial_potential(x, f, &p, 1.0).unwrap();
        assert!((u - pts[1].value).abs() < 1e-14);
        let sol = circular_solution(x, k, &p, 1.0).unwrap();
        assert!((sol.angular_rate - k / (p.m() * x * x + p.i_c)).abs() < 1e-15);
    }

    #[test]
    fn balanced_roots_over_a_sweep_of_k() {
        let p = foil(0.0);
        let nearly = foil(1e-9);
        for i in 0..60 {
            let k = 0.85 + 0.05 * i as f64;
            let pts = find_critical(k, &p, 1.0).0;
            assert_eq!(pts.len(), 2, "k = {k}");
            assert_eq!(pts[0].x, -pts[1].x);
            let near = find_critical(k, &nearly, 1.0).0;
            assert!((near[1].x - pts[1].x).abs() < 1e-6 * pts[1].x, "k = {k}");
        }
        assert_eq!(biquadratic_roots(1.0, -5.0, 4.0), vec![-2.0, -1.0, 1.0, 2.0]);
        assert!(biquadratic_roots(1.0, 1.0, 1.0).is_empty());
    }

    #[test]
    fn hill_region_counts() {
        let p = foil(0.1);
        let k = 0.86872;
        let (pts, _) = find_critical(k, &p, 1.0);
        let saddle = pts.iter().find(|c| c.kind == CriticalKind::Saddle).unwrap();
        let window = Window { x_min: -12.0, x_max: 12.0, y_min: -12.0, y_max: 12.0, resolution: 301 };
        let low = hill_regions(0.5 * saddle.value, k, &p, 1.0, &window).unwrap();
        assert_eq!(low.regions.len(), 2, "{:?}", low.regions);
        assert!(!low.window_warning);
        let high = hill_regions(1.5 * saddle.value, k, &p, 1.0, &window).unwrap();
        assert_eq!(high.regions.len(), 1);
        assert_eq!(high.regions[0].label, RegionLabel::Merged);
    }
}
