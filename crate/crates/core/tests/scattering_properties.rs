use std::f64::consts::PI;

use fsd_core::model::{Branch, FoilParams, ReducedState};
use fsd_core::scattering::{
    energy_residual, launch_phi, map_jacobian, portrait_map, realized_branch, scatter_orbit, scatter_portrait,
    LegChart, OrbitEnd, PortraitGrid, ScatterConfig, Span,
};
use proptest::prelude::*;

fn config(d: f64, branch: Branch) -> ScatterConfig {
    let p = FoilParams::new(1.0, 1.0, 1.0, d, 1.0).unwrap();
    ScatterConfig::new(p, 1.0, 100.0, 0.001, 1.0, branch)
}

fn wrap_pm(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn both_leg_charts_reach_the_same_end_point() {
    let mut cfg = config(0.01, Branch::Largest);
    let phi = launch_phi(2.0, 14.0, &cfg).unwrap();
    let inertial = scatter_orbit(phi, 2.0, 2, &cfg).unwrap();
    cfg.chart = LegChart::CoRotating;
    let rotating = scatter_orbit(phi, 2.0, 2, &cfg).unwrap();
    for (a, b) in inertial.points.iter().zip(&rotating.points) {
        assert!((a.b - b.b).abs() < 1e-8);
        assert!(wrap_pm(a.alpha - b.alpha).abs() < 1e-6);
        assert!(wrap_pm(a.phi - b.phi).abs() < 1e-6);
    }
}

#[test]
fn fixed_points_preserve_area() {
    let cfg = config(0.01, Branch::Largest);
    let residual = |a: f64, b: f64| -> [f64; 2] {
        let (a1, b1) = portrait_map(a, b, &cfg).unwrap();
        [wrap_pm(a1 - a), b1 - b]
    };
    // Bracket a resonance of the twist along alpha = pi/2, where the symmetric fixed points sit.
    let alpha = PI / 2.0;
    let mut lo = 14.0;
    let mut f_lo = residual(alpha, lo)[0];
    let mut hi = lo;
    loop {
        hi += 0.005;
        let f_hi = residual(alpha, hi)[0];
        if f_hi.signum() != f_lo.signum() && (f_hi - f_lo).abs() < 1.0 {
            break;
        }
        lo = hi;
        f_lo = f_hi;
        assert!(hi < 15.0, "no resonance found");
    }
    let (mut a, mut b) = (alpha, 0.5 * (lo + hi));
    for _ in 0..30 {
        let r = residual(a, b);
        let j = map_jacobian(a, b, 1e-6, &cfg).unwrap();
        let (m00, m01, m10, m11) = (j[0][0] - 1.0, j[0][1], j[1][0], j[1][1] - 1.0);
        let det = m00 * m11 - m01 * m10;
        let da = (r[0] * m11 - r[1] * m01) / det;
        let db = (m00 * r[1] - m10 * r[0]) / det;
        a -= da;
        b -= db;
        if da.abs() < 1e-11 && db.abs() < 1e-11 {
            break;
        }
    }
    let r = residual(a, b);
    assert!(r[0].abs() < 1e-8 && r[1].abs() < 1e-8, "not a fixed point: {r:?}");
    let j = map_jacobian(a, b, 1e-6, &cfg).unwrap();
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    assert!((det - 1.0).abs() <= 1e-3, "det = {det} at ({a}, {b})");
}

#[test]
fn portraits_are_deterministic_and_report_holes() {
    let cfg = config(0.01, Branch::Largest);
    let grid = PortraitGrid::B { alpha: Span { min: 0.0, max: 6.0, n: 3 }, b: Span { min: 5.0, max: 30.0, n: 3 } };
    let first = scatter_portrait(&grid, 3, &cfg).unwrap();
    let second = scatter_portrait(&grid, 3, &cfg).unwrap();
    assert_eq!(first, second);
    // b = 5 lies below the reachable impact parameters at this level.
    assert_eq!(first.holes, vec![0, 1, 2]);
    assert_eq!(first.orbits.len(), 6);
    assert!(first.points().all(|(_, p)| !p.degenerate));
}

#[test]
fn r_max_changes_the_portrait() {
    let grid = PortraitGrid::B { alpha: Span { min: 0.5, max: 5.5, n: 4 }, b: Span { min: 15.0, max: 40.0, n: 2 } };
    let near = scatter_portrait(&grid, 5, &config(0.01, Branch::Largest)).unwrap();
    let far = scatter_portrait(&grid, 5, &ScatterConfig { r_max: 200.0, ..config(0.01, Branch::Largest) }).unwrap();
    let mean_alpha = |p: &fsd_core::scattering::Portrait| {
        let pts: Vec<f64> = p.points().filter(|(_, s)| s.iter > 0).map(|(_, s)| s.alpha).collect();
        pts.iter().sum::<f64>() / pts.len() as f64
    };
    assert!((mean_alpha(&near) - mean_alpha(&far)).abs() > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn returned_points_close_on_the_level(alpha in 0.0f64..6.28, b in 11.5f64..60.0, smallest in any::<bool>()) {
        let branch = if smallest { Branch::Smallest } else { Branch::Largest };
        let cfg = config(0.01, branch);
        let phi = launch_phi(alpha, b, &cfg).unwrap();
        let orbit = scatter_orbit(phi, alpha, 3, &cfg).unwrap();
        prop_assert_eq!(orbit.end, OrbitEnd::Completed);
        for pt in &orbit.points {
            prop_assert!((pt.r - cfg.r_max).abs() <= 1e-9 * cfg.r_max);
            prop_assert!(energy_residual(pt, &cfg).unwrap().abs() <= 1e-8);
            let rs = ReducedState { r: pt.r, phi: pt.phi, p: pt.p, alpha: pt.alpha, k: cfg.k };
            let (realized, gap) = realized_branch(&rs, &cfg).unwrap();
            prop_assert_eq!(realized, pt.branch);
            prop_assert!(gap <= 1e-7);
        }
    }

    #[test]
    fn balanced_orbits_keep_b(alpha in 0.0f64..6.28, b in 11.5f64..80.0) {
        let cfg = config(0.0, Branch::Largest);
        let phi = launch_phi(alpha, b, &cfg).unwrap();
        let orbit = scatter_orbit(phi, alpha, 5, &cfg).unwrap();
        for pt in &orbit.points {
            prop_assert!((pt.b - b).abs() <= 1e-6 * b.max(1.0));
        }
    }
}
