//! Level sets of functions sampled on rectilinear grids.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Values sampled at the nodes of a rectilinear grid; `values[j * xs.len() + i] = f(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl Grid {
    /// Samples `f` row by row in parallel. Non-finite values mark excluded nodes.
    pub fn sample(xs: Vec<f64>, ys: Vec<f64>, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let values = ys
            .par_iter()
            .flat_map_iter(|&y| xs.iter().map(|&x| f(x, y)).collect::<Vec<_>>())
            .collect();
        Grid { xs, ys, values }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.xs.len() + i]
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` points from `a` to `b`, geometrically spaced; both ends must be positive.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

// Horizontal edge (i, j)-(i+1, j) or vertical edge (i, j)-(i, j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn crossing(grid: &Grid, e: Edge, level: f64) -> [f64; 2] {
    let (i0, j0, i1, j1) = match e {
        Edge::H(i, j) => (i, j, i + 1, j),
        Edge::V(i, j) => (i, j, i, j + 1),
    };
    let (a, b) = (grid.value(i0, j0), grid.value(i1, j1));
    let w = ((level - a) / (b - a)).clamp(0.0, 1.0);
    [
        grid.xs[i0] + w * (grid.xs[i1] - grid.xs[i0]),
        grid.ys[j0] + w * (grid.ys[j1] - grid.ys[j0]),
    ]
}

fn cell_segments(grid: &Grid, i: usize, j: usize, level: f64, out: &mut Vec<(Edge, Edge)>) {
    let v = [
        grid.value(i, j),
        grid.value(i + 1, j),
        grid.value(i + 1, j + 1),
        grid.value(i, j + 1),
    ];
    if v.iter().any(|x| !x.is_finite()) {
        return;
    }
    let above = v.map(|x| x >= level);
    let case = above
        .iter()
        .enumerate()
        .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
    let (bottom, right, top, left) = (Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j));
    let center_above = v.iter().sum::<f64>() / 4.0 >= level;
    let mut push = |a, b| out.push((a, b));
    match case {
        0 | 15 => {}
        1 | 14 => push(left, bottom),
        2 | 13 => push(bottom, right),
        3 | 12 => push(left, right),
        4 | 11 => push(right, top),
        6 | 9 => push(bottom, top),
        7 | 8 => push(left, top),
        5 => {
            // Corners 0 and 2 above.
            if center_above {
                push(left, top);
                push(bottom, right);
            } else {
                push(left, bottom);
                push(right, top);
            }
        }
        10 => {
            if center_above {
                push(left, bottom);
                push(right, top);
            } else {
                push(left, top);
                push(bottom, right);
            }
        }
        _ => unreachable!(),
    }
}

/// Extracts `{f = level}` as polylines by marching squares with linear interpolation.
///
/// Segments sharing a grid edge are joined, so each returned polyline is one
/// connected component of the discretized level set inside the grid.
pub fn contour_lines(grid: &Grid, level: f64) -> Vec<Polyline> {
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let mut segments = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            cell_segments(grid, i, j, level, &mut segments);
        }
    }
    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };

    // Open chains start at edges with a single incident segment.
    let mut ends: Vec<Edge> = incident
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    ends.sort();
    for e in ends {
        let s = incident[&e][0];
        if used[s] {
            continue;
        }
        let chain = walk(s, e, &mut used);
        lines.push(Polyline {
            points: chain.iter().map(|&e| crossing(grid, e, level)).collect(),
            closed: false,
        });
    }
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let start = segments[k].0;
        let chain = walk(k, start, &mut used);
        lines.push(Polyline {
            points: chain.iter().map(|&e| crossing(grid, e, level)).collect(),
            closed: chain.first() == chain.last(),
        });
    }
    lines
}

/// Connected components (4-neighbour) of the nodes where `allowed` holds,
/// each listed as node indices `j * nx + i` in scan order.
pub fn node_components(grid: &Grid, allowed: impl Fn(f64) -> bool) -> Vec<Vec<usize>> {
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let ok: Vec<bool> = grid.values.iter().map(|&v| v.is_finite() && allowed(v)).collect();
    let mut label = vec![usize::MAX; nx * ny];
    let mut comps = Vec::new();
    for start in 0..nx * ny {
        if !ok[start] || label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = Vec::new();
        let mut stack = vec![start];
        label[start] = id;
        while let Some(n) = stack.pop() {
            members.push(n);
            let (i, j) = (n % nx, n / nx);
            let mut visit = |m: usize| {
                if ok[m] && label[m] == usize::MAX {
                    label[m] = id;
                    stack.push(m);
                }
            };
            if i > 0 {
                visit(n - 1);
            }
            if i + 1 < nx {
                visit(n + 1);
            }
            if j > 0 {
                visit(n - nx);
            }
            if j + 1 < ny {
                visit(n + nx);
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}
