//! Marching squares for `{Im Ω = 0} = {Im Ω² = 0} ∩ {Re Ω² ≥ 0}`.
//!
//! Working with Ω² keeps the extraction independent of the sheet, so parts
//! of the contour that run along a branch cut are still found.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;

use super::MIN_RESOLUTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContourTag {
    /// Open polyline reaching the edge of the box.
    Ray,
    /// Closed polyline.
    Loop,
    /// Open polyline with both ends inside the box.
    Arc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContourSet {
    pub half_width: f64,
    pub resolution: usize,
    pub polylines: Vec<Vec<Complex64>>,
    pub classification: Vec<ContourTag>,
}

impl ContourSet {
    pub fn cell_size(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    fn near_edge(&self, z: Complex64) -> bool {
        let lim = self.half_width - 1.5 * self.cell_size();
        z.re.abs() >= lim || z.im.abs() >= lim
    }

    /// Arguments in `[0, 2π)` of polyline ends that reach the box edge.
    pub fn exit_angles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for line in &self.polylines {
            if line.first() == line.last() {
                continue;
            }
            for end in [line[0], *line.last().unwrap()] {
                if self.near_edge(end) {
                    out.push(end.arg().rem_euclid(std::f64::consts::TAU));
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Polyline ends strictly inside the box.
    pub fn interior_endpoints(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for line in &self.polylines {
            if line.first() == line.last() {
                continue;
            }
            for end in [line[0], *line.last().unwrap()] {
                if !self.near_edge(end) {
                    out.push(end);
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.polylines.iter().flatten().copied()
    }

    /// Largest `|Im Ω| / (1 + |k|⁴)` over all vertices.
    pub fn max_vertex_residual(&self, ev: &OmegaEvaluator) -> f64 {
        self.vertices()
            .map(|k| ev.omega_unchecked(k).im.abs() / (1.0 + k.norm().powi(4)))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    /// Between centers (i, j) and (i + 1, j).
    H(u32, u32),
    /// Between centers (i, j) and (i, j + 1).
    V(u32, u32),
}

/// Sample offsets (in cells) of the extraction grid. They are chosen so that
/// no sample lies on the axes or the diagonals, where `Im Ω²` often vanishes
/// identically and its computed sign is rounding noise.
const OFFSET_X: f64 = 0.5731;
const OFFSET_Y: f64 = 0.6373;

/// Extract the contour on a `resolution × resolution` sample grid covering
/// `[-half_width, half_width]²`.
pub fn extract_contour(ev: &OmegaEvaluator, half_width: f64, resolution: usize) -> Result<ContourSet> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Resolution(format!("resolution {resolution} is below {MIN_RESOLUTION}")));
    }
    let max_root = ev.max_root_modulus();
    if !(half_width.is_finite() && half_width > 0.0 && half_width >= 2.0 * max_root) {
        return Err(Error::Domain(format!(
            "half-width {half_width} must be at least twice the largest root modulus {max_root}"
        )));
    }
    let n = resolution;
    let h = 2.0 * half_width / n as f64;
    let inv = &ev.invariants;
    let center = |i: u32, j: u32| {
        Complex64::new(-half_width + (i as f64 + OFFSET_X) * h, -half_width + (j as f64 + OFFSET_Y) * h)
    };
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| (0..n).map(move |i| inv.omega_squared(center(i as u32, j as u32))))
        .collect();
    let f = |i: u32, j: u32| values[j as usize * n + i as usize].im;
    let positive = |v: f64| v >= 0.0;

    let mut points: Vec<Complex64> = Vec::new();
    let mut keep: Vec<bool> = Vec::new();
    let mut index: HashMap<Edge, usize> = HashMap::new();
    let mut point_on = |edge: Edge, points: &mut Vec<Complex64>, keep: &mut Vec<bool>| -> usize {
        *index.entry(edge).or_insert_with(|| {
            let (a, b) = match edge {
                Edge::H(i, j) => (center(i, j), center(i + 1, j)),
                Edge::V(i, j) => (center(i, j), center(i, j + 1)),
            };
            let z = bisect(|k| inv.omega_squared(k).im, a, b);
            let w = inv.omega_squared(z);
            points.push(z);
            keep.push(w.re >= -1e-12 * (1.0 + z.norm().powi(8)));
            points.len() - 1
        })
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..(n - 1) as u32 {
        for i in 0..(n - 1) as u32 {
            let v = [f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)];
            let s = v.map(positive);
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let crossed: Vec<usize> = (0..4).filter(|&e| s[e] != s[(e + 1) % 4]).collect();
            let pairs: Vec<(usize, usize)> = match crossed.len() {
                2 => vec![(crossed[0], crossed[1])],
                4 => {
                    let mid = positive(v.iter().sum::<f64>() / 4.0);
                    if mid == s[0] {
                        vec![(0, 1), (2, 3)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
                _ => Vec::new(),
            };
            for (a, b) in pairs {
                let pa = point_on(edges[a], &mut points, &mut keep);
                let pb = point_on(edges[b], &mut points, &mut keep);
                if keep[pa] && keep[pb] {
                    segments.push((pa, pb));
                }
            }
        }
    }

    let polylines = chain(&points, &segments);
    let mut set = ContourSet { half_width, resolution, polylines, classification: Vec::new() };
    set.classification = set
        .polylines
        .iter()
        .map(|line| {
            if line.len() > 2 && line.first() == line.last() {
                ContourTag::Loop
            } else if set.near_edge(line[0]) || set.near_edge(*line.last().unwrap()) {
                ContourTag::Ray
            } else {
                ContourTag::Arc
            }
        })
        .collect();
    Ok(set)
}

fn bisect(f: impl Fn(Complex64) -> f64, mut a: Complex64, mut b: Complex64) -> Complex64 {
    let mut fa = f(a);
    for _ in 0..60 {
        let m = (a + b) * 0.5;
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm >= 0.0) == (fa >= 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) * 0.5
}

/// Join segments sharing endpoints into polylines; closed chains repeat
/// their first vertex at the end.
fn chain(points: &[Complex64], segments: &[(usize, usize)]) -> Vec<Vec<Complex64>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj[a].push(s);
        adj[b].push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| {
        let mut line = vec![points[start]];
        let mut cur = start;
        while let Some(&s) = adj[cur].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let (a, b) = segments[s];
            cur = if a == cur { b } else { a };
            line.push(points[cur]);
        }
        line
    };
    for p in 0..points.len() {
        if adj[p].len() == 1 && !used[adj[p][0]] {
            out.push(walk(p, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(segments[s].0, &mut used));
        }
    }
    out
}
