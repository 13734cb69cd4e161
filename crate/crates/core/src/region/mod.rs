//! Sign regions D1–D4 on a grid, their connected components, the contour
//! `Im Ω = 0`, and the cut-contact obstruction.
//!
//! `D1 = {Im k² > 0, Im Ω > 0}`, `D2 = {Im k² > 0, Im Ω < 0}`,
//! `D3 = {Im k² < 0, Im Ω > 0}`, `D4 = {Im k² < 0, Im Ω < 0}`.

mod contour;
mod export;
mod obstruction;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;

pub use contour::{extract_contour, ContourSet, ContourTag};
pub use export::{contour_csv, region_svg};
pub use obstruction::{lemma_obstruction_test, obstruction_single, ObstructionResult};

/// Grid resolution used when the caller does not specify one.
pub const DEFAULT_RESOLUTION: usize = 512;
/// Smallest resolution accepted by [`build_region_map`].
pub const MIN_RESOLUTION: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellLabel {
    D1,
    D2,
    D3,
    D4,
    Cut,
    Undefined,
}

impl CellLabel {
    /// Label from the signs of `Im k²` and `Im Ω`.
    pub fn from_signs(im_k2: f64, im_omega: f64) -> Self {
        if im_k2 == 0.0 || im_omega == 0.0 || !im_k2.is_finite() || !im_omega.is_finite() {
            return CellLabel::Undefined;
        }
        match (im_k2 > 0.0, im_omega > 0.0) {
            (true, true) => CellLabel::D1,
            (true, false) => CellLabel::D2,
            (false, true) => CellLabel::D3,
            (false, false) => CellLabel::D4,
        }
    }

    pub fn is_domain(self) -> bool {
        matches!(self, CellLabel::D1 | CellLabel::D2 | CellLabel::D3 | CellLabel::D4)
    }

    /// Angular sectors `[lo, hi)` in `[0, 2π)` where the label holds for
    /// large `|k|`, from `sign Im k² = sign sin 2θ` and `sign Im Ω = sign sin 4θ`.
    pub fn asymptotic_sectors(self) -> Vec<(f64, f64)> {
        let base = match self {
            CellLabel::D1 => 0.0,
            CellLabel::D2 => FRAC_PI_4,
            CellLabel::D3 => FRAC_PI_2,
            CellLabel::D4 => 3.0 * FRAC_PI_4,
            _ => return Vec::new(),
        };
        vec![(base, base + FRAC_PI_4), (base + PI, base + PI + FRAC_PI_4)]
    }
}

/// Angular padding (radians) kept away from sector edges when certifying
/// that a component reaches infinity.
const SECTOR_PADDING: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Component {
    pub label: CellLabel,
    /// Flat cell indices `row * resolution + col`.
    pub cells: Vec<u32>,
    pub touches_boundary: bool,
    /// Angular intervals covered by the component's boundary-ring cells.
    pub asymptotic_sectors: Vec<(f64, f64)>,
    /// Reaches infinity inside one of its label's asymptotic sectors.
    pub unbounded: bool,
}

/// Labeled square grid `origin + [-L, L]²` with `resolution` cells per axis.
/// Row `j` has `Im k` increasing with `j`; column `i` has `Re k` increasing
/// with `i`. Maps built by [`build_region_map`] are centered at 0.
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub origin: Complex64,
    pub half_width: f64,
    pub resolution: usize,
    pub labels: Vec<CellLabel>,
    /// Component index per cell, `u32::MAX` for cut or undefined cells.
    pub component_of: Vec<u32>,
    pub components: Vec<Component>,
}

/// Default half-width: 3·(1 + max root modulus).
pub fn default_half_width(ev: &OmegaEvaluator) -> f64 {
    3.0 * (1.0 + ev.max_root_modulus())
}

impl RegionMap {
    pub fn cell_size(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        let h = self.cell_size();
        self.origin
            + Complex64::new(-self.half_width + (col as f64 + 0.5) * h, -self.half_width + (row as f64 + 0.5) * h)
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.resolution + col
    }

    /// Cell containing `k`, if inside the box.
    pub fn cell_of(&self, k: Complex64) -> Option<(usize, usize)> {
        let h = self.cell_size();
        let k = k - self.origin;
        let c = ((k.re + self.half_width) / h).floor();
        let r = ((k.im + self.half_width) / h).floor();
        let n = self.resolution as f64;
        if c < 0.0 || r < 0.0 || c >= n || r >= n {
            return None;
        }
        Some((c as usize, r as usize))
    }

    pub fn label(&self, col: usize, row: usize) -> CellLabel {
        self.labels[self.index(col, row)]
    }

    pub fn label_at(&self, k: Complex64) -> Option<CellLabel> {
        self.cell_of(k).map(|(c, r)| self.label(c, r))
    }

    /// Components of the given label that reach infinity.
    pub fn unbounded_components(&self, label: CellLabel) -> impl Iterator<Item = (usize, &Component)> + '_ {
        self.components.iter().enumerate().filter(move |(_, c)| c.label == label && c.unbounded)
    }

    /// Whether `k` is in the closure of an unbounded D1 component, judged
    /// by its cell and the 4-neighbors of that cell.
    pub fn in_unbounded_d1_closure(&self, k: Complex64) -> bool {
        let Some((c, r)) = self.cell_of(k) else { return false };
        !self.closure_components(c, r).is_empty()
    }

    /// Unbounded D1 components whose closure contains the cell: its own
    /// component and those of its non-cut 4-neighbors.
    pub(crate) fn closure_components(&self, col: usize, row: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(5);
        let mut push = |idx: usize| {
            let comp = self.component_of[idx];
            if comp != u32::MAX {
                let c = &self.components[comp as usize];
                if c.label == CellLabel::D1 && c.unbounded && !out.contains(&comp) {
                    out.push(comp);
                }
            }
        };
        push(self.index(col, row));
        for (dc, dr) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
            let (c2, r2) = (col as i64 + dc, row as i64 + dr);
            if c2 < 0 || r2 < 0 || c2 >= self.resolution as i64 || r2 >= self.resolution as i64 {
                continue;
            }
            push(self.index(c2 as usize, r2 as usize));
        }
        out
    }
}

/// Label a `resolution × resolution` grid on `[-half_width, half_width]²`.
/// Cells whose centers lie within half a cell (or `eps_cut`) of a cut are
/// marked `Cut`, which guarantees that no pair of 4-adjacent non-cut cells
/// straddles a cut.
pub fn build_region_map(ev: &OmegaEvaluator, half_width: f64, resolution: usize) -> Result<RegionMap> {
    let map = build_region_map_unchecked(ev, half_width, resolution)?;
    let points: Vec<Complex64> = ev.cuts.branch_points.iter().map(|b| b.point).collect();
    check_isolation(&points, map.cell_size())?;
    Ok(map)
}

/// As [`build_region_map`] but without the branch-point isolation check,
/// for callers that resolve the neighborhoods of the cuts separately.
pub(crate) fn build_region_map_unchecked(ev: &OmegaEvaluator, half_width: f64, resolution: usize) -> Result<RegionMap> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Resolution(format!("resolution {resolution} is below {MIN_RESOLUTION}")));
    }
    let max_root = ev.max_root_modulus();
    if !(half_width.is_finite() && half_width >= 2.0 * max_root && half_width > 0.0) {
        return Err(Error::Domain(format!(
            "half-width {half_width} must be at least twice the largest root modulus {max_root}"
        )));
    }
    let mut map = label_grid(ev, Complex64::new(0.0, 0.0), half_width, resolution);
    label_components(&mut map, true);
    Ok(map)
}

/// Labels and cut cells of a grid, without components.
pub(crate) fn label_grid(ev: &OmegaEvaluator, origin: Complex64, half_width: f64, resolution: usize) -> RegionMap {
    let n = resolution;
    let h = 2.0 * half_width / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| origin.re - half_width + (i as f64 + 0.5) * h).collect();
    let mut labels: Vec<CellLabel> = (0..n)
        .into_par_iter()
        .flat_map_iter(|row| {
            let y = origin.im - half_width + (row as f64 + 0.5) * h;
            let omegas = ev.omega_row(y, &xs);
            xs.iter()
                .zip(omegas)
                .map(|(&x, w)| {
                    // Im Ω at rounding level (Ω real on a symmetry line) has no sign.
                    let im = if w.im.abs() <= 1e-13 * w.norm() { 0.0 } else { w.im };
                    CellLabel::from_signs(2.0 * x * y, im)
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let mut map = RegionMap {
        origin,
        half_width,
        resolution: n,
        labels: Vec::new(),
        component_of: Vec::new(),
        components: Vec::new(),
    };
    let cut_radius = (0.5 * h).max(ev.eps_cut);
    for cut in &ev.cuts.cuts {
        for (a, b) in cut.segments() {
            rasterize_segment(&map, a, b, cut_radius, &mut labels);
        }
    }
    map.labels = labels;
    map
}

/// Every pair of branch points must be at least two cells apart.
pub(crate) fn check_isolation(pts: &[Complex64], h: f64) -> Result<()> {
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm();
            if d < 2.0 * h {
                return Err(Error::Resolution(format!(
                    "branch points {} and {} are {d:.3e} apart, less than two cells ({:.3e})",
                    pts[i],
                    pts[j],
                    2.0 * h
                )));
            }
        }
    }
    Ok(())
}

fn rasterize_segment(map: &RegionMap, a: Complex64, b: Complex64, radius: f64, labels: &mut [CellLabel]) {
    let h = map.cell_size();
    let n = map.resolution as i64;
    let (a0, b0) = (a - map.origin, b - map.origin);
    let idx = |v: f64| (v + map.half_width) / h - 0.5;
    let (c0, c1) = (idx(a0.re.min(b0.re) - radius).floor(), idx(a0.re.max(b0.re) + radius).ceil());
    let (r0, r1) = (idx(a0.im.min(b0.im) - radius).floor(), idx(a0.im.max(b0.im) + radius).ceil());
    if c1 < 0.0 || r1 < 0.0 || c0 > (n - 1) as f64 || r0 > (n - 1) as f64 {
        return;
    }
    let clamp = |v: f64| (v as i64).clamp(0, n - 1);
    let (c0, c1, r0, r1) = (clamp(c0), clamp(c1), clamp(r0), clamp(r1));
    for r in r0..=r1 {
        for c in c0..=c1 {
            let k = map.center(c as usize, r as usize);
            if crate::omega::segment_distance(k, a, b) <= radius {
                labels[(r * n + c) as usize] = CellLabel::Cut;
            }
        }
    }
}

/// Flood fill into 4-connected components. With `certify`, components
/// meeting the boundary ring inside their label's asymptotic sectors are
/// marked unbounded; this only makes sense for maps centered at 0.
pub(crate) fn label_components(map: &mut RegionMap, certify: bool) {
    let n = map.resolution;
    let mut component_of = vec![u32::MAX; n * n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n * n {
        let label = map.labels[start];
        if !label.is_domain() || component_of[start] != u32::MAX {
            continue;
        }
        let id = components.len() as u32;
        let mut cells = Vec::new();
        component_of[start] = id;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            cells.push(idx as u32);
            let (col, row) = (idx % n, idx / n);
            let mut visit = |nb: usize| {
                if component_of[nb] == u32::MAX && map.labels[nb] == label {
                    component_of[nb] = id;
                    stack.push(nb);
                }
            };
            if col > 0 {
                visit(idx - 1);
            }
            if col + 1 < n {
                visit(idx + 1);
            }
            if row > 0 {
                visit(idx - n);
            }
            if row + 1 < n {
                visit(idx + n);
            }
        }
        components.push(Component {
            label,
            cells,
            touches_boundary: false,
            asymptotic_sectors: Vec::new(),
            unbounded: false,
        });
    }

    // Boundary ring: collect the angles at which each component meets it.
    let mut ring_angles: Vec<Vec<f64>> = vec![Vec::new(); components.len()];
    for (col, row) in ring_cells(n) {
        let comp = component_of[row * n + col];
        if comp != u32::MAX {
            ring_angles[comp as usize].push(map.center(col, row).arg().rem_euclid(TAU));
        }
    }
    let step = TAU / (4.0 * n as f64) * 2.0;
    for (comp, mut angles) in components.iter_mut().zip(ring_angles) {
        if angles.is_empty() {
            continue;
        }
        comp.touches_boundary = true;
        angles.sort_by(f64::total_cmp);
        comp.unbounded = certify
            && angles.iter().any(|&a| {
            comp.label
                .asymptotic_sectors()
                .iter()
                .any(|&(lo, hi)| a > lo + SECTOR_PADDING && a < hi - SECTOR_PADDING)
        });
        comp.asymptotic_sectors = merge_angles(&angles, 4.0 * step);
    }
    map.component_of = component_of;
    map.components = components;
}

/// Cells on the outermost ring, each listed once.
pub(crate) fn ring_cells(n: usize) -> impl Iterator<Item = (usize, usize)> {
    let bottom = (0..n).map(|c| (c, 0));
    let top = (0..n).map(move |c| (c, n - 1));
    let left = (1..n - 1).map(|r| (0, r));
    let right = (1..n - 1).map(move |r| (n - 1, r));
    bottom.chain(top).chain(left).chain(right)
}

/// Merge sorted angles into intervals, joining neighbors closer than `gap`.
fn merge_angles(sorted: &[f64], gap: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &a in sorted {
        match out.last_mut() {
            Some(last) if a - last.1 <= gap => last.1 = a,
            _ => out.push((a, a)),
        }
    }
    if out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if first.0 + TAU - last.1 <= gap {
            out.pop();
            out[0] = (last.0, first.1 + TAU);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParameterTriple;

    fn ev(alpha: f64, omega: f64, re: f64, im: f64) -> OmegaEvaluator {
        OmegaEvaluator::new(ParameterTriple::new(alpha, omega, Complex64::new(re, im)).unwrap()).unwrap()
    }

    #[test]
    fn labels_from_signs() {
        assert_eq!(CellLabel::from_signs(1.0, 1.0), CellLabel::D1);
        assert_eq!(CellLabel::from_signs(1.0, -1.0), CellLabel::D2);
        assert_eq!(CellLabel::from_signs(-1.0, 1.0), CellLabel::D3);
        assert_eq!(CellLabel::from_signs(-1.0, -1.0), CellLabel::D4);
        assert_eq!(CellLabel::from_signs(0.0, 1.0), CellLabel::Undefined);
    }

    #[test]
    fn soliton_has_two_unbounded_d1_components() {
        let e = ev(2.0, 1.0, 0.0, -2.0);
        let map = build_region_map(&e, default_half_width(&e), 128).unwrap();
        assert_eq!(map.unbounded_components(CellLabel::D1).count(), 2);
        let far = Complex64::from_polar(0.95 * map.half_width, std::f64::consts::FRAC_PI_8);
        assert_eq!(map.label_at(far), Some(CellLabel::D1));
        assert!(!map.labels.contains(&CellLabel::Cut));
    }

    #[test]
    fn labels_are_symmetric() {
        let e = ev(1.0, 3.99, 2.0, -0.3);
        let map = build_region_map(&e, default_half_width(&e), 256).unwrap();
        let n = map.resolution;
        let swap = |l: CellLabel| match l {
            CellLabel::D1 => CellLabel::D4,
            CellLabel::D4 => CellLabel::D1,
            CellLabel::D2 => CellLabel::D3,
            CellLabel::D3 => CellLabel::D2,
            other => other,
        };
        let mut mismatches = 0;
        for r in 0..n {
            for c in 0..n {
                let l = map.label(c, r);
                if l != map.label(n - 1 - c, n - 1 - r) {
                    mismatches += 1;
                }
                if swap(l) != map.label(c, n - 1 - r) {
                    mismatches += 1;
                }
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn plane_wave_cut_cells_are_on_the_real_axis() {
        let e = ev(1.0, -1.5, 0.0, -1.0);
        let map = build_region_map(&e, default_half_width(&e), 128).unwrap();
        let h = map.cell_size();
        for r in 0..map.resolution {
            for c in 0..map.resolution {
                if map.label(c, r) == CellLabel::Cut {
                    assert!(map.center(c, r).im.abs() <= h, "{}", map.center(c, r));
                }
            }
        }
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        let e = ev(1.0, -1.5, 0.0, -1.0);
        assert!(matches!(build_region_map(&e, 10.0, 64), Err(Error::Resolution(_))));
    }

    #[test]
    fn wraparound_merge() {
        let v = merge_angles(&[0.01, 0.02, 3.0, TAU - 0.01], 0.05);
        assert_eq!(v.len(), 2);
        assert!((v[0].0 - (TAU - 0.01)).abs() < 1e-12 && (v[0].1 - (0.02 + TAU)).abs() < 1e-12);
    }
}
