//! The cut-contact obstruction: a branch cut with an open neighborhood inside
//! the closure of an unbounded D1 component.
//!
//! Component membership comes from the global map, but each cut is examined
//! on its own refined window, whose cell size shrinks with the cut length.
//! Short cuts (branch points close together) would otherwise be narrower
//! than the disk used to probe their neighborhood. Window components are
//! tied to global components through the window border.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_region_map_unchecked, check_isolation, label_components, label_grid, ring_cells, CellLabel, RegionMap};
use crate::error::{Error, Result};
use crate::omega::{Cut, OmegaEvaluator};

/// Window cells never exceed this many per axis.
const MAX_WINDOW_RESOLUTION: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionResult {
    pub obstructed: bool,
    /// A cut point whose whole neighborhood lies in the closure of one
    /// unbounded D1 component.
    pub witness: Option<Complex64>,
    /// The two resolutions that were compared.
    pub resolutions: (usize, usize),
}

/// Run the obstruction check at `resolution` and `2·resolution` and report
/// the common verdict. A disagreement between the two grids is returned as
/// `Inconclusive` rather than guessed.
pub fn lemma_obstruction_test(ev: &OmegaEvaluator, half_width: f64, resolution: usize) -> Result<ObstructionResult> {
    let coarse = build_region_map_unchecked(ev, half_width, resolution)?;
    let (obstructed, witness) = obstruction_single(ev, &coarse)?;
    drop(coarse);
    let fine = build_region_map_unchecked(ev, half_width, 2 * resolution)?;
    let (fine_obstructed, fine_witness) = obstruction_single(ev, &fine)?;
    if obstructed != fine_obstructed {
        return Err(Error::Inconclusive(format!(
            "obstruction verdict differs between resolutions {} ({obstructed}) and {} ({fine_obstructed})",
            resolution,
            2 * resolution
        )));
    }
    Ok(ObstructionResult {
        obstructed,
        witness: fine_witness.or(witness),
        resolutions: (resolution, 2 * resolution),
    })
}

/// The obstruction check against one global map: some cut point away from
/// the branch points has every non-cut cell within two (window) cell sizes
/// inside the closure (component plus 4-adjacent cells) of a single
/// unbounded D1 component. Cut points on a boundary between D1 and another
/// domain fail this, since the disk then reaches cells two steps from D1.
///
/// Fails with `Resolution` when two branch points inside a cut's window are
/// less than two window cells apart.
pub fn obstruction_single(ev: &OmegaEvaluator, global: &RegionMap) -> Result<(bool, Option<Complex64>)> {
    let mut witnesses = Vec::new();
    let mut done: Vec<&Cut> = Vec::new();
    for cut in &ev.cuts.cuts {
        // k → −k preserves D1 and the cut set, so a cut and its negative
        // give the same answer.
        if done.iter().any(|c| is_negation(c, cut)) {
            continue;
        }
        done.push(cut);
        if let Some(p) = check_cut(ev, global, cut)? {
            witnesses.push(p);
        }
    }
    let first_quadrant = witnesses.iter().copied().find(|p| p.re > 0.0 && p.im > 0.0);
    let witness = first_quadrant
        .or_else(|| witnesses.iter().map(|&p| -p).find(|p| p.re > 0.0 && p.im > 0.0))
        .or_else(|| witnesses.first().copied());
    Ok((witness.is_some(), witness))
}

fn is_negation(a: &Cut, b: &Cut) -> bool {
    let tol = 1e-12 * (1.0 + a.length());
    a.vertices.len() == b.vertices.len()
        && (a.vertices.iter().zip(&b.vertices).all(|(x, y)| (*x + *y).norm() <= tol)
            || a.vertices.iter().zip(b.vertices.iter().rev()).all(|(x, y)| (*x + *y).norm() <= tol))
}

fn check_cut(ev: &OmegaEvaluator, global: &RegionMap, cut: &Cut) -> Result<Option<Complex64>> {
    let hg = global.cell_size();
    let (mut lo, mut hi) = (cut.vertices[0], cut.vertices[0]);
    for z in &cut.vertices {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let target = (0.5 * hg).min(4.0 * cut.length() / global.resolution as f64);
    let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im) + 6.0 * hg;
    let res = ((2.0 * half / target).ceil() as usize).clamp(128, MAX_WINDOW_RESOLUTION);
    let res = res + res % 2;
    let origin = (lo + hi) * 0.5;
    let inside: Vec<Complex64> = ev
        .cuts
        .branch_points
        .iter()
        .map(|b| b.point)
        .filter(|z| (z.re - origin.re).abs() <= half && (z.im - origin.im).abs() <= half)
        .collect();
    check_isolation(&inside, 2.0 * half / res as f64)?;
    let mut window = label_grid(ev, origin, half, res);
    label_components(&mut window, false);

    // Window components reaching the border inherit the global unbounded
    // D1 components found at the same places.
    let mut links: Vec<Vec<u32>> = vec![Vec::new(); window.components.len()];
    for (col, row) in ring_cells(res) {
        let comp = window.component_of[window.index(col, row)];
        if comp == u32::MAX || window.components[comp as usize].label != CellLabel::D1 {
            continue;
        }
        let Some((gc, gr)) = global.cell_of(window.center(col, row)) else { continue };
        let gcomp = global.component_of[global.index(gc, gr)];
        if gcomp == u32::MAX {
            continue;
        }
        let g = &global.components[gcomp as usize];
        if g.label == CellLabel::D1 && g.unbounded && !links[comp as usize].contains(&gcomp) {
            links[comp as usize].push(gcomp);
        }
    }
    if links.iter().all(Vec::is_empty) {
        return Ok(None);
    }

    let h = window.cell_size();
    let branch: Vec<Complex64> = ev.cuts.branch_points.iter().map(|b| b.point).collect();
    for (a, b) in cut.segments() {
        let steps = ((b - a).norm() / (0.5 * h)).ceil().max(1.0) as usize;
        for s in 0..steps {
            let p = a + (b - a) * (s as f64 / steps as f64);
            if branch.iter().any(|&z| (p - z).norm() <= 3.0 * h) {
                continue;
            }
            if neighborhood_in_closure(&window, &links, p) {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Global components whose closure contains the window cell: those linked
/// to its own component and to the components of its 4-neighbors.
fn closure_of(window: &RegionMap, links: &[Vec<u32>], col: usize, row: usize) -> Vec<u32> {
    let n = window.resolution as i64;
    let mut out = Vec::new();
    for (dc, dr) in [(0i64, 0i64), (-1, 0), (1, 0), (0, -1), (0, 1)] {
        let (c, r) = (col as i64 + dc, row as i64 + dr);
        if c < 0 || r < 0 || c >= n || r >= n {
            continue;
        }
        let comp = window.component_of[window.index(c as usize, r as usize)];
        if comp == u32::MAX {
            continue;
        }
        for &g in &links[comp as usize] {
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

fn neighborhood_in_closure(window: &RegionMap, links: &[Vec<u32>], p: Complex64) -> bool {
    let Some((pc, pr)) = window.cell_of(p) else { return false };
    let h = window.cell_size();
    let n = window.resolution as i64;
    let mut common: Option<Vec<u32>> = None;
    for dr in -3i64..=3 {
        for dc in -3i64..=3 {
            let (c, r) = (pc as i64 + dc, pr as i64 + dr);
            if c < 0 || r < 0 || c >= n || r >= n {
                return false;
            }
            let (c, r) = (c as usize, r as usize);
            if (window.center(c, r) - p).norm() > 2.0 * h || window.label(c, r) == CellLabel::Cut {
                continue;
            }
            let comps = closure_of(window, links, c, r);
            let next: Vec<u32> = match common {
                None => comps,
                Some(prev) => prev.into_iter().filter(|x| comps.contains(x)).collect(),
            };
            if next.is_empty() {
                return false;
            }
            common = Some(next);
        }
    }
    common.is_some()
}
