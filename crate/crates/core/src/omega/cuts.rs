//! Branch-cut layouts for Ω, one per case of the spectral analysis.
//!
//! Every layout pairs the odd zeros of Ω² and joins each pair by a polyline.
//! The standard layouts route cuts along the contour `Im Ω = 0` wherever that
//! makes the cut-contact obstruction visible. The chord layout joins the same
//! pairs by straight segments, to probe how much the verdict depends on the
//! choice of cuts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CaseLabel, SpectralInvariants};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub vertices: Vec<Complex64>,
}

impl Cut {
    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    fn mapped(&self, f: impl Fn(Complex64) -> Complex64) -> Cut {
        Cut { vertices: self.vertices.iter().map(|&z| f(z)).collect() }
    }

    /// Distance from `k` to the polyline.
    pub fn distance(&self, k: Complex64) -> f64 {
        self.segments().map(|(a, b)| segment_distance(k, a, b)).fold(f64::INFINITY, f64::min)
    }
}

pub fn segment_distance(k: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (k - a).norm();
    }
    let t = (((k - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (k - (a + d * t)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub point: Complex64,
    pub multiplicity: usize,
}

/// Branch points of Ω, the cuts joining them, and the extra zeros and poles
/// of `(2Ω − H)/(2Ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCutSet {
    pub branch_points: Vec<BranchPoint>,
    pub cuts: Vec<Cut>,
    pub secondary_points: Vec<Complex64>,
}

impl BranchCutSet {
    pub fn empty() -> Self {
        Self { branch_points: Vec::new(), cuts: Vec::new(), secondary_points: Vec::new() }
    }

    pub fn distance(&self, k: Complex64) -> f64 {
        self.cuts.iter().map(|c| c.distance(k)).fold(f64::INFINITY, f64::min)
    }
}

/// Which family of cut shapes to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutLayout {
    /// Case-specific routing (contour-following where it matters).
    #[default]
    Standard,
    /// Straight segments joining the same pairs of branch points.
    Chords,
}

/// Cuts for the given case. `roots` are the zeros of Ω² with multiplicity.
pub fn build_branch_cuts(
    inv: &SpectralInvariants,
    label: CaseLabel,
    roots: &[(Complex64, usize)],
    layout: CutLayout,
) -> Result<BranchCutSet> {
    let odd: Vec<Complex64> = roots.iter().filter(|r| r.1 % 2 == 1).map(|r| r.0).collect();
    let branch_points: Vec<BranchPoint> = roots
        .iter()
        .filter(|r| r.1 % 2 == 1)
        .map(|&(point, multiplicity)| BranchPoint { point, multiplicity })
        .collect();
    let expect = |n: usize| -> Result<()> {
        if odd.len() == n {
            Ok(())
        } else {
            Err(Error::CutConstruction(format!(
                "case {label} expects {n} odd zeros of Omega^2, found {}",
                odd.len()
            )))
        }
    };
    let first_quadrant = |z: &Complex64| z.re > 0.0 && z.im > 0.0;

    let mut cuts = match label {
        CaseLabel::OutsideScope => return Err(Error::UnsupportedCase(label)),
        CaseLabel::SolitonDiscZero => {
            expect(0)?;
            Vec::new()
        }
        CaseLabel::SolitonDiscNegX1Pos => {
            expect(8)?;
            let (za, zb) = split_by_angle(&odd, FRAC_PI_4)?;
            let q1 = match layout {
                CutLayout::Standard => {
                    let guess = Complex64::from_polar((inv.x1 / 8.0).powf(0.25), FRAC_PI_4);
                    let s = refine_saddle(inv, guess)?;
                    let a = trace_to_saddle(inv, za, s)?;
                    let b = trace_to_saddle(inv, zb, s)?;
                    join(a, b)
                }
                CutLayout::Chords => Cut { vertices: vec![za, zb] },
            };
            four_fold(&q1)
        }
        CaseLabel::SolitonDiscNegX1Neg => {
            expect(8)?;
            let (za, zw) = split_by_angle(&odd, FRAC_PI_4)?;
            let rho = (-inv.x1 / 8.0).powf(0.25);
            let (real_cut, imag_cut) = match layout {
                CutLayout::Standard => {
                    let sr = refine_saddle(inv, Complex64::new(rho, 0.0))?;
                    let si = refine_saddle(inv, Complex64::new(0.0, rho))?;
                    let a = trace_to_saddle(inv, za, sr)?;
                    let w = trace_to_saddle(inv, zw, si)?;
                    (mirror_join(&a, |z| z.conj()), mirror_join(&w, |z| -z.conj()))
                }
                CutLayout::Chords => {
                    (Cut { vertices: vec![za, za.conj()] }, Cut { vertices: vec![zw, -zw.conj()] })
                }
            };
            vec![real_cut.mapped(|z| -z), imag_cut.mapped(|z| -z), real_cut, imag_cut]
        }
        CaseLabel::SolitonDiscNegX1Zero => {
            expect(8)?;
            let (z1, z2) = split_by_angle(&odd, FRAC_PI_4)?;
            let (real_cut, imag_cut) = match layout {
                CutLayout::Standard => {
                    let a = radial_then_arc(z1, 0.0);
                    let w = radial_then_arc(z2, FRAC_PI_2);
                    (mirror_join(&a, |z| z.conj()), mirror_join(&w, |z| -z.conj()))
                }
                CutLayout::Chords => {
                    (Cut { vertices: vec![z1, z1.conj()] }, Cut { vertices: vec![z2, -z2.conj()] })
                }
            };
            vec![real_cut.mapped(|z| -z), imag_cut.mapped(|z| -z), real_cut, imag_cut]
        }
        CaseLabel::SolitonDiscPosX1Pos => {
            expect(8)?;
            let mut q1: Vec<Complex64> = odd.iter().copied().filter(first_quadrant).collect();
            if q1.len() != 2 {
                return Err(Error::CutConstruction("expected two odd zeros per quadrant".into()));
            }
            q1.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            let cut = match layout {
                CutLayout::Standard => diagonal_bulge(q1[0], q1[1]),
                CutLayout::Chords => Cut { vertices: vec![q1[0], q1[1]] },
            };
            four_fold(&cut)
        }
        CaseLabel::SolitonDiscPosX1Nonpos => return Err(Error::UnsupportedCase(label)),
        CaseLabel::PwBLow => {
            let mut real: Vec<f64> = odd.iter().map(|z| z.re).collect();
            if odd.iter().any(|z| z.im != 0.0) || real.len() % 2 == 1 {
                return Err(Error::CutConstruction("plane-wave branch points must be real here".into()));
            }
            real.sort_by(f64::total_cmp);
            real.chunks(2)
                .map(|p| Cut { vertices: vec![Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)] })
                .collect()
        }
        CaseLabel::PwBMid => {
            expect(4)?;
            let p1 = *odd
                .iter()
                .find(|z| first_quadrant(z))
                .ok_or_else(|| Error::CutConstruction("no branch point in the first quadrant".into()))?;
            let right = match layout {
                CutLayout::Standard => match pw_mid_real_saddle(inv) {
                    // Low in the band the contour joins p₁ to p̄₁ through a
                    // saddle on the real axis; the cut follows that arc.
                    Some(guess) => {
                        let s = refine_saddle(inv, guess)?;
                        mirror_join(&trace_to_saddle(inv, p1, s)?, |z| z.conj())
                    }
                    None => {
                        let outer = 2.0 * roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
                        pw_mid_loop(inv, p1, outer)?
                    }
                },
                CutLayout::Chords => Cut { vertices: vec![p1, p1.conj()] },
            };
            vec![right.mapped(|z| -z.conj()), right]
        }
        CaseLabel::PwBHigh => {
            expect(4)?;
            let p1 = *odd
                .iter()
                .find(|z| first_quadrant(z))
                .ok_or_else(|| Error::CutConstruction("no branch point in the first quadrant".into()))?;
            let top = Cut { vertices: vec![-p1.conj(), p1] };
            vec![top.mapped(|z| z.conj()), top]
        }
    };

    snap_endpoints(&mut cuts, &odd)?;
    Ok(BranchCutSet { branch_points, cuts, secondary_points: Vec::new() })
}

/// The two first-quadrant odd zeros, ordered by argument around `pivot`.
fn split_by_angle(odd: &[Complex64], pivot: f64) -> Result<(Complex64, Complex64)> {
    let q1: Vec<Complex64> = odd.iter().copied().filter(|z| z.re > 0.0 && z.im > 0.0).collect();
    let below = q1.iter().copied().filter(|z| z.arg() < pivot).collect::<Vec<_>>();
    let above = q1.iter().copied().filter(|z| z.arg() >= pivot).collect::<Vec<_>>();
    if below.len() != 1 || above.len() != 1 {
        return Err(Error::CutConstruction(format!(
            "expected one odd zero on each side of arg = {pivot:.4} in the first quadrant, found {} and {}",
            below.len(),
            above.len()
        )));
    }
    Ok((below[0], above[0]))
}

/// `{C, −C, C̄, −C̄}`.
fn four_fold(cut: &Cut) -> Vec<Cut> {
    vec![cut.clone(), cut.mapped(|z| -z.conj()), cut.mapped(|z| -z), cut.mapped(|z| z.conj())]
}

/// `a` followed by `b` reversed; both end at the same point.
fn join(a: Vec<Complex64>, mut b: Vec<Complex64>) -> Cut {
    b.pop();
    b.reverse();
    let mut v = a;
    v.extend(b);
    Cut { vertices: v }
}

/// A half-cut ending on a symmetry line, completed by its mirror image.
fn mirror_join(half: &[Complex64], mirror: impl Fn(Complex64) -> Complex64) -> Cut {
    let mut v = half.to_vec();
    v.extend(half.iter().rev().skip(1).map(|&z| mirror(z)));
    Cut { vertices: v }
}

/// Replace each cut endpoint by the exact odd zero it approximates and check
/// that every odd zero is used exactly once.
fn snap_endpoints(cuts: &mut [Cut], odd: &[Complex64]) -> Result<()> {
    let scale = odd.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut used = vec![0usize; odd.len()];
    for cut in cuts.iter_mut() {
        let n = cut.vertices.len();
        for idx in [0, n - 1] {
            let v = cut.vertices[idx];
            let (j, d) = odd
                .iter()
                .enumerate()
                .map(|(j, z)| (j, (z - v).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::CutConstruction("cut without branch points".into()))?;
            if d > 1e-6 * scale {
                return Err(Error::CutConstruction(format!("cut endpoint {v} is not a branch point")));
            }
            cut.vertices[idx] = odd[j];
            used[j] += 1;
        }
    }
    if let Some(j) = used.iter().position(|&u| u != 1) {
        return Err(Error::CutConstruction(format!(
            "branch point {} is the endpoint of {} cuts",
            odd[j], used[j]
        )));
    }
    Ok(())
}

/// Newton iteration for a critical point of Ω² near `guess`.
fn refine_saddle(inv: &SpectralInvariants, guess: Complex64) -> Result<Complex64> {
    let mut s = guess;
    for _ in 0..50 {
        let d1 = inv.omega_squared_derivative(s);
        let k2 = s * s;
        let d2 = k2 * k2 * k2 * 224.0 + k2 * (12.0 * inv.x1) + 2.0 * inv.x2;
        if d2.norm() == 0.0 {
            break;
        }
        let step = d1 / d2;
        s -= step;
        if step.norm() <= 1e-15 * (1.0 + s.norm()) {
            break;
        }
    }
    if (s - guess).norm() > 0.1 * (1.0 + guess.norm()) || !s.re.is_finite() {
        return Err(Error::CutConstruction(format!("saddle near {guess} not found")));
    }
    Ok(s)
}

/// Solve `Ω²(k) = v` by Newton's method from `k`.
fn solve_level(inv: &SpectralInvariants, mut k: Complex64, v: f64) -> Option<Complex64> {
    let target = Complex64::new(v, 0.0);
    for _ in 0..40 {
        let f = inv.omega_squared(k) - target;
        let df = inv.omega_squared_derivative(k);
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        k -= step;
        if step.norm() <= 1e-15 * (1.0 + k.norm()) {
            return Some(k);
        }
    }
    let resid = (inv.omega_squared(k) - target).norm();
    (resid <= 1e-10 * (1.0 + v.abs())).then_some(k)
}

/// Follow the arc of `{Ω² ∈ [0, Ω²(s)]}` from the simple zero `start` to the
/// saddle `s`. The level schedule is quadratic near the saddle, where the
/// level set pinches.
fn trace_to_saddle(inv: &SpectralInvariants, start: Complex64, s: Complex64) -> Result<Vec<Complex64>> {
    const STEPS: usize = 400;
    let top = inv.omega_squared(s);
    if !(top.re > 0.0) || top.im.abs() > 1e-8 * top.norm().max(1.0) {
        return Err(Error::CutConstruction(format!("saddle value {top} is not positive real")));
    }
    let top = top.re;
    let mut pts = vec![start];
    let mut k = start;
    let mut v_prev = 0.0;
    for j in 1..STEPS {
        let t = 1.0 - j as f64 / STEPS as f64;
        let v = top * (1.0 - t * t);
        let guess = k + Complex64::new(v - v_prev, 0.0) / inv.omega_squared_derivative(k);
        k = solve_level(inv, guess, v)
            .ok_or_else(|| Error::CutConstruction(format!("level tracing stalled at {k}")))?;
        pts.push(k);
        v_prev = v;
    }
    let last_step = (pts[pts.len() - 1] - pts[pts.len() - 2]).norm();
    if (k - s).norm() > 4.0 * last_step.max(1e-3 * s.norm()) {
        return Err(Error::CutConstruction(format!(
            "level curve from {start} ends at {k}, away from the saddle {s}"
        )));
    }
    pts.push(s);
    Ok(pts)
}

/// Follow `{Ω² ≥ 0}` outward from the simple zero `start` until `|k| ≥ r_stop`.
fn trace_outward(inv: &SpectralInvariants, start: Complex64, r_stop: f64) -> Result<Vec<Complex64>> {
    let h = 0.01 * start.norm().max(1e-3);
    let mut pts = vec![start];
    let mut k = start;
    let mut v = 0.0;
    while k.norm() < r_stop {
        if pts.len() > 20_000 {
            return Err(Error::CutConstruction("outward trace did not leave the disk".into()));
        }
        let d = inv.omega_squared_derivative(k);
        let dv = h * d.norm().max(1e-12);
        let guess = k + Complex64::new(dv, 0.0) / d;
        v += dv;
        k = solve_level(inv, guess, v)
            .ok_or_else(|| Error::CutConstruction(format!("outward trace stalled at {k}")))?;
        if (k - pts[pts.len() - 1]).norm() > 10.0 * h {
            return Err(Error::CutConstruction("outward trace jumped between branches".into()));
        }
        pts.push(k);
    }
    Ok(pts)
}

/// Radial segment from the zero `z` inward to 0.55|z|, then a polar arc down
/// to radius 0.36|z| on the ray `arg = target`.
fn radial_then_arc(z: Complex64, target: f64) -> Vec<Complex64> {
    let rho = z.norm();
    let theta = z.arg();
    let mut pts = Vec::new();
    for j in 0..=20 {
        let r = rho * (1.0 - 0.45 * j as f64 / 20.0);
        pts.push(Complex64::from_polar(r, theta));
    }
    for j in 1..=40 {
        let s = j as f64 / 40.0;
        let r = rho * (0.55 + (0.36 - 0.55) * s);
        let th = theta + (target - theta) * s;
        pts.push(Complex64::from_polar(r, th));
    }
    let last = pts.len() - 1;
    pts[last] = Complex64::from_polar(rho * 0.36, target);
    pts
}

/// From the inner zero inward along its ray, round a bulge on the far side of
/// the diagonal, and come back along the ray to the outer zero.
fn diagonal_bulge(inner: Complex64, outer: Complex64) -> Cut {
    let r_in = inner.norm();
    let r_out = outer.norm();
    let mut pts = Vec::new();
    for j in 0..=20 {
        pts.push(inner * (1.0 - 0.5 * j as f64 / 20.0));
    }
    let (th_in, th_out) = (inner.arg(), outer.arg());
    let (r0, r1) = (0.5 * r_in, 1.5 * r_out);
    for j in 1..80 {
        let s = j as f64 / 80.0;
        let r = r0 + (r1 - r0) * s;
        let th = th_in + (th_out - th_in) * s + FRAC_PI_8 * (PI * s).sin();
        pts.push(Complex64::from_polar(r, th));
    }
    for j in 0..=20 {
        pts.push(outer * (1.5 - 0.5 * j as f64 / 20.0));
    }
    Cut { vertices: pts }
}

/// Cut for the first-quadrant plane-wave branch point: along the contour out
/// to `outer`, over the top, back in at a steeper angle, and down to the real
/// axis inside the branch point; closed by its mirror image below the axis.
/// The outer critical point of Ω² on the positive real axis, if any. With
/// `m = k²` the critical points solve `16m³ + 2X₁m + X₂ = 0`. For plane-wave
/// parameters the roots other than the double zero `m = b/2` are
/// `(−b ± √D)/4` with `D = b² − 4α²b − 2α⁴`, both positive exactly when
/// `−α²/2 < b < (2 − √6)α²`.
fn pw_mid_real_saddle(inv: &SpectralInvariants) -> Option<Complex64> {
    let cubic = [
        Complex64::new(inv.x2, 0.0),
        Complex64::new(2.0 * inv.x1, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(16.0, 0.0),
    ];
    let roots = crate::poly::aberth(&cubic).ok()?;
    let scale = 1.0 + inv.x1.abs().sqrt() + inv.x3.abs().sqrt();
    roots
        .into_iter()
        .filter(|m| m.im.abs() <= 1e-9 * (1.0 + m.norm()) && m.re > 0.0)
        .map(|m| Complex64::new(m.re.sqrt(), 0.0))
        .filter(|&k| inv.omega_squared(k).re > 1e-9 * scale * scale)
        .max_by(|a, b| a.re.total_cmp(&b.re))
}

fn pw_mid_loop(inv: &SpectralInvariants, p1: Complex64, outer: f64) -> Result<Cut> {
    let trace = trace_outward(inv, p1, outer)?;
    let max_angle = trace.iter().map(|z| z.arg()).fold(f64::MIN, f64::max);
    let min_r = trace.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let end = *trace.last().unwrap();
    let (r_t, th_t) = (end.norm(), end.arg());
    let th_c = 0.5 * (max_angle + FRAC_PI_2);
    let r_c = 0.5 * min_r;
    let mut pts = trace;
    for j in 1..=60 {
        let th = th_t + (th_c - th_t) * j as f64 / 60.0;
        pts.push(Complex64::from_polar(r_t, th));
    }
    for j in 1..=60 {
        let r = r_t + (r_c - r_t) * j as f64 / 60.0;
        pts.push(Complex64::from_polar(r, th_c));
    }
    for j in 1..=60 {
        let th = th_c * (1.0 - j as f64 / 60.0);
        pts.push(Complex64::from_polar(r_c, th));
    }
    let last = pts.len() - 1;
    pts[last] = Complex64::new(r_c, 0.0);
    Ok(mirror_join(&pts, |z| z.conj()))
}
