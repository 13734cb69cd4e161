//! Ω(k), H(k), E(k) and the background eigenfunction on the cut plane.
//!
//! Values are computed as `±√Ω²(k)` with the principal root; the sign comes
//! from a factorized model of Ω (see [`sheet`]) that is analytic off the cuts
//! and normalized by `Ω ~ 2k⁴` at infinity. An independent route by
//! step-by-step continuation from the anchor circle is kept for checking.

mod cuts;
mod roots;
mod sheet;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use cuts::{build_branch_cuts, segment_distance, BranchCutSet, BranchPoint, Cut, CutLayout};
pub use roots::{cluster_tolerance, omega_squared_roots};

use crate::error::{Error, Result};
use crate::matrix::Matrix2;
use crate::params::{classify, derive_invariants_with_tol, CaseLabel, ParameterTriple, SpectralInvariants, DEFAULT_TOL};
use sheet::SheetModel;

/// Evaluator for the branch of Ω fixed by `Ω(k) = 2k⁴ + ω/2 + O(k⁻²)`.
#[derive(Debug, Clone)]
pub struct OmegaEvaluator {
    pub triple: ParameterTriple,
    pub invariants: SpectralInvariants,
    pub case_label: CaseLabel,
    pub roots: Vec<(Complex64, usize)>,
    pub cuts: BranchCutSet,
    pub anchor_radius: f64,
    pub eps_cut: f64,
    model: SheetModel,
}

/// Path shapes for the continuation oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuationPath {
    /// Along the anchor circle to `arg k`, then radially in to `k`.
    ArcThenRadial,
    /// Radially in to `|k|` at the anchor angle, then along the circle `|z| = |k|`.
    RadialThenArc,
}

impl OmegaEvaluator {
    /// Classify the triple and build the standard cut layout for its case.
    pub fn new(triple: ParameterTriple) -> Result<Self> {
        Self::with_layout(triple, DEFAULT_TOL, CutLayout::Standard)
    }

    pub fn with_layout(triple: ParameterTriple, tol: f64, layout: CutLayout) -> Result<Self> {
        let verdict = classify(&triple, tol)?;
        Self::for_case(triple, verdict.case_label, tol, layout)
    }

    /// Build for an explicitly given case label (skips classification).
    pub fn for_case(triple: ParameterTriple, label: CaseLabel, tol: f64, layout: CutLayout) -> Result<Self> {
        let invariants = derive_invariants_with_tol(&triple, tol);
        let roots = omega_squared_roots(&invariants, tol)?;
        let cuts = build_branch_cuts(&invariants, label, &roots, layout)?;
        Ok(Self::assemble(triple, invariants, label, roots, cuts))
    }

    /// Build from precomputed cuts, e.g. a custom layout.
    pub fn with_cuts(triple: ParameterTriple, label: CaseLabel, cuts: BranchCutSet, tol: f64) -> Result<Self> {
        let invariants = derive_invariants_with_tol(&triple, tol);
        let roots = omega_squared_roots(&invariants, tol)?;
        Ok(Self::assemble(triple, invariants, label, roots, cuts))
    }

    fn assemble(
        triple: ParameterTriple,
        invariants: SpectralInvariants,
        case_label: CaseLabel,
        roots: Vec<(Complex64, usize)>,
        cuts: BranchCutSet,
    ) -> Self {
        let max_root = roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
        let anchor_radius = 4.0 * (1.0 + max_root);
        let even: Vec<(Complex64, u32)> = roots
            .iter()
            .filter(|r| r.1 >= 2)
            .map(|&(r, m)| (r, (m / 2) as u32))
            .collect();
        let model = SheetModel::new(even, &cuts.cuts);
        let mut ev = Self {
            triple,
            invariants,
            case_label,
            roots,
            cuts,
            anchor_radius,
            eps_cut: 1e-8 * anchor_radius,
            model,
        };
        ev.cuts.secondary_points = ev.secondary_points();
        ev
    }

    pub fn max_root_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max)
    }

    /// Ω at `k`, rejecting points within `eps_cut` of a cut.
    pub fn eval_omega(&self, k: Complex64) -> Result<Complex64> {
        if self.cuts.distance(k) <= self.eps_cut {
            return Err(Error::OnCut { k });
        }
        Ok(self.omega_unchecked(k))
    }

    /// Ω at `k` without the cut-proximity check.
    pub fn omega_unchecked(&self, k: Complex64) -> Complex64 {
        let root = self.invariants.omega_squared(k).sqrt();
        let model = self.model.model(k);
        if (root - model).norm_sqr() <= (root + model).norm_sqr() {
            root
        } else {
            -root
        }
    }

    /// Ω along the row `Im k = y` at the given abscissae (no cut check).
    pub fn omega_row(&self, y: f64, xs: &[f64]) -> Vec<Complex64> {
        let models = self.model.model_row(y, xs);
        xs.iter()
            .zip(models)
            .map(|(&x, model)| {
                let root = self.invariants.omega_squared(Complex64::new(x, y)).sqrt();
                if (root - model).norm_sqr() <= (root + model).norm_sqr() {
                    root
                } else {
                    -root
                }
            })
            .collect()
    }

    /// The factorized model itself (not snapped to `±√Ω²`).
    pub fn omega_model(&self, k: Complex64) -> Complex64 {
        self.model.model(k)
    }

    /// `G(k) = 2k⁴ + α²k² − (α Im c + α⁴/4 − ω/2)`, so that `H = Ω − G`.
    pub fn g_polynomial(&self, k: Complex64) -> Complex64 {
        let a = self.triple.alpha;
        let k2 = k * k;
        k2 * k2 * 2.0 + k2 * (a * a) - (a * self.triple.c.im + a.powi(4) / 4.0 - self.triple.omega / 2.0)
    }

    pub fn eval_h(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.eval_omega(k)? - self.g_polynomial(k))
    }

    /// `D(k) = (c̄ + 2iαk²)(c − 2iαk²)`; the identity `(2Ω − H)H = −k²D` holds.
    pub fn d_polynomial(&self, k: Complex64) -> Complex64 {
        let (num_a, num_b) = self.e_numerators(k);
        num_a * num_b
    }

    /// `(c̄ + 2iαk², c − 2iαk²)`.
    fn e_numerators(&self, k: Complex64) -> (Complex64, Complex64) {
        let c = self.triple.c;
        let t = Complex64::new(0.0, 2.0 * self.triple.alpha) * k * k;
        (c.conj() + t, c - t)
    }

    /// `E(k) = √((2Ω − H)/(2Ω)) · [[1, E₁₂], [E₂₁, 1]]`.
    pub fn eval_e(&self, k: Complex64) -> Result<Matrix2> {
        let omega = self.eval_omega(k)?;
        self.e_from_omega(k, omega)
    }

    pub(crate) fn e_from_omega(&self, k: Complex64, omega: Complex64) -> Result<Matrix2> {
        let g_poly = self.g_polynomial(k);
        let h = omega - g_poly;
        let two_minus_h = omega + g_poly;
        let scale = 1.0 + k.norm().powi(4) + self.triple.scale().powf(2.0 / 3.0);
        if omega.norm() <= 1e-14 * scale {
            return Err(Error::Pole { k });
        }
        let g = two_minus_h / (omega * 2.0);
        if g.re < 0.0 && g.im.abs() <= 1e-12 * g.norm() {
            return Err(Error::OnCut { k });
        }
        let sqrt_g = g.sqrt();
        let (num_a, num_b) = self.e_numerators(k);
        // Two algebraically equal forms of each off-diagonal entry; use the
        // better-conditioned denominator.
        let den_direct_12 = k * num_a;
        let den_direct_21 = k * num_b;
        let tiny = 1e-13 * scale;
        let e12 = if den_direct_12.norm() >= two_minus_h.norm() {
            if den_direct_12.norm() <= tiny {
                return Err(Error::Pole { k });
            }
            -h / den_direct_12
        } else {
            if two_minus_h.norm() <= tiny {
                return Err(Error::Pole { k });
            }
            k * num_b / two_minus_h
        };
        let e21 = if den_direct_21.norm() >= two_minus_h.norm() {
            if den_direct_21.norm() <= tiny {
                return Err(Error::Pole { k });
            }
            -h / den_direct_21
        } else {
            if two_minus_h.norm() <= tiny {
                return Err(Error::Pole { k });
            }
            k * num_a / two_minus_h
        };
        let one = Complex64::new(1.0, 0.0);
        Ok(Matrix2::new(one, e12, e21, one).scale(sqrt_g))
    }

    /// `φᵇ(t,k) = e^{iωtσ₃/2} E(k) e^{−iΩtσ₃}`.
    pub fn eval_background_phi(&self, t: f64, k: Complex64) -> Result<Matrix2> {
        let omega = self.eval_omega(k)?;
        let e = self.e_from_omega(k, omega)?;
        let left = Matrix2::exp_sigma3(Complex64::new(0.0, self.triple.omega * t / 2.0));
        let right = Matrix2::exp_sigma3(Complex64::new(0.0, -t) * omega);
        Ok(left * e * right)
    }

    /// Zeros of `2Ω − H` and zeros of Ω that are poles of `(2Ω − H)/(2Ω)`.
    fn secondary_points(&self) -> Vec<Complex64> {
        let a = self.triple.alpha;
        let c = self.triple.c;
        let i = Complex64::new(0.0, 1.0);
        let mut candidates = vec![Complex64::new(0.0, 0.0)];
        for m in [i * c.conj() / (2.0 * a), -i * c / (2.0 * a)] {
            let r = m.sqrt();
            candidates.push(r);
            candidates.push(-r);
        }
        let mut out: Vec<Complex64> = candidates
            .into_iter()
            .filter(|&k| {
                let omega = self.omega_unchecked(k);
                let g = self.g_polynomial(k);
                (omega + g).norm() <= 1e-8 * (1.0 + omega.norm() + g.norm())
            })
            .collect();
        // At a zero of Ω, 2Ω − H = G; the point is a pole unless G vanishes too.
        for &(r, _) in &self.roots {
            if self.g_polynomial(r).norm() > 1e-8 * (1.0 + r.norm().powi(4)) {
                out.push(r);
            }
        }
        out.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
        out
    }

    /// Ω by continuation of `√Ω²` from the anchor `R e^{iπ/16}`, flipping sign
    /// at each cut crossing. Independent of the factorized model.
    pub fn eval_omega_by_continuation(&self, k: Complex64, path: ContinuationPath) -> Result<Complex64> {
        if self.cuts.distance(k) <= self.eps_cut {
            return Err(Error::OnCut { k });
        }
        let r_anchor = self.anchor_radius;
        let theta0 = PI / 16.0;
        let theta1 = k.arg();
        let mut dtheta = theta1 - theta0;
        if dtheta > PI {
            dtheta -= 2.0 * PI;
        } else if dtheta < -PI {
            dtheta += 2.0 * PI;
        }
        let anchor = Complex64::from_polar(r_anchor, theta0);
        let start = {
            let root = self.invariants.omega_squared(anchor).sqrt();
            let asym = anchor.powu(4) * 2.0 + self.triple.omega / 2.0;
            if (root - asym).norm() <= (root + asym).norm() {
                root
            } else {
                -root
            }
        };
        let r_target = k.norm();
        let waypoints: Vec<Box<dyn Fn(f64) -> Complex64>> = match path {
            ContinuationPath::ArcThenRadial => vec![
                Box::new(move |s| Complex64::from_polar(r_anchor, theta0 + dtheta * s)),
                Box::new(move |s| Complex64::from_polar(r_anchor + (r_target - r_anchor) * s, theta1)),
            ],
            ContinuationPath::RadialThenArc => vec![
                Box::new(move |s| Complex64::from_polar(r_anchor + (r_target - r_anchor) * s, theta0)),
                Box::new(move |s| Complex64::from_polar(r_target, theta0 + dtheta * s)),
            ],
        };
        let mut w = start;
        let mut z = anchor;
        for leg in waypoints {
            let leg_len: f64 = (0..64).map(|j| (leg((j + 1) as f64 / 64.0) - leg(j as f64 / 64.0)).norm()).sum();
            let mut s = 0.0;
            while s < 1.0 {
                let d_root = self.roots.iter().map(|r| (z - r.0).norm()).fold(f64::INFINITY, f64::min);
                if d_root <= 1e-10 * r_anchor {
                    return Err(Error::Path { k, reason: format!("path passes through a zero at {z}") });
                }
                let max_ds = (0.05 * d_root).min(0.01 * r_anchor) / leg_len.max(1e-300);
                let ds = max_ds.min(1.0 - s).max(1e-12);
                let s_next = (s + ds).min(1.0);
                let z_next = leg(s_next);
                let crossings = self.count_cut_crossings(z, z_next);
                if crossings % 2 == 1 {
                    w = -w;
                }
                let root = self.invariants.omega_squared(z_next).sqrt();
                w = if (root - w).norm() <= (root + w).norm() { root } else { -root };
                z = z_next;
                s = s_next;
            }
        }
        Ok(w)
    }

    fn count_cut_crossings(&self, a: Complex64, b: Complex64) -> usize {
        self.cuts
            .cuts
            .iter()
            .flat_map(|cut| cut.segments())
            .filter(|&(p, q)| segments_cross(a, b, p, q))
            .count()
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    ((b - a).conj() * (c - a)).im
}

/// Proper crossing of segments `[a, b]` and `[p, q)`.
fn segments_cross(a: Complex64, b: Complex64, p: Complex64, q: Complex64) -> bool {
    let d1 = orient(p, q, a);
    let d2 = orient(p, q, b);
    let d3 = orient(a, b, p);
    let d4 = orient(a, b, q);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(alpha: f64, omega: f64, re: f64, im: f64) -> OmegaEvaluator {
        OmegaEvaluator::new(ParameterTriple::new(alpha, omega, Complex64::new(re, im)).unwrap()).unwrap()
    }

    #[test]
    fn chord_layout_changes_only_the_sheet() {
        let t = ParameterTriple::new(1.0, 3.99, Complex64::new(2.0, -0.3)).unwrap();
        let standard = OmegaEvaluator::new(t).unwrap();
        let chords = OmegaEvaluator::with_layout(t, DEFAULT_TOL, CutLayout::Chords).unwrap();
        for k in [Complex64::new(0.3, 0.1), Complex64::new(0.9, 0.2), Complex64::new(3.0, 1.0)] {
            let (a, b) = (standard.eval_omega(k).unwrap(), chords.eval_omega(k).unwrap());
            assert!((a * a - b * b).norm() < 1e-10 * (1.0 + a.norm_sqr()), "{k}");
        }
        let far = Complex64::new(3.0, 1.0);
        let (a, b) = (standard.eval_omega(far).unwrap(), chords.eval_omega(far).unwrap());
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn soliton_omega_is_polynomial() {
        let e = ev(2.0, 1.0, 0.0, -2.0);
        assert!(e.cuts.cuts.is_empty());
        assert_eq!(e.eval_omega(Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(2.5, 0.0));
        let k = Complex64::new(0.3, -0.8);
        let expect = k.powu(4) * 2.0 + 0.5;
        assert!((e.eval_omega(k).unwrap() - expect).norm() < 1e-13);
    }

    #[test]
    fn soliton_h_and_complement() {
        let e = ev(2.0, 1.0, 0.0, -2.0);
        let k = Complex64::new(0.7, 0.2);
        let h = e.eval_h(k).unwrap();
        assert!((h + k * k * 4.0).norm() < 1e-13);
        let omega = e.eval_omega(k).unwrap();
        let lhs = omega * 2.0 - h;
        let rhs = (k * k * 2.0 + 1.0).powu(2);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn plane_wave_h_identity_at_two() {
        let e = ev(1.0, -1.5, 0.0, -1.0);
        let k = Complex64::new(2.0, 0.0);
        let h = e.eval_h(k).unwrap();
        let omega = e.eval_omega(k).unwrap();
        let lhs = (omega * 2.0 - h) * h;
        let c = Complex64::new(0.0, -1.0);
        let i = Complex64::new(0.0, 1.0);
        let rhs = -k * k * (k * k * 2.0 - i * c.conj()) * (k * k * 2.0 + i * c);
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn e_at_zero_and_unit_determinant() {
        let e = ev(2.0, 1.0, 0.0, -2.0);
        let m = e.eval_e(Complex64::new(1.0, 0.5)).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-10);
        let m0 = e.eval_e(Complex64::new(0.0, 0.0)).unwrap();
        assert!((m0.det() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn e_tends_to_identity() {
        // Diagonal entries approach 1 like k⁻²; the off-diagonal ones decay
        // like α/(2k) because H ~ −α²k².
        let e = ev(1.0, -1.5, 0.0, -1.0);
        for r in [50.0, 100.0, 400.0] {
            let k = Complex64::from_polar(r, 0.3);
            let m = e.eval_e(k).unwrap();
            assert!((m.m[0][0] - 1.0).norm() * r * r < 2.0);
            assert!((m.m[0][1].norm() * r - 0.5).abs() < 1e-2);
            assert!((m.m[1][0].norm() * r - 0.5).abs() < 1e-2);
        }
    }

    #[test]
    fn background_phi_at_time_zero_is_e() {
        let e = ev(1.0, 3.99, 2.0, -0.3);
        let k = Complex64::new(0.4, 1.3);
        let phi = e.eval_background_phi(0.0, k).unwrap();
        assert_eq!(phi, e.eval_e(k).unwrap());
    }

    #[test]
    fn continuation_agrees_with_model() {
        for e in [ev(1.0, 3.99, 2.0, -0.3), ev(1.0, 1.5, 1.0, 0.0), ev(1.0, -1.5, 0.0, -1.0)] {
            for k in [
                Complex64::new(0.9, 0.35),
                Complex64::new(-0.2, 1.1),
                Complex64::new(0.05, -0.6),
                Complex64::new(-1.7, -0.4),
            ] {
                let direct = e.eval_omega(k).unwrap();
                for path in [ContinuationPath::ArcThenRadial, ContinuationPath::RadialThenArc] {
                    let cont = e.eval_omega_by_continuation(k, path).unwrap();
                    assert!((cont - direct).norm() <= 1e-9 * (1.0 + direct.norm()), "{k}: {cont} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn outside_scope_has_no_cuts() {
        let t = ParameterTriple::new(1.0, 0.0, Complex64::new(0.0, 0.0)).unwrap();
        assert!(matches!(OmegaEvaluator::new(t), Err(Error::UnsupportedCase(_))));
    }

    #[test]
    fn segment_crossing_predicate() {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        assert!(segments_cross(c(0.0, -1.0), c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)));
        assert!(!segments_cross(c(0.0, 0.5), c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)));
    }
}
