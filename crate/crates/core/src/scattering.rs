//! Spectral functions: `s(k)` from the x-part integrated in from `x_max`,
//! `S(k) = E(k)` for boundary values equal to the background, and the
//! global relation `A b − a B = 0` on the closure of D1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closed_forms::SolutionProfile;
use crate::error::{Error, Result};
use crate::matrix::Matrix2;
use crate::ode::{dopri5, StepControl};
use crate::omega::OmegaEvaluator;
use crate::region::RegionMap;
use crate::verify::lax_u;

/// `x_max` in decay lengths of the profile.
pub const DECAY_LENGTHS: f64 = 40.0;
/// The full matrix is integrated only while `|Im k²|·x_max` stays below this.
pub const GROWTH_GUARD: f64 = 30.0;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScatteringConfig {
    /// Start of the integration; `None` uses 40 decay lengths.
    pub x_max: Option<f64>,
    pub step: StepControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub k: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    #[serde(rename = "A")]
    pub big_a: Complex64,
    #[serde(rename = "B")]
    pub big_b: Complex64,
    /// Full `s(k)`, present when both columns are valid at `k`.
    pub s: Option<Matrix2>,
    #[serde(rename = "S")]
    pub big_s: Matrix2,
    pub residual_global: f64,
}

fn start_point(q0: &SolutionProfile, cfg: &ScatteringConfig) -> Result<f64> {
    let x_max = match cfg.x_max {
        Some(x) => x,
        None => DECAY_LENGTHS * q0.decay_length(),
    };
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(Error::Domain("profile does not decay; no finite x_max".into()));
    }
    let tail = q0.evaluate(x_max, 0.0).norm();
    if tail >= 1e-12 {
        return Err(Error::Domain(format!("|q(x_max)| = {tail:e} at x_max = {x_max}; need < 1e-12")));
    }
    Ok(x_max)
}

/// Column `j` of `μ₃(0, 0, k)`: `μ_x = −ik²[σ₃, μ] + Uμ` integrated from
/// `μ = I` at `x_max` down to 0. Column 0 is valid for `Im k² ≤ 0`,
/// column 1 for `Im k² ≥ 0`.
pub fn compute_s_column(q0: &SolutionProfile, k: Complex64, column: usize, cfg: &ScatteringConfig) -> Result<[Complex64; 2]> {
    assert!(column < 2, "a 2×2 matrix has two columns");
    let x_max = start_point(q0, cfg)?;
    let k2 = k * k;
    let valid = if column == 0 { k2.im <= 0.0 } else { k2.im >= 0.0 };
    if !valid && k2.im.abs() * x_max >= GROWTH_GUARD {
        return Err(Error::Validity(format!("column {column} grows like e^{{2|Im k²|x}} at k = {k}")));
    }
    // Only the off-diagonal entry of the column carries the e^{∓2ik²x} factor.
    let off = if column == 0 { 1 } else { 0 };
    let sign = if column == 0 { -1.0 } else { 1.0 };
    let rate = Complex64::new(0.0, -2.0 * sign) * k2;
    let mut y0 = [Complex64::new(0.0, 0.0); 2];
    y0[column] = Complex64::new(1.0, 0.0);
    let rhs = |x: f64, y: &[Complex64; 2]| {
        let u = lax_u(q0.evaluate(x, 0.0), k);
        let mut out = [u.m[0][0] * y[0] + u.m[0][1] * y[1], u.m[1][0] * y[0] + u.m[1][1] * y[1]];
        out[off] += rate * y[off];
        out
    };
    dopri5(rhs, x_max, y0, 0.0, &cfg.step)
}

/// `s(k) = μ₃(0, 0, k)` with both columns; needs `|Im k²|·x_max` below the
/// growth guard.
pub fn compute_s(q0: &SolutionProfile, k: Complex64, cfg: &ScatteringConfig) -> Result<Matrix2> {
    let c0 = compute_s_column(q0, k, 0, cfg)?;
    let c1 = compute_s_column(q0, k, 1, cfg)?;
    Ok(Matrix2::from_cols(c0, c1))
}

/// `S(k) = μ₁(0, 0, k) = E(k)`, valid when the boundary values of `q`
/// equal `αe^{iωt}` and `ce^{iωt}` exactly.
pub fn compute_s_boundary(ev: &OmegaEvaluator, q: &SolutionProfile, k: Complex64) -> Result<Matrix2> {
    let p = &ev.triple;
    let deviation = (0..=100)
        .map(|j| {
            let t = 0.1 * j as f64;
            let e = Complex64::from_polar(1.0, p.omega * t);
            let (v, vx) = q.value_and_derivative(0.0, t);
            (v - e * p.alpha).norm().max((vx - e * p.c).norm())
        })
        .fold(0.0, f64::max);
    if !(deviation <= 1e-10 * p.alpha.max(p.c.norm()).max(1.0)) {
        return Err(Error::NotExactBackground { deviation });
    }
    ev.eval_e(k)
}

/// `|A(k)b(k) − a(k)B(k)|` for `k` in the closure of an unbounded D1
/// component of `region`.
pub fn global_relation_residual(
    ev: &OmegaEvaluator,
    q0: &SolutionProfile,
    region: &RegionMap,
    k: Complex64,
    cfg: &ScatteringConfig,
) -> Result<ScatteringData> {
    if !region.in_unbounded_d1_closure(k) {
        return Err(Error::Region { k });
    }
    let big_s = compute_s_boundary(ev, q0, k)?;
    let [b, a] = compute_s_column(q0, k, 1, cfg)?;
    let s = match compute_s_column(q0, k, 0, cfg) {
        Ok(c0) => Some(Matrix2::from_cols(c0, [b, a])),
        Err(Error::Validity(_)) => None,
        Err(e) => return Err(e),
    };
    let (big_a, big_b) = (big_s.m[1][1], big_s.m[0][1]);
    Ok(ScatteringData { k, a, b, big_a, big_b, s, big_s, residual_global: (big_a * b - a * big_b).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::gi_soliton;
    use crate::params::soliton_parameters;
    use crate::region::build_region_map;

    fn unit() -> (OmegaEvaluator, SolutionProfile) {
        (OmegaEvaluator::new(soliton_parameters(1.0).unwrap()).unwrap(), gi_soliton(1.0).unwrap())
    }

    #[test]
    fn zero_potential_gives_identity() {
        let zero = gi_soliton(1.0).unwrap().scaled(Complex64::new(0.0, 0.0));
        for k in [Complex64::new(0.7, 0.0), Complex64::new(0.3, 0.2)] {
            let s = compute_s(&zero, k, &ScatteringConfig::default()).unwrap();
            assert!((s - Matrix2::identity()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_is_one_on_the_real_axis() {
        let (_, q) = unit();
        let s = compute_s(&q, Complex64::new(0.8, 0.0), &ScatteringConfig::default()).unwrap();
        assert!((s.det() - 1.0).norm() < 1e-8, "{}", s.det());
    }

    #[test]
    fn symmetry_at_conjugate_points() {
        let (_, q) = unit();
        let cfg = ScatteringConfig::default();
        let k = Complex64::new(0.6, 0.1);
        let s = compute_s(&q, k, &cfg).unwrap();
        let t = compute_s(&q, k.conj(), &cfg).unwrap();
        assert!((s - t.conj().sigma1_conjugate()).max_abs() < 1e-8);
    }

    #[test]
    fn d1_coefficient_is_finite_and_nonzero() {
        let (_, q) = unit();
        let [_, a] = compute_s_column(&q, Complex64::new(0.5, 0.5), 1, &ScatteringConfig::default()).unwrap();
        assert!(a.is_finite() && a.norm() > 1e-3);
    }

    #[test]
    fn refinement_is_stable() {
        let (_, q) = unit();
        let base = ScatteringConfig::default();
        let longer = ScatteringConfig { x_max: Some(80.0), ..base };
        let tighter = ScatteringConfig { step: StepControl { rtol: 5e-12, atol: 5e-14, ..base.step }, ..base };
        for k in [Complex64::new(0.4, 0.3), Complex64::new(2.0, 1.5), Complex64::new(-2.9, -0.1)] {
            let r = compute_s_column(&q, k, 1, &base).unwrap();
            for cfg in [&longer, &tighter] {
                let s = compute_s_column(&q, k, 1, cfg).unwrap();
                assert!((s[0] - r[0]).norm() < 1e-7 && (s[1] - r[1]).norm() < 1e-7, "{k}");
            }
        }
    }

    #[test]
    fn invalid_column_is_refused() {
        let (_, q) = unit();
        let r = compute_s_column(&q, Complex64::new(1.5, 1.5), 0, &ScatteringConfig::default());
        assert!(matches!(r, Err(Error::Validity(_))));
    }

    #[test]
    fn boundary_matrix_requires_the_exact_background() {
        let (ev, q) = unit();
        let k = Complex64::new(0.9, 0.4);
        let s = compute_s_boundary(&ev, &q, k).unwrap();
        assert!((s.det() - 1.0).norm() < 1e-12);
        let r = compute_s_boundary(&ev, &q.scaled(Complex64::new(1.1, 0.0)), k);
        assert!(matches!(r, Err(Error::NotExactBackground { .. })));
    }

    #[test]
    fn global_relation_holds_for_the_soliton() {
        let (ev, q) = unit();
        let map = build_region_map(&ev, 6.0, 256).unwrap();
        let cfg = ScatteringConfig::default();
        let d = global_relation_residual(&ev, &q, &map, Complex64::new(0.5, 0.4), &cfg).unwrap();
        assert!(d.residual_global < 1e-6, "{d:?}");
        // Same boundary matrix, spectral data of a non-solution.
        let [b, a] = compute_s_column(&q.scaled(Complex64::new(1.1, 0.0)), d.k, 1, &cfg).unwrap();
        assert!((d.big_a * b - a * d.big_b).norm() > 1e3 * d.residual_global);
        let d = global_relation_residual(&ev, &q, &map, Complex64::new(1.2, 0.0), &cfg).unwrap();
        assert!(d.residual_global < 1e-5, "{d:?}");
        assert!(d.s.is_some());
        assert!(matches!(
            global_relation_residual(&ev, &q, &map, Complex64::new(0.2, 1.0), &cfg),
            Err(Error::Region { .. })
        ));
    }
}
