//! Finite-difference checks of given profiles: the GI residual, the Lax pair
//! zero-curvature residual, and the background t-part residual.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::SolutionProfile;
use crate::error::{Error, Result};
use crate::matrix::Matrix2;
use crate::omega::OmegaEvaluator;

/// Samples per axis of the default residual grid.
pub const DEFAULT_GRID: usize = 50;
pub const DEFAULT_STEP: f64 = 1e-3;
const ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: (f64, f64),
    pub t: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub grid: GridSpec,
    pub step: f64,
    pub order: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub region: Rect,
    pub nx: usize,
    pub nt: usize,
}

/// Fourth-order central first derivative from samples at `−2h, −h, h, 2h`.
fn d1<T>(m2: T, m1: T, p1: T, p2: T, h: f64) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    (m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * h))
}

/// Fourth-order central second derivative.
fn d2(m2: Complex64, m1: Complex64, c: Complex64, p1: Complex64, p2: Complex64, h: f64) -> Complex64 {
    (-(m2 + p2) + (m1 + p1) * 16.0 - c * 30.0) / (12.0 * h * h)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `|iq_t + q_xx + iq²q̄_x + ½|q|⁴q|` at one point, all derivatives differenced.
pub fn gi_residual_at(q: &SolutionProfile, x: f64, t: f64, h: f64) -> f64 {
    let at = |dx: f64, dt: f64| q.evaluate(x + dx, t + dt);
    let c = at(0.0, 0.0);
    let (xm2, xm1, xp1, xp2) = (at(-2.0 * h, 0.0), at(-h, 0.0), at(h, 0.0), at(2.0 * h, 0.0));
    let qt = d1(at(0.0, -2.0 * h), at(0.0, -h), at(0.0, h), at(0.0, 2.0 * h), h);
    let qxx = d2(xm2, xm1, c, xp1, xp2, h);
    let qbar_x = d1(xm2.conj(), xm1.conj(), xp1.conj(), xp2.conj(), h);
    let i = Complex64::new(0.0, 1.0);
    (i * qt + qxx + i * c * c * qbar_x + c * (0.5 * c.norm_sqr().powi(2))).norm()
}

/// GI residual over a `DEFAULT_GRID²` sample grid of `region`.
pub fn gi_residual(q: &SolutionProfile, region: Rect, h: f64) -> Result<ResidualReport> {
    gi_residual_grid(q, region, h, DEFAULT_GRID)
}

pub fn gi_residual_grid(q: &SolutionProfile, region: Rect, h: f64, n: usize) -> Result<ResidualReport> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if region.x.0 < 2.0 * h {
        return Err(Error::Domain(format!("region starts at x = {} but the stencil needs x ≥ 2h = {}", region.x.0, 2.0 * h)));
    }
    if n == 0 {
        return Err(Error::Domain("grid needs at least one sample per axis".into()));
    }
    let xs = linspace(region.x.0, region.x.1, n);
    let ts = linspace(region.t.0, region.t.1, n);
    let values: Vec<f64> = ts
        .par_iter()
        .flat_map_iter(|&t| xs.iter().map(move |&x| gi_residual_at(q, x, t, h)))
        .collect();
    let max_abs = values.iter().copied().fold(0.0, f64::max);
    let mean_abs = values.iter().sum::<f64>() / values.len() as f64;
    Ok(ResidualReport { max_abs, mean_abs, grid: GridSpec { region, nx: n, nt: n }, step: h, order: ORDER })
}

/// Ratios `max_abs(h_j) / max_abs(h_j / 2)` over `halvings` successive
/// halvings starting at `h0`. Fourth-order stencils give about 16.
pub fn convergence_factors(q: &SolutionProfile, region: Rect, h0: f64, halvings: usize) -> Result<Vec<f64>> {
    let mut h = h0;
    let mut prev = gi_residual(q, region, h)?.max_abs;
    let mut out = Vec::with_capacity(halvings);
    for _ in 0..halvings {
        h /= 2.0;
        let cur = gi_residual(q, region, h)?.max_abs;
        out.push(prev / cur);
        prev = cur;
    }
    Ok(out)
}

/// `Q = [[0, q], [q̄, 0]]`.
fn q_matrix(q: Complex64) -> Matrix2 {
    let z = Complex64::new(0.0, 0.0);
    Matrix2::new(z, q, q.conj(), z)
}

/// `U = −(i/2)|q|²σ₃ + kQ`.
pub fn lax_u(q: Complex64, k: Complex64) -> Matrix2 {
    Matrix2::sigma3().scale(Complex64::new(0.0, -0.5 * q.norm_sqr())) + q_matrix(q).scale(k)
}

/// `V = −ik²|q|²σ₃ + 2k³Q − ikQ_xσ₃ + ½(q_x q̄ − q q̄_x)σ₃ + (i/4)|q|⁴σ₃`.
pub fn lax_v(q: Complex64, qx: Complex64, k: Complex64) -> Matrix2 {
    let i = Complex64::new(0.0, 1.0);
    let k2 = k * k;
    let m = q.norm_sqr();
    let diag = -i * k2 * m + (qx * q.conj() - q * qx.conj()) * 0.5 + i * (0.25 * m * m);
    Matrix2::sigma3().scale(diag) + q_matrix(q).scale(k2 * k * 2.0) - (q_matrix(qx) * Matrix2::sigma3()).scale(i * k)
}

/// x-part coefficient `−ik²σ₃ + U`.
pub fn x_coefficient(q: Complex64, k: Complex64) -> Matrix2 {
    Matrix2::sigma3().scale(Complex64::new(0.0, -1.0) * k * k) + lax_u(q, k)
}

/// t-part coefficient `−2ik⁴σ₃ + V`.
pub fn t_coefficient(q: Complex64, qx: Complex64, k: Complex64) -> Matrix2 {
    Matrix2::sigma3().scale(Complex64::new(0.0, -2.0) * k.powi(4)) + lax_v(q, qx, k)
}

/// Max-entry norm of `A_t − B_x + [A, B]`, with `A_t` and `B_x` differenced.
pub fn zero_curvature_residual(q: &SolutionProfile, x: f64, t: f64, k: Complex64, h: f64) -> f64 {
    let a = |t: f64| x_coefficient(q.evaluate(x, t), k);
    let b = |x: f64| {
        let (v, vx) = q.value_and_derivative(x, t);
        t_coefficient(v, vx, k)
    };
    let a_t = d1(a(t - 2.0 * h), a(t - h), a(t + h), a(t + 2.0 * h), h);
    let b_x = d1(b(x - 2.0 * h), b(x - h), b(x + h), b(x + 2.0 * h), h);
    (a_t - b_x + a(t).commutator(&b(x))).max_abs()
}

/// Max-entry norm of `φᵇ_t + 2ik⁴σ₃φᵇ − Vᵇφᵇ`, with `φᵇ_t` differenced.
pub fn background_tpart_residual(ev: &OmegaEvaluator, t: f64, k: Complex64, h: f64) -> Result<f64> {
    let p = &ev.triple;
    let phase = Complex64::from_polar(1.0, p.omega * t);
    let v = lax_v(phase * p.alpha, phase * p.c, k);
    let phi = |t: f64| ev.eval_background_phi(t, k);
    let phi_t = d1(phi(t - 2.0 * h)?, phi(t - h)?, phi(t + h)?, phi(t + 2.0 * h)?, h);
    let phi0 = phi(t)?;
    let rot = Matrix2::sigma3().scale(Complex64::new(0.0, 2.0) * k.powi(4));
    Ok((phi_t + rot * phi0 - v * phi0).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{gi_soliton, plane_wave};
    use crate::params::ParameterTriple;

    fn region() -> Rect {
        Rect { x: (0.1, 5.0), t: (0.0, 5.0) }
    }

    #[test]
    fn soliton_residual_is_small() {
        let r = gi_residual(&gi_soliton(1.0).unwrap(), region(), 1e-3).unwrap();
        assert!(r.max_abs < 1e-6, "{r:?}");
        assert!(r.max_abs >= r.mean_abs && r.mean_abs >= 0.0);
        assert_eq!((r.grid.nx, r.grid.nt, r.order), (50, 50, 4));
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = gi_residual(&gi_soliton(1.0).unwrap(), region(), 1e-3).unwrap();
        let back: ResidualReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn plane_wave_residual_is_small() {
        let r = gi_residual(&plane_wave(1.0, -1.0).unwrap(), region(), 1e-3).unwrap();
        assert!(r.max_abs < 1e-8, "{r:?}");
    }

    #[test]
    fn zero_profile_has_zero_residuals() {
        let zero = gi_soliton(1.0).unwrap().scaled(Complex64::new(0.0, 0.0));
        assert_eq!(gi_residual(&zero, region(), 1e-3).unwrap().max_abs, 0.0);
        assert_eq!(zero_curvature_residual(&zero, 1.0, 0.5, Complex64::new(1.3, -0.2), 1e-3), 0.0);
    }

    #[test]
    fn stencil_must_clear_the_boundary() {
        let q = gi_soliton(1.0).unwrap();
        assert!(gi_residual(&q, Rect { x: (0.001, 1.0), t: (0.0, 1.0) }, 1e-3).is_err());
    }

    #[test]
    fn fourth_order_convergence() {
        let f = convergence_factors(&gi_soliton(1.0).unwrap(), region(), 0.04, 3).unwrap();
        assert!(f.iter().all(|r| (12.0..=20.0).contains(r)), "{f:?}");
    }

    #[test]
    fn zero_curvature_detects_non_solutions() {
        let q = gi_soliton(1.0).unwrap();
        let k = Complex64::new(1.0, 0.5);
        let exact = zero_curvature_residual(&q, 1.0, 0.5, k, 1e-3);
        let bad = zero_curvature_residual(&q.scaled(Complex64::new(1.1, 0.0)), 1.0, 0.5, k, 1e-3);
        assert!(exact < 1e-5, "{exact}");
        assert!(bad > 1e-2 && bad > 1e3 * exact, "{bad} vs {exact}");
    }

    #[test]
    fn background_is_an_exact_t_solution() {
        let ev = OmegaEvaluator::new(ParameterTriple::new(2.0, 1.0, Complex64::new(0.0, -2.0)).unwrap()).unwrap();
        assert!(background_tpart_residual(&ev, 0.7, Complex64::new(1.0, 0.3), 1e-4).unwrap() < 1e-6);
        let ev = OmegaEvaluator::new(ParameterTriple::new(1.0, -1.5, Complex64::new(0.0, -1.0)).unwrap()).unwrap();
        assert!(background_tpart_residual(&ev, 1.3, Complex64::new(0.5, 0.5), 1e-4).unwrap() < 1e-6);
    }
}
