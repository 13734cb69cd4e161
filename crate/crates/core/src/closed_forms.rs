//! Explicit solutions: the GI soliton, the DNLS soliton family, the plane
//! wave, and gauge images between the two equations.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileKind {
    GiSoliton,
    DnlsSoliton,
    PlaneWave,
    GaugeImage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GaugeDirection {
    /// `q = u·exp(+i∫_x^∞ |u|²)`.
    DnlsToGi,
    /// `u = q·exp(−i∫_x^∞ |q|²)`.
    GiToDnls,
}

impl GaugeDirection {
    fn sign(self) -> f64 {
        match self {
            GaugeDirection::DnlsToGi => 1.0,
            GaugeDirection::GiToDnls => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    GiSoliton { omega: f64 },
    DnlsSoliton { omega: f64, d: f64 },
    PlaneWave { alpha: f64, b: f64, omega: f64 },
    Gauge { inner: Box<SolutionProfile>, t: f64, sign: f64 },
    Scaled { inner: Box<SolutionProfile>, factor: Complex64 },
}

/// A function `q(x, t)` together with its exact x-derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    shape: Shape,
}

/// Panels of the phase integral stop this many decay lengths past `x`; the
/// rest comes from an exponential tail fit.
const TAIL_LENGTHS: f64 = 40.0;
const QUAD_TOL: f64 = 1e-14;

/// GI soliton `φ_ω(x)·e^{−i arctan(tanh √ω x)}·e^{iωt}`.
pub fn gi_soliton(omega: f64) -> Result<SolutionProfile> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("soliton frequency must be positive, got {omega}")));
    }
    Ok(SolutionProfile { shape: Shape::GiSoliton { omega } })
}

/// DNLS soliton `u_{ω,d}`; requires `ω > d²/4`.
pub fn dnls_soliton(omega: f64, d: f64) -> Result<SolutionProfile> {
    if !(omega.is_finite() && d.is_finite() && omega > d * d / 4.0) {
        return Err(Error::Domain(format!("DNLS soliton needs ω > d²/4, got ω = {omega}, d = {d}")));
    }
    Ok(SolutionProfile { shape: Shape::DnlsSoliton { omega, d } })
}

/// Plane wave `α e^{iωt + ibx}` with `ω = α⁴/2 − b² + α²b`.
pub fn plane_wave(alpha: f64, b: f64) -> Result<SolutionProfile> {
    if !(alpha > 0.0 && alpha.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("plane wave needs α > 0 and finite b, got α = {alpha}, b = {b}")));
    }
    let omega = alpha.powi(4) / 2.0 - b * b + alpha * alpha * b;
    Ok(SolutionProfile { shape: Shape::PlaneWave { alpha, b, omega } })
}

/// Gauge image of `u(·, t)`. The result no longer depends on its time
/// argument. Fails with `Tail` when `|u|²` does not decay exponentially.
pub fn gauge_transform(u: &SolutionProfile, t: f64, direction: GaugeDirection) -> Result<SolutionProfile> {
    let profile = SolutionProfile {
        shape: Shape::Gauge { inner: Box::new(u.clone()), t, sign: direction.sign() },
    };
    // The tail fit at the origin checks decay once for the whole profile.
    modulus_squared_integral(u, 0.0, t)?;
    Ok(profile)
}

impl SolutionProfile {
    pub fn kind(&self) -> ProfileKind {
        match &self.shape {
            Shape::GiSoliton { .. } => ProfileKind::GiSoliton,
            Shape::DnlsSoliton { .. } => ProfileKind::DnlsSoliton,
            Shape::PlaneWave { .. } => ProfileKind::PlaneWave,
            Shape::Gauge { .. } => ProfileKind::GaugeImage,
            Shape::Scaled { inner, .. } => inner.kind(),
        }
    }

    /// The profile multiplied by a constant. A non-unimodular factor gives
    /// a non-solution, which the verifiers use as a negative control.
    pub fn scaled(&self, factor: Complex64) -> SolutionProfile {
        SolutionProfile { shape: Shape::Scaled { inner: Box::new(self.clone()), factor } }
    }

    /// Whether the profile decays in x (the plane wave does not).
    pub fn is_schwartz(&self) -> bool {
        match &self.shape {
            Shape::PlaneWave { .. } => false,
            Shape::Scaled { inner, factor } => *factor == Complex64::new(0.0, 0.0) || inner.is_schwartz(),
            _ => true,
        }
    }

    /// Distance over which `|q|` falls by a factor e.
    pub fn decay_length(&self) -> f64 {
        match &self.shape {
            Shape::GiSoliton { omega } => 1.0 / omega.sqrt(),
            Shape::DnlsSoliton { omega, d } => 2.0 / (4.0 * omega - d * d).sqrt(),
            Shape::PlaneWave { .. } => f64::INFINITY,
            Shape::Gauge { inner, .. } | Shape::Scaled { inner, .. } => inner.decay_length(),
        }
    }

    /// Temporal frequency of the boundary values, when they are periodic.
    pub fn frequency(&self) -> Option<f64> {
        match &self.shape {
            Shape::GiSoliton { omega } | Shape::PlaneWave { omega, .. } => Some(*omega),
            Shape::Scaled { inner, .. } => inner.frequency(),
            Shape::DnlsSoliton { d, omega } if *d == 0.0 => Some(*omega),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Complex64 {
        self.value_and_derivative(x, t).0
    }

    pub fn evaluate_x(&self, x: f64, t: f64) -> Complex64 {
        self.value_and_derivative(x, t).1
    }

    /// `(q, q_x)` at `(x, t)`.
    pub fn value_and_derivative(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        match &self.shape {
            Shape::GiSoliton { omega } => {
                let s = omega.sqrt();
                let ch = (2.0 * s * x).cosh();
                let phi = 2.0 * omega.powf(0.25) / ch.sqrt();
                let dphi = -phi * s * (2.0 * s * x).tanh();
                let theta = (s * x).tanh().atan();
                let dtheta = s / ch;
                let e = Complex64::from_polar(1.0, omega * t - theta);
                (e * phi, e * Complex64::new(dphi, -phi * dtheta))
            }
            Shape::DnlsSoliton { omega, d } => {
                let y = x + d * t;
                let (phi, dphi) = dnls_amplitude(*omega, *d, y);
                let integral = dnls_phase_integral(*omega, *d, y);
                let e = Complex64::from_polar(1.0, omega * t - d / 2.0 * y - 0.75 * integral);
                // d/dx of the phase: −d/2 + (3/4)φ²(y).
                let dphase = -d / 2.0 + 0.75 * phi * phi;
                (e * phi, e * Complex64::new(dphi, phi * dphase))
            }
            Shape::PlaneWave { alpha, b, omega } => {
                let q = Complex64::from_polar(*alpha, omega * t + b * x);
                (q, q * Complex64::new(0.0, *b))
            }
            Shape::Gauge { inner, t: t0, sign } => {
                let (u, ux) = inner.value_and_derivative(x, *t0);
                // Decay was checked when the image was built.
                let integral = modulus_squared_integral(inner, x, *t0).unwrap_or(f64::NAN);
                let e = Complex64::from_polar(1.0, sign * integral);
                let q = u * e;
                (q, ux * e - q * Complex64::new(0.0, sign * u.norm_sqr()))
            }
            Shape::Scaled { inner, factor } => {
                let (q, qx) = inner.value_and_derivative(x, t);
                (q * factor, qx * factor)
            }
        }
    }
}

/// `φ_{ω,d}(y)` and its derivative.
fn dnls_amplitude(omega: f64, d: f64, y: f64) -> (f64, f64) {
    let n = 4.0 * omega - d * d;
    let g = n.sqrt();
    let delta = d / (2.0 * omega.sqrt());
    let den = (g * y).cosh() - delta;
    let phi2 = n / (omega.sqrt() * den);
    let phi = phi2.sqrt();
    let dphi2 = -phi2 * g * (g * y).sinh() / den;
    (phi, dphi2 / (2.0 * phi))
}

/// `∫_y^∞ φ_{ω,d}²`, in closed form when `d = 0`.
fn dnls_phase_integral(omega: f64, d: f64, y: f64) -> f64 {
    if d == 0.0 {
        return std::f64::consts::PI - 4.0 * (omega.sqrt() * y).tanh().atan();
    }
    let g = (4.0 * omega - d * d).sqrt();
    let end = y + TAIL_LENGTHS * 2.0 / g;
    let body = quad::integrate(|s| dnls_amplitude(omega, d, s).0.powi(2), y, end, QUAD_TOL, QUAD_TOL)
        .expect("φ² is smooth and bounded");
    // Beyond `end`, φ² = (N/√ω)/(cosh(gs) − δ) ≈ 2(N/√ω)e^{−gs}.
    body + dnls_amplitude(omega, d, end).0.powi(2) / g
}

/// `∫_x^∞ |u(y, t)|² dy`: Gauss–Kronrod panels up to 40 decay lengths past
/// `x`, then an exponential tail fitted to the last three samples.
fn modulus_squared_integral(u: &SolutionProfile, x: f64, t: f64) -> Result<f64> {
    let len = u.decay_length();
    if !len.is_finite() {
        return Err(Error::Tail("profile does not decay".into()));
    }
    let end = x + TAIL_LENGTHS * len;
    let f = |y: f64| u.evaluate(y, t).norm_sqr();
    let step = 0.5 * len;
    let (f0, f1, f2) = (f(end - 2.0 * step), f(end - step), f(end));
    if f2 == 0.0 {
        return quad::integrate(f, x, end, QUAD_TOL, QUAD_TOL);
    }
    let r1 = (f0 / f1).ln() / step;
    let r2 = (f1 / f2).ln() / step;
    if !(r1 > 0.0 && r2 > 0.0) || (r1 - r2).abs() > 1e-3 * r2 {
        return Err(Error::Tail(format!("|u|² is not exponentially decaying near x = {end} (rates {r1:e}, {r2:e})")));
    }
    Ok(quad::integrate(f, x, end, QUAD_TOL, QUAD_TOL)? + f2 / r2)
}

/// CSV of `(x, t, Re q, Im q)` over the product grid.
pub fn profile_csv(profile: &SolutionProfile, xs: &[f64], ts: &[f64]) -> String {
    let mut out = String::from("x,t,re,im\n");
    for &t in ts {
        for &x in xs {
            let q = profile.evaluate(x, t);
            let _ = writeln!(out, "{x:.12e},{t:.12e},{:.12e},{:.12e}", q.re, q.im);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_invariants, soliton_parameters};
    use approx::assert_relative_eq;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn unit_soliton_boundary_values() {
        let q = gi_soliton(1.0).unwrap();
        for t in [0.0, 0.3, 2.0] {
            let e = Complex64::from_polar(1.0, t);
            assert!((q.evaluate(0.0, t) - e * 2.0).norm() < 1e-15);
            assert!((q.evaluate_x(0.0, t) - e * Complex64::new(0.0, -2.0)).norm() < 1e-15);
        }
        assert_eq!(q.evaluate(0.0, 0.0).im, 0.0);
    }

    #[test]
    fn soliton_modulus_decreases() {
        let q = gi_soliton(1.0).unwrap();
        let mut prev = f64::INFINITY;
        for x in linspace(0.0, 6.0, 200) {
            let m = q.evaluate(x, 0.0).norm();
            assert_relative_eq!(m, (4.0 / (2.0 * x).cosh()).sqrt(), max_relative = 1e-14);
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn soliton_derivative_matches_differences() {
        let q = gi_soliton(2.5).unwrap();
        let h = 1e-5;
        for x in [0.3, 1.0, 2.2] {
            let fd = (q.evaluate(x + h, 0.4) - q.evaluate(x - h, 0.4)) / (2.0 * h);
            assert!((fd - q.evaluate_x(x, 0.4)).norm() < 1e-8);
        }
    }

    #[test]
    fn soliton_boundary_values_match_its_triple() {
        for omega in [1.0 / 16.0, 1.0, 16.0] {
            let q = gi_soliton(omega).unwrap();
            let p = soliton_parameters(omega).unwrap();
            for t in linspace(0.0, 10.0, 101) {
                let e = Complex64::from_polar(1.0, omega * t);
                assert!((q.evaluate(0.0, t) - e * p.alpha).norm() < 1e-10);
                assert!((q.evaluate_x(0.0, t) - e * p.c).norm() < 1e-10);
            }
            let inv = derive_invariants(&p);
            assert!(inv.x2.abs() < 1e-12 * p.scale() && inv.disc.abs() < 1e-12 * p.scale());
        }
    }

    #[test]
    fn nonpositive_frequency_is_rejected() {
        assert!(matches!(gi_soliton(0.0), Err(Error::Domain(_))));
        assert!(matches!(dnls_soliton(1.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dnls_amplitude_values() {
        let u = dnls_soliton(1.0, 0.0).unwrap();
        for x in [0.0, 0.7, 2.0] {
            assert_relative_eq!(u.evaluate(x, 0.0).norm(), (4.0 / (2.0 * x).cosh()).sqrt(), max_relative = 1e-14);
        }
        assert_relative_eq!(dnls_amplitude(1.0, 1.0, 0.0).0, 6f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn quadrature_matches_the_closed_phase() {
        let closed = dnls_phase_integral(1.0, 0.0, 0.5);
        let numeric = quad::integrate(|s| dnls_amplitude(1.0, 0.0, s).0.powi(2), 0.5, 40.5, 1e-15, 1e-15).unwrap()
            + dnls_amplitude(1.0, 0.0, 40.5).0.powi(2) / 2.0;
        assert!((closed - numeric).abs() < 1e-10 * closed);
    }

    #[test]
    fn dnls_derivative_matches_differences() {
        let u = dnls_soliton(1.3, 0.8).unwrap();
        let h = 1e-5;
        for x in [0.2, 1.1] {
            let fd = (u.evaluate(x + h, 0.3) - u.evaluate(x - h, 0.3)) / (2.0 * h);
            assert!((fd - u.evaluate_x(x, 0.3)).norm() < 1e-7, "{fd} {}", u.evaluate_x(x, 0.3));
        }
    }

    #[test]
    fn gauge_image_of_the_dnls_soliton_is_the_gi_soliton() {
        let rot = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        for omega in [1.0 / 16.0, 1.0, 16.0] {
            let image = gauge_transform(&dnls_soliton(omega, 0.0).unwrap(), 0.0, GaugeDirection::DnlsToGi)
                .unwrap()
                .scaled(rot);
            let q = gi_soliton(omega).unwrap();
            for x in linspace(0.0, 5.0, 51) {
                assert!((image.evaluate(x, 0.0) - q.evaluate(x, 0.0)).norm() < 1e-9, "ω = {omega}, x = {x}");
                assert!((image.evaluate_x(x, 0.0) - q.evaluate_x(x, 0.0)).norm() < 1e-8, "ω = {omega}, x = {x}");
            }
        }
    }

    #[test]
    fn gauge_round_trip_is_identity() {
        let q = gi_soliton(1.0).unwrap();
        let u = gauge_transform(&q, 0.0, GaugeDirection::GiToDnls).unwrap();
        let back = gauge_transform(&u, 0.0, GaugeDirection::DnlsToGi).unwrap();
        for x in linspace(0.0, 5.0, 26) {
            assert!((back.evaluate(x, 0.0) - q.evaluate(x, 0.0)).norm() < 1e-9);
            assert_relative_eq!(u.evaluate(x, 0.0).norm(), q.evaluate(x, 0.0).norm(), max_relative = 1e-14);
        }
    }

    #[test]
    fn plane_wave_is_not_gauge_transformable() {
        let p = plane_wave(1.0, -1.0).unwrap();
        assert!(matches!(gauge_transform(&p, 0.0, GaugeDirection::GiToDnls), Err(Error::Tail(_))));
        assert!(!p.is_schwartz());
    }

    #[test]
    fn plane_wave_values() {
        let p = plane_wave(1.0, -1.0).unwrap();
        assert_eq!(p.frequency(), Some(-1.5));
        let t = 0.9;
        assert!((p.evaluate(0.0, t) - Complex64::from_polar(1.0, -1.5 * t)).norm() < 1e-15);
        assert!((p.evaluate_x(0.0, t) - Complex64::from_polar(1.0, -1.5 * t) * Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(plane_wave(1.0, 0.0).unwrap().frequency(), Some(0.5));
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let csv = profile_csv(&gi_soliton(1.0).unwrap(), &[0.0, 1.0, 2.0], &[0.0, 1.0]);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("x,t,re,im\n0.000000000000e0,0.000000000000e0,2.000000000000e0,"));
    }
}
