//! Parameter triples, their spectral invariants and the algebraic case split.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Boundary data `q(0,t) ~ α e^{iωt}`, `q_x(0,t) ~ c e^{iωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterTriple {
    pub alpha: f64,
    pub omega: f64,
    pub c: Complex64,
}

impl ParameterTriple {
    pub fn new(alpha: f64, omega: f64, c: Complex64) -> Result<Self> {
        if !(alpha.is_finite() && omega.is_finite() && c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidTriple("all parameters must be finite".into()));
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidTriple(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { alpha, omega, c })
    }

    /// The triple of the plane wave `α e^{iωt + ibx}`.
    pub fn plane_wave(alpha: f64, b: f64) -> Result<Self> {
        let omega = alpha.powi(4) / 2.0 - b * b + alpha * alpha * b;
        Self::new(alpha, omega, Complex64::new(0.0, alpha * b))
    }

    /// Magnitude used to make every constraint check relative. Constraint
    /// expressions are homogeneous of degree six when α counts as degree one,
    /// ω as two and c as three.
    pub fn scale(&self) -> f64 {
        let a = self.alpha;
        1f64.max(a.powi(6)).max(self.omega.abs() * a * a).max(self.c.norm_sqr())
    }

    /// Tolerance band for a quantity of the given homogeneous degree.
    pub fn band(&self, tol: f64, degree: u32) -> f64 {
        tol * self.scale().powf(degree as f64 / 6.0)
    }
}

impl fmt::Display for ParameterTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(α={}, ω={}, c={}{:+}i)", self.alpha, self.omega, self.c.re, self.c.im)
    }
}

/// Coefficients of `Ω² = 4k⁸ + X₁k⁴ + X₂k² + X₃` and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralInvariants {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub disc: f64,
    pub kappa_plus: Complex64,
    pub kappa_minus: Complex64,
    /// Plane-wave wavenumber `Im c / α`, present when `c` is imaginary.
    pub b: Option<f64>,
}

impl SpectralInvariants {
    /// Coefficients of `4m⁴ + X₁m² + X₂m + X₃`, lowest degree first.
    pub fn quartic_in_k_squared(&self) -> [Complex64; 5] {
        [
            Complex64::new(self.x3, 0.0),
            Complex64::new(self.x2, 0.0),
            Complex64::new(self.x1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]
    }

    /// `Ω²(k)`.
    pub fn omega_squared(&self, k: Complex64) -> Complex64 {
        let k2 = k * k;
        let k4 = k2 * k2;
        (k4 * 4.0 + self.x1) * k4 + k2 * self.x2 + self.x3
    }

    /// `d/dk Ω²(k)`.
    pub fn omega_squared_derivative(&self, k: Complex64) -> Complex64 {
        let k2 = k * k;
        let k3 = k2 * k;
        k3 * (k2 * k2 * 32.0 + self.x1 * 4.0) + k * (2.0 * self.x2)
    }
}

pub fn derive_invariants(triple: &ParameterTriple) -> SpectralInvariants {
    derive_invariants_with_tol(triple, DEFAULT_TOL)
}

pub fn derive_invariants_with_tol(triple: &ParameterTriple, tol: f64) -> SpectralInvariants {
    let a = triple.alpha;
    let w = triple.omega;
    let c = triple.c;
    let a2 = a * a;
    let a3 = a2 * a;
    let x1 = 2.0 * w;
    let x2 = -(a3 * a3 - 2.0 * a2 * w + 2.0 * c.norm_sqr() + 4.0 * a3 * c.im) / 2.0;
    let inner = a2 * a2 + 4.0 * a * c.im - 2.0 * w;
    let x3 = inner * inner / 16.0;
    let disc = x1 * x1 - 16.0 * x3;
    let root = Complex64::new(disc, 0.0).sqrt();
    let kappa_plus = (root - x1) / 8.0;
    let kappa_minus = (-root - x1) / 8.0;
    let b = if c.re.abs() <= tol * c.norm() || c.norm() == 0.0 {
        Some(c.im / a)
    } else {
        None
    };
    SpectralInvariants { x1, x2, x3, disc, kappa_plus, kappa_minus, b }
}

/// The cases of the spectral analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseLabel {
    SolitonDiscZero,
    SolitonDiscNegX1Pos,
    SolitonDiscPosX1Pos,
    SolitonDiscPosX1Nonpos,
    SolitonDiscNegX1Neg,
    SolitonDiscNegX1Zero,
    PwBLow,
    PwBMid,
    PwBHigh,
    OutsideScope,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 10] = [
        CaseLabel::SolitonDiscZero,
        CaseLabel::SolitonDiscNegX1Pos,
        CaseLabel::SolitonDiscPosX1Pos,
        CaseLabel::SolitonDiscPosX1Nonpos,
        CaseLabel::SolitonDiscNegX1Neg,
        CaseLabel::SolitonDiscNegX1Zero,
        CaseLabel::PwBLow,
        CaseLabel::PwBMid,
        CaseLabel::PwBHigh,
        CaseLabel::OutsideScope,
    ];

    pub fn is_admissible_candidate(self) -> bool {
        matches!(self, CaseLabel::SolitonDiscZero | CaseLabel::PwBLow | CaseLabel::PwBHigh)
    }

    pub fn is_soliton(self) -> bool {
        matches!(
            self,
            CaseLabel::SolitonDiscZero
                | CaseLabel::SolitonDiscNegX1Pos
                | CaseLabel::SolitonDiscPosX1Pos
                | CaseLabel::SolitonDiscPosX1Nonpos
                | CaseLabel::SolitonDiscNegX1Neg
                | CaseLabel::SolitonDiscNegX1Zero
        )
    }

    pub fn is_plane_wave(self) -> bool {
        matches!(self, CaseLabel::PwBLow | CaseLabel::PwBMid | CaseLabel::PwBHigh)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::SolitonDiscZero => "SOLITON_DISC_ZERO",
            CaseLabel::SolitonDiscNegX1Pos => "SOLITON_DISC_NEG_X1_POS",
            CaseLabel::SolitonDiscPosX1Pos => "SOLITON_DISC_POS_X1_POS",
            CaseLabel::SolitonDiscPosX1Nonpos => "SOLITON_DISC_POS_X1_NONPOS",
            CaseLabel::SolitonDiscNegX1Neg => "SOLITON_DISC_NEG_X1_NEG",
            CaseLabel::SolitonDiscNegX1Zero => "SOLITON_DISC_NEG_X1_ZERO",
            CaseLabel::PwBLow => "PW_B_LOW",
            CaseLabel::PwBMid => "PW_B_MID",
            CaseLabel::PwBHigh => "PW_B_HIGH",
            CaseLabel::OutsideScope => "OUTSIDE_SCOPE",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The explicit families of potentially admissible triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    /// `c = ±α√(ω − α⁴/16) − α³/4·i`, `ω ≥ α⁴/16`.
    #[serde(rename = "a")]
    A,
    /// The single point `(α, −α⁴/4, −α³/2·i)`.
    #[serde(rename = "a-isolated")]
    AIsolated,
    /// `c = α(α²/2 − √(3α⁴/4 − ω))i`, `ω ≤ −α⁴/4`.
    #[serde(rename = "b-first")]
    BFirst,
    /// `c = α(α²/2 + √(3α⁴/4 − ω))i`, `ω ≤ −(6√6 + 15)α⁴/2`.
    #[serde(rename = "b-second")]
    BSecond,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case_label: CaseLabel,
    pub admissible_candidate: bool,
    pub family_ids: Vec<FamilyId>,
    pub witness: Option<String>,
}

/// Upper plane-wave threshold `(2 + √6)α²` divided by α².
pub fn pw_high_threshold_factor() -> f64 {
    2.0 + 6f64.sqrt()
}

/// Whether the soliton constraint `X₂ = 0` holds within tolerance.
pub fn on_soliton_constraint(triple: &ParameterTriple, inv: &SpectralInvariants, tol: f64) -> bool {
    inv.x2.abs() <= tol * triple.scale()
}

/// Whether the plane-wave constraint holds within tolerance.
pub fn on_plane_wave_constraint(triple: &ParameterTriple, tol: f64) -> bool {
    let a = triple.alpha;
    let c = triple.c;
    let a3 = a * a * a;
    let residual = c.im * c.im + a * a * triple.omega - a3 * a3 / 2.0 - a3 * c.im;
    c.re.abs() <= triple.band(tol, 3) && residual.abs() <= tol * triple.scale()
}

pub fn classify(triple: &ParameterTriple, tol: f64) -> Result<Verdict> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let inv = derive_invariants_with_tol(triple, tol);
    let label = if on_soliton_constraint(triple, &inv, tol) {
        soliton_case(&inv, tol)
    } else if on_plane_wave_constraint(triple, tol) {
        plane_wave_case(triple, tol)?
    } else {
        CaseLabel::OutsideScope
    };
    let admissible = label.is_admissible_candidate();
    let family_ids = if admissible { family_membership(triple, tol) } else { Vec::new() };
    let witness = if admissible {
        None
    } else {
        Some(witness_text(label).to_string())
    };
    Ok(Verdict { case_label: label, admissible_candidate: admissible, family_ids, witness })
}

fn soliton_case(inv: &SpectralInvariants, tol: f64) -> CaseLabel {
    let disc_scale = 1f64.max(inv.x1 * inv.x1).max(16.0 * inv.x3);
    if inv.disc.abs() <= tol * disc_scale {
        return CaseLabel::SolitonDiscZero;
    }
    let x1_band = tol * disc_scale.sqrt();
    if inv.disc < 0.0 {
        if inv.x1.abs() <= x1_band {
            CaseLabel::SolitonDiscNegX1Zero
        } else if inv.x1 > 0.0 {
            CaseLabel::SolitonDiscNegX1Pos
        } else {
            CaseLabel::SolitonDiscNegX1Neg
        }
    } else if inv.x1 > x1_band {
        CaseLabel::SolitonDiscPosX1Pos
    } else {
        CaseLabel::SolitonDiscPosX1Nonpos
    }
}

fn plane_wave_case(triple: &ParameterTriple, tol: f64) -> Result<CaseLabel> {
    let a2 = triple.alpha * triple.alpha;
    let b = triple.c.im / triple.alpha;
    let band = triple.band(tol, 2);
    let low = -a2 / 2.0;
    let high = pw_high_threshold_factor() * a2;
    for (edge, name) in [(low, "-alpha^2/2"), (high, "(2+sqrt 6) alpha^2")] {
        if (b - edge).abs() <= band {
            return Err(Error::AmbiguousCase(format!(
                "plane-wave parameter b = {b} lies within {band:e} of the threshold {name} = {edge}"
            )));
        }
    }
    Ok(if b < low {
        CaseLabel::PwBLow
    } else if b < high {
        CaseLabel::PwBMid
    } else {
        CaseLabel::PwBHigh
    })
}

fn witness_text(label: CaseLabel) -> &'static str {
    match label {
        CaseLabel::SolitonDiscNegX1Pos => {
            "X2 = 0, X1^2 - 16 X3 < 0, X1 > 0: a branch cut runs inside the closure of D1"
        }
        CaseLabel::SolitonDiscPosX1Pos => {
            "X2 = 0, X1^2 - 16 X3 > 0, X1 > 0: a branch cut runs inside the closure of D1"
        }
        CaseLabel::SolitonDiscPosX1Nonpos => "X2 = 0 with X1^2 - 16 X3 > 0 forces X1 > 0; this case is empty",
        CaseLabel::SolitonDiscNegX1Neg => {
            "X2 = 0, X1^2 - 16 X3 < 0, X1 < 0: a branch cut runs inside the closure of D1"
        }
        CaseLabel::SolitonDiscNegX1Zero => {
            "X2 = 0, X1 = 0, X3 > 0: a branch cut runs inside the closure of D1"
        }
        CaseLabel::PwBMid => {
            "plane wave with -alpha^2/2 < b < (2+sqrt 6) alpha^2: a branch cut runs inside the closure of D1"
        }
        CaseLabel::OutsideScope => "triple satisfies neither the soliton nor the plane-wave constraint",
        _ => "",
    }
}

/// Every explicit family whose defining relations hold within `tol`.
pub fn family_membership(triple: &ParameterTriple, tol: f64) -> Vec<FamilyId> {
    let a = triple.alpha;
    let w = triple.omega;
    let c = triple.c;
    let a2 = a * a;
    let a3 = a2 * a;
    let a4 = a2 * a2;
    let b3 = triple.band(tol, 3);
    let b2 = triple.band(tol, 2);
    let b6 = tol * triple.scale();
    let mut out = Vec::new();

    // (a): Im c = −α³/4 and (Re c)² = α²(ω − α⁴/16), with ω ≥ α⁴/16.
    if (c.im + a3 / 4.0).abs() <= b3
        && w - a4 / 16.0 >= -b2
        && (c.re * c.re - a2 * (w - a4 / 16.0)).abs() <= b6
    {
        out.push(FamilyId::A);
    }
    if (w + a4 / 4.0).abs() <= b2 && (c - Complex64::new(0.0, -a3 / 2.0)).norm() <= b3 {
        out.push(FamilyId::AIsolated);
    }
    // (b): c = α(α²/2 ∓ √(3α⁴/4 − ω))i. Both branches need ω ≤ −α⁴/4, where
    // the radicand is at least α⁴, so the square root is well conditioned.
    let radicand = 0.75 * a4 - w;
    if radicand > 0.0 {
        let root = radicand.sqrt();
        let first = Complex64::new(0.0, a * (a2 / 2.0 - root));
        let second = Complex64::new(0.0, a * (a2 / 2.0 + root));
        if w <= -a4 / 4.0 + b2 && (c - first).norm() <= b3 {
            out.push(FamilyId::BFirst);
        }
        let threshold = -(6.0 * 6f64.sqrt() + 15.0) / 2.0 * a4;
        if w <= threshold + b2 && (c - second).norm() <= b3 {
            out.push(FamilyId::BSecond);
        }
    }
    out
}

/// The soliton's boundary triple `(2ω^{1/4}, ω, −2ω^{3/4}i)`.
pub fn soliton_parameters(omega: f64) -> Result<ParameterTriple> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("soliton frequency must be positive, got {omega}")));
    }
    let q = omega.powf(0.25);
    ParameterTriple::new(2.0 * q, omega, Complex64::new(0.0, -2.0 * q * q * q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(alpha: f64, omega: f64, re: f64, im: f64) -> ParameterTriple {
        ParameterTriple::new(alpha, omega, Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn invariants_of_the_unit_soliton() {
        let inv = derive_invariants(&triple(2.0, 1.0, 0.0, -2.0));
        assert_eq!(inv.x1, 2.0);
        assert_eq!(inv.x2, 0.0);
        assert_eq!(inv.x3, 0.25);
        assert_eq!(inv.disc, 0.0);
        assert_eq!(inv.kappa_plus, Complex64::new(-0.25, 0.0));
        assert_eq!(inv.kappa_minus, Complex64::new(-0.25, 0.0));
    }

    #[test]
    fn invariants_of_a_plane_wave() {
        let inv = derive_invariants(&triple(1.0, -1.5, 0.0, -1.0));
        assert_eq!((inv.x1, inv.x2, inv.x3), (-3.0, -1.0, 0.0));
        assert_eq!(inv.b, Some(-1.0));
    }

    #[test]
    fn invariants_with_zero_neumann_value() {
        let inv = derive_invariants(&triple(1.0, 0.0, 0.0, 0.0));
        assert_eq!((inv.x1, inv.x2, inv.x3), (0.0, -0.5, 1.0 / 16.0));
        assert_eq!(inv.b, Some(0.0));
    }

    #[test]
    fn b_absent_for_complex_neumann_value() {
        assert_eq!(derive_invariants(&triple(1.0, 3.99, 2.0, -0.3)).b, None);
    }

    #[test]
    fn classify_examples() {
        let v = classify(&triple(2.0, 1.0, 0.0, -2.0), DEFAULT_TOL).unwrap();
        assert_eq!(v.case_label, CaseLabel::SolitonDiscZero);
        assert!(v.admissible_candidate);
        assert_eq!(v.family_ids, vec![FamilyId::A]);

        let v = classify(&triple(1.0, 1.5, 1.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(v.case_label, CaseLabel::SolitonDiscPosX1Pos);
        assert!(!v.admissible_candidate);
        assert!(v.witness.is_some());

        let v = classify(&triple(1.0, -1.5, 0.0, -1.0), DEFAULT_TOL).unwrap();
        assert_eq!(v.case_label, CaseLabel::PwBLow);
        assert!(v.admissible_candidate);

        let v = classify(&triple(1.0, 3.99, 2.0, -0.3), DEFAULT_TOL).unwrap();
        assert_eq!(v.case_label, CaseLabel::SolitonDiscNegX1Pos);
        assert!(!v.admissible_candidate);
        assert!(v.family_ids.is_empty());

        let v = classify(&triple(1.0, 0.0, 0.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(v.case_label, CaseLabel::OutsideScope);
        assert!(!v.admissible_candidate);
    }

    #[test]
    fn threshold_ties_are_ambiguous() {
        let s6 = 6f64.sqrt();
        let t = triple(1.0, -7.5 - 3.0 * s6, 0.0, 2.0 + s6);
        assert!(matches!(classify(&t, DEFAULT_TOL), Err(Error::AmbiguousCase(_))));
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(classify(&triple(1.0, 0.0, 0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn family_examples() {
        assert_eq!(family_membership(&triple(2.0, 1.0, 0.0, -2.0), DEFAULT_TOL), vec![FamilyId::A]);
        assert_eq!(
            family_membership(&triple(1.0, -0.25, 0.0, -0.5), DEFAULT_TOL),
            vec![FamilyId::AIsolated, FamilyId::BFirst]
        );
        let s6 = 6f64.sqrt();
        assert_eq!(
            family_membership(&triple(1.0, -7.5 - 3.0 * s6, 0.0, 2.0 + s6), DEFAULT_TOL),
            vec![FamilyId::BSecond]
        );
    }

    #[test]
    fn soliton_parameter_examples() {
        assert_eq!(soliton_parameters(1.0).unwrap(), triple(2.0, 1.0, 0.0, -2.0));
        assert_eq!(soliton_parameters(16.0).unwrap(), triple(4.0, 16.0, 0.0, -16.0));
        assert_eq!(soliton_parameters(1.0 / 16.0).unwrap(), triple(1.0, 1.0 / 16.0, 0.0, -0.25));
        assert!(matches!(soliton_parameters(0.0), Err(Error::Domain(_))));
        assert!(matches!(soliton_parameters(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_triples_rejected() {
        assert!(ParameterTriple::new(0.0, 1.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(ParameterTriple::new(1.0, f64::NAN, Complex64::new(0.0, 0.0)).is_err());
    }
}
