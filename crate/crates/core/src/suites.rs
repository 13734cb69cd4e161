//! Named verification suites with pass/fail thresholds, shared by the CLI
//! and the acceptance tests.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_forms::SolutionProfile;
use crate::error::{Error, Result};
use crate::omega::OmegaEvaluator;
use crate::region::{build_region_map, default_half_width, DEFAULT_RESOLUTION};
use crate::scattering::{global_relation_residual, ScatteringConfig};
use crate::verify::{convergence_factors, gi_residual, zero_curvature_residual, Rect, DEFAULT_STEP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Accepted interval `[lo, hi]`.
    pub bounds: (f64, f64),
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, hi: f64) -> Self {
        Self::within(name, value, (0.0, hi))
    }

    fn within(name: &str, value: f64, bounds: (f64, f64)) -> Self {
        let passed = value >= bounds.0 && value < bounds.1;
        Self { name: name.into(), value, bounds, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, samples: usize, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { suite: suite.into(), samples, checks, passed }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

pub const IDENTITY_TOL: f64 = 1e-10;

/// Largest relative errors of the symmetry and algebraic identities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityErrors {
    pub det_e: f64,
    pub e_symmetry: f64,
    pub omega_even: f64,
    pub omega_conjugate: f64,
    pub h_product: f64,
}

impl IdentityErrors {
    fn merge(&mut self, o: &IdentityErrors) {
        self.det_e = self.det_e.max(o.det_e);
        self.e_symmetry = self.e_symmetry.max(o.e_symmetry);
        self.omega_even = self.omega_even.max(o.omega_even);
        self.omega_conjugate = self.omega_conjugate.max(o.omega_conjugate);
        self.h_product = self.h_product.max(o.h_product);
    }

    pub fn max(&self) -> f64 {
        [self.det_e, self.e_symmetry, self.omega_even, self.omega_conjugate, self.h_product].into_iter().fold(0.0, f64::max)
    }
}

/// Identity errors at one point, or `None` if `k` is on a cut or a pole.
pub fn identity_errors_at(ev: &OmegaEvaluator, k: Complex64) -> Option<IdentityErrors> {
    let omega = ev.eval_omega(k).ok()?;
    let e = ev.eval_e(k).ok()?;
    let e_bar = ev.eval_e(k.conj()).ok()?;
    let omega_neg = ev.eval_omega(-k).ok()?;
    let omega_bar = ev.eval_omega(k.conj()).ok()?;
    let h = omega - ev.g_polynomial(k);
    let lhs = (omega * 2.0 - h) * h;
    let rhs = -k * k * ev.d_polynomial(k);
    let rel = |d: f64, s: f64| d / s.max(f64::MIN_POSITIVE);
    Some(IdentityErrors {
        det_e: (e.det() - 1.0).norm(),
        e_symmetry: rel((e_bar.conj().sigma1_conjugate() - e).max_abs(), e.max_abs()),
        omega_even: rel((omega_neg - omega).norm(), omega.norm()),
        omega_conjugate: rel((omega_bar - omega.conj()).norm(), omega.norm()),
        h_product: rel((lhs - rhs).norm(), lhs.norm().max(rhs.norm())),
    })
}

/// Identity errors over `samples` seeded off-cut points in the box of
/// half-width `2(1 + max root modulus)`. Points closer than `1e-6` to a cut
/// are redrawn.
pub fn identity_errors(ev: &OmegaEvaluator, samples: usize, seed: u64) -> IdentityErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = 2.0 * (1.0 + ev.max_root_modulus());
    let mut out = IdentityErrors::default();
    let mut taken = 0;
    while taken < samples {
        let k = Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
        if ev.cuts.distance(k) < 1e-6 {
            continue;
        }
        if let Some(e) = identity_errors_at(ev, k) {
            out.merge(&e);
            taken += 1;
        }
    }
    out
}

pub fn identities_suite(ev: &OmegaEvaluator, samples: usize, seed: u64) -> SuiteReport {
    let e = identity_errors(ev, samples, seed);
    SuiteReport::new(
        "identities",
        samples,
        vec![
            Check::below("det E = 1", e.det_e, IDENTITY_TOL),
            Check::below("σ₁E*σ₁ = E", e.e_symmetry, IDENTITY_TOL),
            Check::below("Ω(−k) = Ω(k)", e.omega_even, IDENTITY_TOL),
            Check::below("Ω(k̄) = conj Ω(k)", e.omega_conjugate, IDENTITY_TOL),
            Check::below("(2Ω − H)H = −k²D", e.h_product, IDENTITY_TOL),
        ],
    )
}

/// The region used by the PDE checks.
pub const PDE_REGION: Rect = Rect { x: (0.1, 5.0), t: (0.0, 5.0) };
const CONVERGENCE_START: f64 = 0.04;
const CONVERGENCE_BOUNDS: (f64, f64) = (12.0, 20.0);

/// GI residual at the default step, and for decaying profiles the observed
/// convergence factor over three halvings.
pub fn pde_suite(q: &SolutionProfile) -> Result<SuiteReport> {
    let report = gi_residual(q, PDE_REGION, DEFAULT_STEP)?;
    let limit = if q.is_schwartz() { 1e-6 } else { 1e-8 };
    let mut checks = vec![Check::below("max |GI residual|", report.max_abs, limit)];
    if q.is_schwartz() {
        for (j, f) in convergence_factors(q, PDE_REGION, CONVERGENCE_START, 3)?.into_iter().enumerate() {
            checks.push(Check::within(&format!("convergence factor {}", j + 1), f, CONVERGENCE_BOUNDS));
        }
    }
    Ok(SuiteReport::new("pde", 2500, checks))
}

/// Zero-curvature residual at seeded `(x, t, k)` with `|k| ≤ 2`, and the
/// smallest ratio against the same profile scaled by 1.1.
pub fn lax_suite(q: &SolutionProfile, samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perturbed = q.scaled(Complex64::new(1.1, 0.0));
    let mut worst: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let x = rng.gen_range(PDE_REGION.x.0..PDE_REGION.x.1);
        let t = rng.gen_range(PDE_REGION.t.0..PDE_REGION.t.1);
        let k = Complex64::from_polar(2.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let exact = zero_curvature_residual(q, x, t, k, DEFAULT_STEP);
        let bad = zero_curvature_residual(&perturbed, x, t, k, DEFAULT_STEP);
        worst = worst.max(exact);
        min_ratio = min_ratio.min(bad / exact.max(f64::MIN_POSITIVE));
    }
    SuiteReport::new(
        "lax",
        samples,
        vec![
            Check::below("max zero-curvature residual", worst, 1e-5),
            Check::within("min perturbed / exact ratio", min_ratio, (1e3, f64::INFINITY)),
        ],
    )
}

/// Seeded points of `|k| ≤ radius` in the closure of an unbounded D1
/// component, drawn from the D1 sectors and filtered by the region map.
pub fn global_relation_suite(ev: &OmegaEvaluator, q: &SolutionProfile, samples: usize, radius: f64, seed: u64) -> Result<SuiteReport> {
    let map = build_region_map(ev, default_half_width(ev).max(1.5 * radius), DEFAULT_RESOLUTION)?;
    let cfg = ScatteringConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    let mut attempts = 0;
    while taken < samples {
        attempts += 1;
        if attempts > 100 * samples {
            return Err(Error::Region { k: Complex64::new(radius, 0.0) });
        }
        let r = radius * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_4) + if rng.gen() { 0.0 } else { std::f64::consts::PI };
        let k = Complex64::from_polar(r, theta);
        match global_relation_residual(ev, q, &map, k, &cfg) {
            Ok(d) => {
                worst = worst.max(d.residual_global);
                taken += 1;
            }
            Err(Error::Region { .. } | Error::OnCut { .. } | Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteReport::new("global-relation", samples, vec![Check::below("max |Ab − aB|", worst, 1e-6)]))
}
