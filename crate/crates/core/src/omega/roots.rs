use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SpectralInvariants;
use crate::poly;

/// Roots of the quartic in `m = k²` closer than this (relative) are merged.
/// The floor covers the √ε accuracy of repeated roots; the tolerance term
/// keeps merging consistent with the discriminant band used by `classify`,
/// since a relative perturbation δ of a double root splits it by about √δ.
pub fn cluster_tolerance(tol: f64) -> f64 {
    1e-6f64.max(10.0 * tol.sqrt())
}

/// Roots of `Ω²(k) = 4k⁸ + X₁k⁴ + X₂k² + X₃` with multiplicities.
pub fn omega_squared_roots(inv: &SpectralInvariants, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    let coeffs = inv.quartic_in_k_squared();
    let mut m_roots = poly::roots_with_multiplicity(&coeffs, cluster_tolerance(tol))?;

    let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let worst = m_roots
        .iter()
        .map(|&(m, mult)| {
            let mut d = coeffs.to_vec();
            for _ in 1..mult {
                d = poly::derivative(&d);
            }
            poly::eval(&d, m).norm() / (scale * (1.0 + m.norm()).powi(4))
        })
        .fold(0.0, f64::max);
    if worst > tol.max(1e-10) {
        return Err(Error::Convergence { residual: worst });
    }

    // Real coefficients: snap nearly-real roots onto the axis and make the
    // rest come in exact conjugate pairs.
    symmetrize_conjugates(&mut m_roots);

    let mut out = Vec::with_capacity(8);
    for (m, mult) in m_roots {
        if m.norm() <= 1e-14 * scale.sqrt() {
            out.push((Complex64::new(0.0, 0.0), 2 * mult));
        } else {
            let r = m.sqrt();
            out.push((r, mult));
            out.push((-r, mult));
        }
    }
    Ok(out)
}

fn symmetrize_conjugates(roots: &mut [(Complex64, usize)]) {
    let n = roots.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let (m, mult) = roots[i];
        let snap = 1e-9 * (1.0 + m.norm());
        if m.im.abs() <= snap {
            roots[i].0 = Complex64::new(m.re, 0.0);
            done[i] = true;
            continue;
        }
        let partner = (0..n)
            .filter(|&j| j != i && !done[j] && roots[j].1 == mult)
            .min_by(|&a, &b| {
                let da = (roots[a].0 - m.conj()).norm();
                let db = (roots[b].0 - m.conj()).norm();
                da.total_cmp(&db)
            });
        if let Some(j) = partner {
            let avg = (m + roots[j].0.conj()) / 2.0;
            roots[i].0 = avg;
            roots[j].0 = avg.conj();
            done[j] = true;
        }
        done[i] = true;
    }
}
