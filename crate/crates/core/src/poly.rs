//! Roots of small complex polynomials.
//!
//! Coefficients are stored lowest degree first. Roots are found together by
//! Aberth–Ehrlich iteration, polished with Newton steps, and then grouped into
//! clusters so that repeated roots come back once with their multiplicity.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Value and first derivative by Horner's rule.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(j, &a)| a * j as f64).collect()
}

/// Sum of coefficient moduli weighted by |z|^j: a bound on the rounding noise
/// of a Horner evaluation at z.
fn eval_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut n = coeffs.len();
    while n > 1 && coeffs[n - 1] == Complex64::new(0.0, 0.0) {
        n -= 1;
    }
    &coeffs[..n]
}

/// All roots of the polynomial, repeated according to multiplicity, in no
/// particular order.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    // Exact zero roots are split off first; the relative residual test below
    // cannot certify them.
    let zeros = coeffs.iter().take_while(|a| **a == Complex64::new(0.0, 0.0)).count();
    let mut found = vec![Complex64::new(0.0, 0.0); zeros.min(coeffs.len() - 1)];
    let coeffs = &coeffs[found.len()..];
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(found);
    }
    let lead = coeffs[deg];
    // Fujiwara-style radius bound for the starting circle.
    let radius = (0..deg)
        .map(|j| (coeffs[j] / lead).norm().powf(1.0 / (deg - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut converged = vec![false; deg];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..deg {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p.norm() <= 4.0 * f64::EPSILON * eval_scale(coeffs, z[i]) {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(radius * f64::EPSILON) {
                converged[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }

    let worst = z
        .iter()
        .map(|&r| eval(coeffs, r).norm() / eval_scale(coeffs, r).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    // Repeated roots only reach sqrt(eps)-level accuracy here; clustering
    // below cleans them up, so the acceptance bar is loose.
    if !worst.is_finite() || worst > 1e-6 {
        return Err(Error::Convergence { residual: worst });
    }
    found.extend(z);
    Ok(found)
}

/// Roots merged into clusters whose members lie within `cluster_tol`
/// (relative to `1 + |root|`) of each other. Each cluster centre is refined by
/// Newton's method on the derivative of order `multiplicity − 1`.
pub fn roots_with_multiplicity(
    coeffs: &[Complex64],
    cluster_tol: f64,
) -> Result<Vec<(Complex64, usize)>> {
    let coeffs = trim(coeffs);
    let raw = aberth(coeffs)?;
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (raw[i] - raw[j]).norm();
            if d <= cluster_tol * (1.0 + raw[i].norm().max(raw[j].norm())) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in raw.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(z),
            None => groups.push((r, vec![z])),
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let mult = members.len();
        let mut centre = members.iter().sum::<Complex64>() / mult as f64;
        let mut d = coeffs.to_vec();
        for _ in 1..mult {
            d = derivative(&d);
        }
        for _ in 0..8 {
            let (p, dp) = eval_with_derivative(&d, centre);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            centre -= step;
            if step.norm() <= f64::EPSILON * (1.0 + centre.norm()) {
                break;
            }
        }
        out.push((centre, mult));
    }
    Ok(out)
}

/// Monic coefficients (lowest first) of ∏(z − r)^μ.
pub fn from_roots(roots: &[(Complex64, usize)]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &(r, mult) in roots {
        for _ in 0..mult {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (j, &a) in c.iter().enumerate() {
                next[j + 1] += a;
                next[j] -= a * r;
            }
            c = next;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn matches(found: &[(Complex64, usize)], expected: &[(Complex64, usize)], tol: f64) -> bool {
        expected.len() == found.len()
            && expected
                .iter()
                .all(|(r, m)| found.iter().any(|(f, fm)| fm == m && (f - r).norm() < tol))
    }

    #[test]
    fn simple_quadratic() {
        // z² + 1
        let roots = roots_with_multiplicity(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-6).unwrap();
        assert!(matches(&roots, &[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)], 1e-14));
    }

    #[test]
    fn repeated_roots_are_merged() {
        let expected = [(c(0.5, -0.25), 2), (c(-1.0, 0.0), 1), (c(2.0, 3.0), 1)];
        let coeffs = from_roots(&expected);
        let roots = roots_with_multiplicity(&coeffs, 1e-6).unwrap();
        assert!(matches(&roots, &expected, 1e-12), "{roots:?}");
    }

    #[test]
    fn quadruple_root_at_origin() {
        let coeffs = from_roots(&[(c(0.0, 0.0), 4)]);
        let roots = roots_with_multiplicity(&coeffs, 1e-6).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 4);
        assert!(roots[0].0.norm() < 1e-12);
    }

    #[test]
    fn horner_derivative_matches_difference() {
        let coeffs = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0)];
        let z = c(0.3, -0.7);
        let (_, dp) = eval_with_derivative(&coeffs, z);
        let h = 1e-6;
        let fd = (eval(&coeffs, z + h) - eval(&coeffs, z - h)) / (2.0 * h);
        assert!((dp - fd).norm() < 1e-8);
    }
}
