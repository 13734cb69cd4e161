//! Sheet selection for Ω.
//!
//! Ω is written as a product over the zeros of Ω²: even zeros contribute
//! polynomial factors, and each branch cut joining `p` to `q` contributes
//! `f(k) = (k − p)·√((k − q)/(k − p))`, which behaves like `k` at infinity and
//! whose own discontinuity lies on the straight chord `[p, q]`. When the cut
//! polyline differs from the chord, the region enclosed by polyline plus
//! chord is where `f` sits on the other sheet, so the factor is negated
//! there. The product is analytic off the cuts and matches `2k⁴` at infinity,
//! which is exactly the branch fixed by the asymptotic normalization.

use num_complex::Complex64;

use super::cuts::Cut;

#[derive(Debug, Clone)]
pub(crate) struct SheetModel {
    even: Vec<(Complex64, u32)>,
    pairs: Vec<PairFactor>,
}

#[derive(Debug, Clone)]
struct PairFactor {
    p: Complex64,
    q: Complex64,
    /// Closed ring: the cut polyline from `p` to `q`; the chord back to `p`
    /// is implicit. `None` for straight cuts.
    ring: Option<Vec<Complex64>>,
    /// Unit normal of the chord, used to step off it.
    normal: Complex64,
    chord_len: f64,
}

impl SheetModel {
    pub(crate) fn new(even: Vec<(Complex64, u32)>, cuts: &[Cut]) -> Self {
        let pairs = cuts
            .iter()
            .map(|cut| {
                let p = cut.vertices[0];
                let q = *cut.vertices.last().unwrap();
                let dir = (q - p) / (q - p).norm();
                let ring = if cut.vertices.len() > 2 { Some(cut.vertices.clone()) } else { None };
                PairFactor { p, q, ring, normal: dir * Complex64::new(0.0, 1.0), chord_len: (q - p).norm() }
            })
            .collect();
        Self { even, pairs }
    }

    /// The analytic model of Ω at `k` (up to rounding).
    pub(crate) fn model(&self, k: Complex64) -> Complex64 {
        let mut w = Complex64::new(2.0, 0.0);
        for &(r, pow) in &self.even {
            w *= (k - r).powu(pow);
        }
        for pair in &self.pairs {
            w *= pair.factor(k, None);
        }
        w
    }

    /// Model values along the row `Im k = y`, with parity from a scanline
    /// sweep instead of a point-in-polygon test per cell.
    pub(crate) fn model_row(&self, y: f64, xs: &[f64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = xs
            .iter()
            .map(|&x| {
                let k = Complex64::new(x, y);
                let mut w = Complex64::new(2.0, 0.0);
                for &(r, pow) in &self.even {
                    w *= (k - r).powu(pow);
                }
                w
            })
            .collect();
        for pair in &self.pairs {
            let crossings = pair.ring.as_ref().map(|ring| row_crossings(ring, y));
            let mut idx = 0;
            for (j, &x) in xs.iter().enumerate() {
                let parity = crossings.as_ref().map(|cs| {
                    while idx < cs.len() && cs[idx] <= x {
                        idx += 1;
                    }
                    (cs.len() - idx) % 2 == 1
                });
                out[j] *= pair.factor(Complex64::new(x, y), parity);
            }
        }
        out
    }
}

impl PairFactor {
    fn factor(&self, k: Complex64, parity: Option<bool>) -> Complex64 {
        if k == self.p || k == self.q {
            return Complex64::new(0.0, 0.0);
        }
        // Points on the chord itself are moved a hair off it; the factor
        // (including the parity sign) is continuous across the chord except
        // where the chord coincides with the cut.
        let rel = (k - self.p) / (self.q - self.p);
        let off = rel.im * self.chord_len;
        let (k, parity) = if off.abs() <= 1e-12 * (1.0 + self.chord_len) && rel.re > 0.0 && rel.re < 1.0 {
            (k + self.normal * (1e-9 * self.chord_len), None)
        } else {
            (k, parity)
        };
        let base = (k - self.p) * ((k - self.q) / (k - self.p)).sqrt();
        let inside = match (&self.ring, parity) {
            (None, _) => false,
            (Some(_), Some(par)) => par,
            (Some(ring), None) => point_in_ring(ring, k),
        };
        if inside {
            -base
        } else {
            base
        }
    }
}

/// Even–odd test against the closed ring (polyline plus closing chord).
pub(crate) fn point_in_ring(ring: &[Complex64], k: Complex64) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.im > k.im) != (b.im > k.im) {
            let x = a.re + (k.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if x > k.re {
                inside = !inside;
            }
        }
    }
    inside
}

/// Sorted abscissae where the closed ring crosses the line `Im k = y`, using
/// the same half-open rule as `point_in_ring`.
fn row_crossings(ring: &[Complex64], y: f64) -> Vec<f64> {
    let n = ring.len();
    let mut xs = Vec::new();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.im > y) != (b.im > y) {
            xs.push(a.re + (y - a.im) * (b.re - a.re) / (b.im - a.im));
        }
    }
    xs.sort_by(f64::total_cmp);
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_membership() {
        let ring = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 1.0),
        ];
        assert!(point_in_ring(&ring, Complex64::new(0.5, 0.5)));
        assert!(!point_in_ring(&ring, Complex64::new(1.5, 0.5)));
        assert!(!point_in_ring(&ring, Complex64::new(0.5, -0.5)));
    }

    #[test]
    fn row_sweep_matches_pointwise_test() {
        let ring: Vec<Complex64> = (0..40)
            .map(|j| {
                let t = j as f64 / 40.0 * std::f64::consts::TAU;
                Complex64::from_polar(1.0 + 0.3 * (3.0 * t).sin(), t)
            })
            .collect();
        let cut = Cut { vertices: ring.clone() };
        let model = SheetModel::new(Vec::new(), &[cut]);
        let xs: Vec<f64> = (0..101).map(|i| -1.5 + 0.03 * i as f64 + 1e-3).collect();
        for y in [-0.9, -0.2, 0.0137, 0.6] {
            let row = model.model_row(y, &xs);
            for (j, &x) in xs.iter().enumerate() {
                let single = model.model(Complex64::new(x, y));
                assert!((row[j] - single).norm() < 1e-12, "({x},{y})");
            }
        }
    }
}
