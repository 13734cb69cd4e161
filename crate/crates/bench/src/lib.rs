//! Shared fixtures for the benchmarks.

use gi_core::params::ParameterTriple;
use num_complex::Complex64;

/// One representative triple per non-empty case of the spectral analysis.
pub fn representative_triples() -> Vec<(&'static str, ParameterTriple)> {
    let t = |a: f64, w: f64, re: f64, im: f64| ParameterTriple::new(a, w, Complex64::new(re, im)).unwrap();
    vec![
        ("disc_zero", t(2.0, 1.0, 0.0, -2.0)),
        ("disc_neg_x1_pos", t(1.0, 3.99, 2.0, -0.3)),
        ("disc_pos_x1_pos", t(1.0, 1.5, 1.0, 0.0)),
        ("pw_low", t(1.0, -1.5, 0.0, -1.0)),
        ("pw_mid", ParameterTriple::plane_wave(1.0, 1.0).unwrap()),
        ("pw_high", ParameterTriple::plane_wave(1.0, 5.0).unwrap()),
    ]
}
