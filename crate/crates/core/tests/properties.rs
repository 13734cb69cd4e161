//! Invariants checked on random inputs.

use gi_core::closed_forms::{gauge_transform, gi_soliton, plane_wave, GaugeDirection};
use gi_core::omega::OmegaEvaluator;
use gi_core::params::{classify, derive_invariants, on_plane_wave_constraint, soliton_parameters, ParameterTriple, DEFAULT_TOL};
use gi_core::sampling::soliton_constraint_omega;
use gi_core::scattering::{compute_s, ScatteringConfig};
use gi_core::suites::identity_errors_at;
use num_complex::Complex64;
use proptest::prelude::*;

fn soliton_triple() -> impl Strategy<Value = ParameterTriple> {
    (0.5f64..2.0, -1.2f64..1.2, -1.6f64..0.8).prop_map(|(alpha, re, im)| {
        let c = Complex64::new(re, im) * alpha.powi(3);
        ParameterTriple::new(alpha, soliton_constraint_omega(alpha, c), c).unwrap()
    })
}

fn plane_wave_triple() -> impl Strategy<Value = ParameterTriple> {
    (0.5f64..2.0, -3.0f64..7.0).prop_map(|(alpha, beta)| ParameterTriple::plane_wave(alpha, alpha * alpha * beta).unwrap())
}

fn any_triple() -> impl Strategy<Value = ParameterTriple> {
    (0.1f64..3.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)
        .prop_map(|(alpha, omega, re, im)| ParameterTriple::new(alpha, omega, Complex64::new(re, im)).unwrap())
}

fn point() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_are_well_formed(t in any_triple()) {
        let inv = derive_invariants(&t);
        prop_assert_eq!(inv.x1, 2.0 * t.omega);
        prop_assert!(inv.x3 >= 0.0);
        prop_assert!((inv.disc - (inv.x1 * inv.x1 - 16.0 * inv.x3)).abs() <= 1e-12 * (1.0 + inv.x1 * inv.x1 + 16.0 * inv.x3));
    }

    #[test]
    fn vieta_on_the_soliton_surface(t in soliton_triple()) {
        let inv = derive_invariants(&t);
        let s = 1.0 + inv.x1.abs() + inv.x3;
        prop_assert!((inv.kappa_plus + inv.kappa_minus + inv.x1 / 4.0).norm() <= 1e-10 * s);
        prop_assert!((inv.kappa_plus * inv.kappa_minus - inv.x3 / 4.0).norm() <= 1e-10 * s * s);
    }

    #[test]
    fn admissibility_follows_the_case_label(t in prop_oneof![soliton_triple(), plane_wave_triple(), any_triple()]) {
        if let Ok(v) = classify(&t, DEFAULT_TOL) {
            prop_assert_eq!(v.admissible_candidate, v.case_label.is_admissible_candidate());
            prop_assert_eq!(v.witness.is_some(), !v.admissible_candidate);
            if !v.family_ids.is_empty() {
                prop_assert!(v.admissible_candidate);
            }
        }
    }

    #[test]
    fn plane_wave_triples_satisfy_their_constraint(alpha in 0.5f64..2.0, b in -5.0f64..5.0) {
        let t = ParameterTriple::plane_wave(alpha, b).unwrap();
        prop_assert!(on_plane_wave_constraint(&t, 1e-12));
        let q = plane_wave(alpha, b).unwrap();
        prop_assert!((q.evaluate(1.3, 0.7).norm() - alpha).abs() <= 1e-14 * alpha);
        prop_assert!((q.evaluate(0.0, 0.0) - Complex64::new(alpha, 0.0)).norm() <= 1e-14);
    }

    #[test]
    fn omega_symmetries_and_unit_determinant(t in prop_oneof![soliton_triple(), plane_wave_triple()], k in point()) {
        let Ok(ev) = OmegaEvaluator::new(t) else { return Ok(()) };
        prop_assume!(ev.cuts.distance(k) > 1e-6);
        if let Some(e) = identity_errors_at(&ev, k) {
            prop_assert!(e.max() < 1e-10, "{:?}", e);
        }
    }

    #[test]
    fn soliton_triple_is_a_double_root_case(omega in 0.01f64..50.0) {
        let t = soliton_parameters(omega).unwrap();
        let inv = derive_invariants(&t);
        prop_assert!(inv.x2.abs() <= 1e-12 * t.scale());
        prop_assert!(inv.disc.abs() <= 1e-12 * t.scale());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gauge_preserves_modulus(omega in 0.2f64..4.0, x in 0.0f64..4.0) {
        let q = gi_soliton(omega).unwrap();
        let u = gauge_transform(&q, 0.0, GaugeDirection::GiToDnls).unwrap();
        let (a, b) = (u.evaluate(x, 0.0).norm(), q.evaluate(x, 0.0).norm());
        prop_assert!((a - b).abs() <= 1e-14 * b.max(1e-300));
    }

    #[test]
    fn scattering_determinant_is_conserved(omega in 0.3f64..3.0, k in 0.1f64..2.0) {
        let s = compute_s(&gi_soliton(omega).unwrap(), Complex64::new(k, 0.0), &ScatteringConfig::default()).unwrap();
        prop_assert!((s.det() - 1.0).norm() < 1e-8, "{}", s.det());
    }
}
