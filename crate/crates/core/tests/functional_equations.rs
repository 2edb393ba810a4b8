mod common;

use branchdens::dynamics::{eval_kstar, eval_phi, eval_pi, psi_expansion, IterationConfig};
use branchdens::pgf::OffspringPgf;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg() -> IterationConfig {
    IterationConfig::default()
}

#[test]
fn schroeder_residual() {
    let cfg = cfg();
    for i in 0..3 {
        let pgf = example(i);
        for z in random_disk_points(200, 0.9, 11 + i as u64) {
            let lhs = eval_phi(&pgf, pgf.evaluate(z), &cfg).unwrap();
            let rhs = pgf.p1() * eval_phi(&pgf, z, &cfg).unwrap();
            assert!((lhs - rhs).norm() < 10.0 * cfg.tol, "example {i} z={z}: {}", (lhs - rhs).norm());
        }
    }
}

#[test]
fn poincare_residual() {
    let cfg = cfg();
    for i in 0..3 {
        let pgf = example(i);
        for z in random_disk_points(200, 2.0, 23 + i as u64) {
            let lhs = pgf.evaluate(eval_pi(&pgf, z, &cfg).unwrap());
            let rhs = eval_pi(&pgf, z * pgf.mean(), &cfg).unwrap();
            assert!((lhs - rhs).norm() < 10.0 * cfg.tol, "example {i} z={z}: {}", (lhs - rhs).norm());
        }
    }
}

/// Points of the fundamental strip, on the real line and towards the
/// shifted sampling line.
fn strip_points(pgf: &OffspringPgf) -> Vec<Complex64> {
    let theta = std::f64::consts::PI / (2.0 * pgf.log_mean());
    let mut pts = Vec::new();
    for i in 0..32 {
        let x = i as f64 / 32.0;
        for frac in [0.0, 0.5, 0.9] {
            pts.push(c(x, -frac * theta));
        }
    }
    pts
}

#[test]
fn kstar_periodicity() {
    let cfg = cfg();
    for i in 0..3 {
        let pgf = example(i);
        for z in strip_points(&pgf) {
            let a = eval_kstar(&pgf, z, &cfg).unwrap();
            let b = eval_kstar(&pgf, z + 1.0, &cfg).unwrap();
            assert!((a - b).norm() < 10.0 * cfg.tol, "example {i} z={z}: {}", (a - b).norm());
        }
    }
}

#[test]
fn kstar_invariant_under_one_step_of_p() {
    let cfg = cfg();
    for i in 0..3 {
        let pgf = example(i);
        for z in strip_points(&pgf) {
            let w = eval_pi(&pgf, (z * pgf.log_mean()).exp(), &cfg).unwrap();
            let stepped = eval_phi(&pgf, pgf.evaluate(w), &cfg).unwrap()
                * (-(z + 1.0) * pgf.log_p1()).exp();
            let direct = eval_kstar(&pgf, z, &cfg).unwrap();
            assert!((stepped - direct).norm() < 10.0 * cfg.tol, "example {i} z={z}");
        }
    }
}

#[test]
fn kstar_real_symmetry() {
    let cfg = cfg();
    for i in 0..3 {
        let pgf = example(i);
        for z in strip_points(&pgf) {
            let a = eval_kstar(&pgf, z.conj(), &cfg).unwrap();
            let b = eval_kstar(&pgf, z, &cfg).unwrap().conj();
            assert!((a - b).norm() < 10.0 * cfg.tol);
        }
    }
}

#[test]
fn psi_matches_inverse_of_pi() {
    // Taylor coefficients of Psi(1 - u) from a Cauchy integral of the
    // numerically inverted Poincare function
    for i in 0..3 {
        let pgf = example(i);
        let psi = psi_expansion(&pgf, 5).unwrap();
        let oracle = cauchy_coeffs(|u| psi_by_inversion(&pgf, c(1.0, 0.0) - u), 0.05, 64, 5);
        assert!(oracle[0].norm() < 1e-12);
        for s in 1..5 {
            let d = (oracle[s] - psi.coeff(s)).norm();
            assert!(d < 1e-7 * psi.coeff(s).abs().max(1.0), "example {i} psi_{s}: {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pgf_contracts_unit_disk(pgf in pgf_strategy(), seed in any::<u64>()) {
        for z in random_disk_points(1000, 1.0, seed) {
            prop_assert!(pgf.evaluate(z).norm() <= z.norm() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn rebased_form_matches(pgf in pgf_strategy()) {
        for i in 0..64 {
            let z = c(i as f64 / 63.0, 0.0);
            prop_assert!((pgf.evaluate_rebased(z) - pgf.evaluate(z)).norm() < 1e-13);
        }
    }

    #[test]
    fn construction_is_deterministic(w in prop::collection::vec(0.05f64..1.0, 2..=5)) {
        let s: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / s).collect();
        let a = OffspringPgf::new(&p).unwrap();
        let b = OffspringPgf::new(&p).unwrap();
        prop_assert_eq!(a.fingerprint(), b.fingerprint());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn schroeder_holds_for_random_pgfs(pgf in pgf_strategy(), seed in any::<u64>()) {
        let cfg = cfg();
        for z in random_disk_points(20, 0.9, seed) {
            let lhs = eval_phi(&pgf, pgf.evaluate(z), &cfg).unwrap();
            let rhs = pgf.p1() * eval_phi(&pgf, z, &cfg).unwrap();
            prop_assert!((lhs - rhs).norm() < 10.0 * cfg.tol * rhs.norm().max(1.0));
        }
    }
}
