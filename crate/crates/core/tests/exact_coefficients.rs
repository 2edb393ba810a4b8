mod common;

use branchdens::exact::{exact_coeffs, exact_coeffs_cubic, oracle_coeffs, oracle_depth};
use branchdens::pgf::OffspringPgf;
use common::*;
use proptest::prelude::*;

fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs())
        .fold(0.0, f64::max)
}

#[test]
fn examples_match_oracle() {
    for i in 0..3 {
        let pgf = example(i);
        let a = exact_coeffs(&pgf, 200).unwrap();
        let b = oracle_coeffs(&pgf, 200, oracle_depth(&pgf)).unwrap();
        assert!(max_rel_dev(a.values(), b.values()) < 1e-10);
    }
}

#[test]
fn random_pgfs_match_oracle() {
    for pgf in random_pgfs(20, 7) {
        let a = exact_coeffs(&pgf, 200).unwrap();
        let b = oracle_coeffs(&pgf, 200, oracle_depth(&pgf)).unwrap();
        let d = max_rel_dev(a.values(), b.values());
        assert!(d < 1e-10, "{:?}: {d}", pgf.coeffs());
    }
}

#[test]
fn cubic_form_matches_general_recurrence() {
    for i in 0..3 {
        let pgf = example(i);
        let a = exact_coeffs(&pgf, 400).unwrap();
        let b = exact_coeffs_cubic(&pgf, 400).unwrap();
        assert!(max_rel_dev(a.values(), b.values()) < 1e-13);
    }
}

#[test]
fn odd_support_has_vanishing_even_coefficients() {
    let pgf = OffspringPgf::new(&[0.3, 0.0, 0.7]).unwrap();
    assert!(pgf.is_lattice());
    let t = exact_coeffs(&pgf, 2000).unwrap();
    for n in (2..=2000).step_by(2) {
        assert_eq!(t.phi(n), 0.0, "phi_{n}");
    }
    let cubic = exact_coeffs_cubic(&pgf, 300).unwrap();
    for n in (2..=300).step_by(2) {
        assert_eq!(cubic.phi(n), 0.0);
    }
}

#[test]
fn power_law_band() {
    for i in 0..3 {
        let pgf = example(i);
        let t = exact_coeffs(&pgf, 10_000).unwrap();
        let scaled: Vec<f64> = (100..=10_000)
            .map(|n| t.phi(n) * (n as f64).powf(1.0 - pgf.kappa()))
            .collect();
        let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.5 && hi < 5.0 && hi / lo < 1.25, "example {i}: [{lo}, {hi}]");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recurrence_agrees_with_composition(pgf in pgf_strategy()) {
        let a = exact_coeffs(&pgf, 120).unwrap();
        let b = oracle_coeffs(&pgf, 120, oracle_depth(&pgf)).unwrap();
        prop_assert!(max_rel_dev(a.values(), b.values()) < 1e-10);
    }

    #[test]
    fn coefficients_are_positive_with_full_support(pgf in pgf_strategy()) {
        let t = exact_coeffs(&pgf, 150).unwrap();
        prop_assert_eq!(t.phi(1), 1.0);
        prop_assert!(t.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn prefix_is_stable_under_longer_tables(pgf in pgf_strategy(), n in 2usize..80) {
        let short = exact_coeffs(&pgf, n).unwrap();
        let long = exact_coeffs(&pgf, 2 * n).unwrap();
        prop_assert_eq!(short.values(), &long.values()[..n]);
    }
}
