mod common;

use branchdens::dynamics::{eval_kstar, IterationConfig};
use branchdens::exec::Execution;
use branchdens::fourier::{compute_spectrum, compute_spectrum_with, theta, SpectrumOptions};
use common::*;

#[test]
fn theta0_matches_real_line_mean() {
    // independent fine-grid average of K* on one period
    let cfg = IterationConfig::default();
    for i in 0..3 {
        let pgf = example(i);
        let spec = compute_spectrum(&pgf, 4, 1.0, &cfg).unwrap();
        let n = 1000;
        let mean: f64 = (0..n)
            .map(|j| eval_kstar(&pgf, c(j as f64 / n as f64, 0.0), &cfg).unwrap().re)
            .sum::<f64>()
            / n as f64;
        assert!((spec.theta0 - mean).abs() < 1e-12, "example {i}");
        assert!(spec.theta0 > 0.0);
    }
}

#[test]
fn unscaled_coefficients_do_not_depend_on_shift() {
    let cfg = IterationConfig::default();
    for i in 0..3 {
        let pgf = example(i);
        let a = compute_spectrum(&pgf, 4, 1.0, &cfg).unwrap();
        let b = compute_spectrum(&pgf, 4, 0.8, &cfg).unwrap();
        for m in 1..=2i64 {
            let (ta, tb) = (theta(&a, m).unwrap(), theta(&b, m).unwrap());
            assert!(rel_err(ta, tb) < 1e-8, "example {i} m={m}: {ta} vs {tb}");
        }
    }
}

#[test]
fn coefficients_obey_cauchy_bound() {
    let cfg = IterationConfig::default();
    for i in 0..3 {
        let pgf = example(i);
        let spec = compute_spectrum(&pgf, 8, 1.0, &cfg).unwrap();
        for m in 1..=8 {
            let t = theta(&spec, m as i64).unwrap().norm();
            assert!(t <= spec.sup_norm * (-spec.log_scale(m)).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn negative_indices_are_conjugates() {
    let spec = compute_spectrum(&example(1), 3, 1.0, &IterationConfig::default()).unwrap();
    for m in 1..=3 {
        assert_eq!(theta(&spec, -m).unwrap(), theta(&spec, m).unwrap().conj());
    }
    assert!(theta(&spec, 4).is_err());
}

#[test]
fn execution_strategy_does_not_change_results() {
    let cfg = IterationConfig::default();
    for i in 0..3 {
        let pgf = example(i);
        let mut opts = SpectrumOptions {
            m_max: 6,
            ..SpectrumOptions::default()
        };
        opts.execution = Execution::Sequential;
        let a = compute_spectrum_with(&pgf, &opts, &cfg).unwrap();
        opts.execution = Execution::Parallel;
        let b = compute_spectrum_with(&pgf, &opts, &cfg).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn random_distributions_converge() {
    let cfg = IterationConfig::default();
    for pgf in random_pgfs(6, 99) {
        let spec = compute_spectrum(&pgf, 4, 0.9, &cfg).unwrap();
        assert!(spec.converged, "{:?}", pgf.coeffs());
        assert!(spec.theta0 > 0.0);
    }
}
