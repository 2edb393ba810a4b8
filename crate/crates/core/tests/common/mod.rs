#![allow(dead_code)]

use branchdens::dynamics::{eval_pi, IterationConfig};
use branchdens::pgf::OffspringPgf;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLES: [[f64; 3]; 3] = [[0.2, 0.6, 0.2], [0.1, 0.5, 0.4], [0.25, 0.5, 0.25]];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn example(i: usize) -> OffspringPgf {
    OffspringPgf::new(&EXAMPLES[i]).unwrap()
}

fn normalized(weights: &[f64]) -> Vec<f64> {
    let s: f64 = weights.iter().sum();
    weights.iter().map(|w| w / s).collect()
}

/// Degree 2..=5, every coefficient at least 5% of the unnormalized mass.
pub fn random_pgfs(count: usize, seed: u64) -> Vec<OffspringPgf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(2..=5);
            let w: Vec<f64> = (0..degree).map(|_| rng.gen_range(0.05..1.0)).collect();
            OffspringPgf::new(&normalized(&w)).unwrap()
        })
        .collect()
}

pub fn pgf_strategy() -> impl Strategy<Value = OffspringPgf> {
    prop::collection::vec(0.05f64..1.0, 2..=5)
        .prop_map(|w| OffspringPgf::new(&normalized(&w)).unwrap())
}

/// `C(k, n)` as the plain product `prod (k - j) / (j + 1)`.
pub fn direct_binom(k: Complex64, n: usize) -> Complex64 {
    (0..n).fold(c(1.0, 0.0), |acc, j| acc * (k - j as f64) / (j + 1) as f64)
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `Psi(z)` as the root of `Pi(w) = z` near `w = 1 - z`, by Newton's method
/// with a central-difference derivative.
pub fn psi_by_inversion(pgf: &OffspringPgf, z: Complex64) -> Complex64 {
    let cfg = IterationConfig::default();
    let target = z;
    let mut w = c(1.0, 0.0) - z;
    let h = 1e-5;
    for _ in 0..60 {
        let f = eval_pi(pgf, w, &cfg).unwrap() - target;
        let d = (eval_pi(pgf, w + h, &cfg).unwrap() - eval_pi(pgf, w - h, &cfg).unwrap()) / (2.0 * h);
        let step = f / d;
        w -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    w
}

/// First `count` Taylor coefficients of `f` at 0 from `points` samples on
/// the circle of radius `r`.
pub fn cauchy_coeffs(
    f: impl Fn(Complex64) -> Complex64,
    r: f64,
    points: usize,
    count: usize,
) -> Vec<Complex64> {
    let samples: Vec<(Complex64, Complex64)> = (0..points)
        .map(|l| {
            let u = Complex64::from_polar(r, std::f64::consts::TAU * l as f64 / points as f64);
            (u, f(u))
        })
        .collect();
    (0..count)
        .map(|j| {
            samples
                .iter()
                .map(|(u, v)| v * u.powi(-(j as i32)))
                .sum::<Complex64>()
                / points as f64
        })
        .collect()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

pub fn random_disk_points(count: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}
