//! Offspring distributions with no extinction (`p0 = 0`) and the constants
//! derived from them.
//!
//! The generating function is the polynomial `P(z) = p1 z + ... + pN z^N`.
//! Besides the mean `E = P'(1)` the other modules need the rebased form
//! around `z = 1`,
//!
//! ```text
//! P(z) = 1 - E (1 - z) + q2 (1 - z)^2 + ... + qN (1 - z)^N,
//! ```
//!
//! and the power-law exponent `kappa = -ln p1 / ln E`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on `sum p_j = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A validated offspring distribution `p1..pN` with `p0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringPgf {
    coeffs: Vec<f64>,
    mean: f64,
    second_factorial_moment: f64,
    q_coeffs: Vec<f64>,
    log_p1: f64,
    log_mean: f64,
    kappa: f64,
    lattice: bool,
    warnings: Vec<String>,
}

impl OffspringPgf {
    /// Validates `probs = [p1, ..., pN]` and precomputes the derived constants.
    ///
    /// A probability sum within [`SUM_TOLERANCE`] of one is renormalized;
    /// anything further off is rejected. Trailing zeros are dropped. A zero
    /// interior coefficient is accepted with a warning: the exact recurrence
    /// stays valid but the spectral approximations are unreliable for such
    /// lattice-like supports.
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::DegenerateDegree(probs.len()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "p{} = {} is not a nonnegative finite number",
                i + 1,
                p
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        let mut coeffs: Vec<f64> = probs.iter().map(|p| p / sum).collect();
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        let p1 = coeffs[0];
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "p1 = {p1} must lie strictly between 0 and 1"
            )));
        }
        let degree = coeffs.len();
        if degree < 2 {
            return Err(Error::DegenerateDegree(degree));
        }

        let mean: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum();
        let second_factorial_moment: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let j = (i + 1) as f64;
                j * (j - 1.0) * p
            })
            .sum();
        if mean <= 1.0 {
            return Err(Error::InvalidDistribution(format!(
                "mean {mean} must exceed 1"
            )));
        }

        // q_i = (-1)^i sum_{j >= i} C(j, i) p_j
        let q_coeffs = (2..=degree)
            .map(|i| {
                let s: f64 = (i..=degree).map(|j| binomial(j, i) * coeffs[j - 1]).sum();
                if i % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();

        let log_p1 = p1.ln();
        let log_mean = mean.ln();
        let kappa = -log_p1 / log_mean;

        let zero_interior: Vec<usize> = (2..degree).filter(|&j| coeffs[j - 1] == 0.0).collect();
        let lattice = !zero_interior.is_empty();
        let mut warnings = Vec::new();
        if lattice {
            let span = (2..=degree)
                .filter(|&j| coeffs[j - 1] > 0.0)
                .fold(0, |g, j| gcd(g, j - 1));
            warnings.push(format!(
                "zero interior coefficients at j = {zero_interior:?} (support span {span}); \
                 spectral approximations are unreliable for this distribution"
            ));
        }

        Ok(Self {
            coeffs,
            mean,
            second_factorial_moment,
            q_coeffs,
            log_p1,
            log_mean,
            kappa,
            lattice,
            warnings,
        })
    }

    /// `p1..pN`, index 0 holding `p1`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Probability `p_j`; zero outside `1..=N`.
    pub fn p(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.coeffs.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn p1(&self) -> f64 {
        self.coeffs[0]
    }

    /// Polynomial degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `E = P'(1)`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `P''(1)`.
    pub fn second_factorial_moment(&self) -> f64 {
        self.second_factorial_moment
    }

    /// `q2..qN`, index 0 holding `q2`.
    pub fn q_coeffs(&self) -> &[f64] {
        &self.q_coeffs
    }

    /// `q_j` for `2 <= j <= N`, zero otherwise.
    pub fn q(&self, j: usize) -> f64 {
        if j < 2 {
            0.0
        } else {
            self.q_coeffs.get(j - 2).copied().unwrap_or(0.0)
        }
    }

    pub fn log_p1(&self) -> f64 {
        self.log_p1
    }

    pub fn log_mean(&self) -> f64 {
        self.log_mean
    }

    /// `kappa = -ln p1 / ln E`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// True when some interior coefficient vanishes.
    pub fn is_lattice(&self) -> bool {
        self.lattice
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `P(z)` by Horner's rule.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &p| (acc + p) * z)
    }

    pub fn evaluate_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &p| (acc + p) * x)
    }

    /// `P'(z)`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &p)| {
                acc * z + p * (i + 1) as f64
            })
    }

    /// Evaluates the rebased form `1 - E u + sum q_j u^j` at `u = 1 - z`.
    pub fn evaluate_rebased(&self, z: Complex64) -> Complex64 {
        let u = Complex64::new(1.0, 0.0) - z;
        let tail = self
            .q_coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &q| (acc + q) * u);
        // tail = q2 u + q3 u^2 + ..., one power of u short
        Complex64::new(1.0, 0.0) - u * self.mean + tail * u
    }

    /// Short stable identifier of the distribution, used to tag outputs.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for p in &self.coeffs {
            for b in p.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        format!("{h:016x}")
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn example_constants() {
        let p = OffspringPgf::new(&[0.2, 0.6, 0.2]).unwrap();
        assert!((p.mean() - 2.0).abs() < 1e-15);
        assert!((p.second_factorial_moment() - 2.4).abs() < 1e-15);
        assert!((p.kappa() - 2.321928094887362).abs() < 1e-12);
        assert!((p.q(2) - 1.2).abs() < 1e-15);
        assert!((p.q(3) + 0.2).abs() < 1e-15);
        assert!(!p.is_lattice());

        let p = OffspringPgf::new(&[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(p.mean(), 2.0);
        assert!((p.kappa() - 2.0).abs() < 1e-15);

        let p = OffspringPgf::new(&[0.5, 0.5]).unwrap();
        assert!((p.mean() - 1.5).abs() < 1e-15);
        assert!((p.second_factorial_moment() - 1.0).abs() < 1e-15);
        assert!((p.kappa() - 2f64.ln() / 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn lattice_support_warns() {
        let p = OffspringPgf::new(&[0.2, 0.0, 0.8]).unwrap();
        assert!(p.is_lattice());
        assert_eq!(p.warnings().len(), 1);
        assert!(p.warnings()[0].contains("span 2"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            OffspringPgf::new(&[0.5]),
            Err(Error::DegenerateDegree(1))
        ));
        assert!(matches!(
            OffspringPgf::new(&[-0.1, 1.1]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            OffspringPgf::new(&[0.2, 0.6, 0.3]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            OffspringPgf::new(&[0.0, 1.0]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            OffspringPgf::new(&[1.0, 0.0]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let p = OffspringPgf::new(&[0.2, 0.6, 0.2 + 5e-13]).unwrap();
        let s: f64 = p.coeffs().iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let p = OffspringPgf::new(&[0.2, 0.6, 0.2]).unwrap();
        assert!((p.evaluate(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.evaluate(c(0.0, 0.0)), c(0.0, 0.0));
        assert!((p.evaluate(c(0.5, 0.0)).re - 0.275).abs() < 1e-15);
        assert!((p.evaluate_real(0.5) - 0.275).abs() < 1e-15);
    }

    #[test]
    fn rebasing_matches_on_unit_interval() {
        for probs in [
            vec![0.2, 0.6, 0.2],
            vec![0.1, 0.5, 0.4],
            vec![0.1, 0.2, 0.3, 0.25, 0.15],
        ] {
            let p = OffspringPgf::new(&probs).unwrap();
            for i in 0..64 {
                let z = c(i as f64 / 63.0, 0.0);
                assert!((p.evaluate(z) - p.evaluate_rebased(z)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_at_one_is_mean() {
        let p = OffspringPgf::new(&[0.1, 0.5, 0.4]).unwrap();
        assert!((p.derivative(c(1.0, 0.0)).re - p.mean()).abs() < 1e-14);
    }
}
