//! Point evaluation of the functional-equation solutions.
//!
//! * `Phi` solves the Schröder equation `Phi(P(z)) = p1 Phi(z)` at the
//!   attracting fixed point 0, normalized by `Phi(0) = 0, Phi'(0) = 1`.
//!   Its Taylor coefficients are the densities `phi_n`.
//! * `Pi` solves the Poincaré equation `P(Pi(z)) = Pi(E z)` with
//!   `Pi(0) = 1, Pi'(0) = -1`; it inverts the Schröder solution `Psi` at
//!   the repelling fixed point 1.
//! * `K*(z) = Phi(Pi(E^z)) p1^{-z}` is 1-periodic and carries the
//!   near-constancy oscillations.
//!
//! `Psi` itself is only needed as a Taylor expansion in `u = 1 - z`, see
//! [`psi_expansion`].

use num_complex::Complex64;
use serde::Serialize;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::pgf::OffspringPgf;
use crate::powerseries::TruncatedSeries;

/// Stopping rules shared by the `Phi` and `Pi` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationConfig {
    /// Stop once the increment drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// `|Phi_t|` above this is treated as escape from the filled Julia set.
    pub guard_radius: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 10_000,
            guard_radius: 1e10,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        if !(self.guard_radius > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "guard_radius must exceed 1, got {}",
                self.guard_radius
            )));
        }
        Ok(())
    }
}

fn fmt_z(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// `Phi(z)` via `Phi_{t+1} = Phi_t + sum_j p_j p1^{(j-1)t-1} Phi_t^j`.
///
/// `Phi_t = p1^{-t} P^t(z)`, so the increment at step `t` equals
/// `(Phi_t / p1) sum_{j>=2} p_j w^{j-1}` with `w = p1^t Phi_t = P^t(z)`.
pub fn eval_phi(pgf: &OffspringPgf, z: Complex64, cfg: &IterationConfig) -> Result<Complex64> {
    let p1 = pgf.p1();
    // p_j / p1 for j >= 2, highest degree first for Horner
    let ratios: Vec<f64> = pgf.coeffs()[1..].iter().rev().map(|p| p / p1).collect();
    let mut phi = z;
    let mut p1_pow = 1.0; // p1^t
    for t in 0..cfg.max_iter {
        let w = phi * p1_pow;
        // sum_{j>=2} (p_j/p1) w^{j-1}
        let tail = ratios
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &r| (acc + r) * w);
        let inc = phi * tail;
        phi += inc;
        if !phi.is_finite() || phi.norm() > cfg.guard_radius {
            return Err(Error::DivergenceDetected {
                z: fmt_z(z),
                iterations: t + 1,
            });
        }
        if inc.norm() < cfg.tol {
            return Ok(phi);
        }
        p1_pow *= p1;
    }
    Err(Error::MaxIterExceeded {
        z: fmt_z(z),
        max_iter: cfg.max_iter,
    })
}

/// Number of inner maps needed by [`eval_pi`] at `z`.
pub fn pi_depth(pgf: &OffspringPgf, z: Complex64, cfg: &IterationConfig) -> usize {
    let e = pgf.mean();
    let qmax = pgf.q_coeffs().iter().fold(0.0f64, |m, q| m.max(q.abs()));
    if qmax == 0.0 {
        return 1;
    }
    // E^{-T} qmax (1+|z|)^N < tol, plus three extra decades since the outer
    // maps can amplify the truncation error by |Pi'|.
    let log_bound = qmax.ln() + pgf.degree() as f64 * (1.0 + z.norm()).ln() - cfg.tol.ln();
    let base = (log_bound / e.ln()).ceil().max(0.0) as usize;
    base + (3.0 * 10f64.ln() / e.ln()).ceil() as usize + 1
}

/// `Pi(z) = 1 - h_0(h_1(...h_{T-1}(z)))` with the near-identity maps
/// `h_t(w) = w - sum_j q_j E^{-(j-1)t-j} w^j`, innermost applied first.
pub fn eval_pi(pgf: &OffspringPgf, z: Complex64, cfg: &IterationConfig) -> Result<Complex64> {
    let depth = pi_depth(pgf, z, cfg);
    if depth > cfg.max_iter {
        return Err(Error::MaxIterExceeded {
            z: fmt_z(z),
            max_iter: cfg.max_iter,
        });
    }
    // The composition runs in double-double: with |Pi| in the hundreds the
    // accumulated f64 rounding alone exceeds the residual tolerance.
    let inv_e = Dd::new(pgf.mean()).recip();
    // q_j E^{-j}, highest degree first
    let mut scaled_q = Vec::with_capacity(pgf.q_coeffs().len());
    let mut e_pow = inv_e;
    for q in pgf.q_coeffs() {
        e_pow = e_pow * inv_e;
        scaled_q.push(Dd::new(*q) * e_pow);
    }
    scaled_q.reverse();
    let mut a_pows = Vec::with_capacity(depth);
    let mut a = Dd::ONE;
    for _ in 0..depth {
        a_pows.push(a);
        a = a * inv_e;
    }
    let mut w = CDd::new(z);
    for a in a_pows.iter().rev() {
        let aw = w.scale(*a);
        // sum_j q_j E^{-j} (a w)^{j-1}, j >= 2
        let tail = scaled_q
            .iter()
            .fold(CDd::new(Complex64::new(0.0, 0.0)), |acc, &q| acc.add_real(q) * aw);
        w = w - w * tail;
    }
    Ok((CDd::new(Complex64::new(1.0, 0.0)) - w).to_c64())
}

/// `K*(z) = Phi(Pi(E^z)) exp(-z ln p1)`.
pub fn eval_kstar(pgf: &OffspringPgf, z: Complex64, cfg: &IterationConfig) -> Result<Complex64> {
    let ez = (z * pgf.log_mean()).exp();
    let w = eval_pi(pgf, ez, cfg)?;
    let phi = eval_phi(pgf, w, cfg)?;
    Ok(phi * (-z * pgf.log_p1()).exp())
}

/// Taylor coefficients of `Psi(z) = sum_{s>=1} psi_s (1 - z)^s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiExpansion {
    psi: Vec<f64>,
}

impl PsiExpansion {
    /// Highest computed power `R`.
    pub fn order(&self) -> usize {
        self.psi.len()
    }

    /// `psi_s` for `1 <= s <= R`.
    pub fn coeff(&self, s: usize) -> f64 {
        assert!(s >= 1 && s <= self.psi.len(), "psi index {s} out of range");
        self.psi[s - 1]
    }

    /// `psi_1..psi_R`.
    pub fn coeffs(&self) -> &[f64] {
        &self.psi
    }

    /// `Psi(z) / (1 - z) = 1 + psi_2 u + ... + psi_{J+1} u^J` as a series in `u`.
    pub fn ratio_series(&self, j_max: usize) -> Result<TruncatedSeries<f64>> {
        if self.psi.len() < j_max + 1 {
            return Err(Error::InsufficientPsiOrder {
                have: self.psi.len(),
                need: j_max + 1,
            });
        }
        Ok(TruncatedSeries::new(self.psi[..=j_max].to_vec()))
    }

    /// Evaluates the truncated expansion at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let u = Complex64::new(1.0, 0.0) - z;
        self.psi
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| (acc + c) * u)
    }
}

/// Solves `Psi(P(z)) = E Psi(z)` order by order in `u = 1 - z`.
///
/// With `U(u) = 1 - P(1 - u) = E u - sum q_j u^j`, matching `u^s` gives
/// `psi_s (E - E^s) = sum_{r<s} psi_r [u^s] U^r`.
pub fn psi_expansion(pgf: &OffspringPgf, order: usize) -> Result<PsiExpansion> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "psi expansion order must be >= 2, got {order}"
        )));
    }
    let e = pgf.mean();
    let mut u_poly = vec![0.0, e];
    u_poly.extend(pgf.q_coeffs().iter().map(|q| -q));

    let mut psi = Vec::with_capacity(order);
    let mut acc = TruncatedSeries::<f64>::zero(order);
    let mut power = TruncatedSeries::from_slice(&u_poly, order); // U^s
    for s in 1..=order {
        let value = if s == 1 {
            1.0
        } else {
            acc.coeff(s) / (e - e.powi(s as i32))
        };
        psi.push(value);
        acc = acc.add(&power.scale(value))?;
        power = power.multiply_poly(&u_poly);
    }
    Ok(PsiExpansion { psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example1() -> OffspringPgf {
        OffspringPgf::new(&[0.2, 0.6, 0.2]).unwrap()
    }

    fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
        let r = radius * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, a)
    }

    #[test]
    fn phi_fixed_point() {
        let cfg = IterationConfig::default();
        assert_eq!(eval_phi(&example1(), c(0.0, 0.0), &cfg).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn phi_detects_escape() {
        let cfg = IterationConfig::default();
        let pgf = OffspringPgf::new(&[0.1, 0.5, 0.4]).unwrap();
        assert!(matches!(
            eval_phi(&pgf, c(3.0, 0.0), &cfg),
            Err(Error::DivergenceDetected { .. })
        ));
    }

    #[test]
    fn phi_reports_slow_convergence() {
        let cfg = IterationConfig {
            max_iter: 3,
            ..Default::default()
        };
        assert!(matches!(
            eval_phi(&example1(), c(0.9, 0.0), &cfg),
            Err(Error::MaxIterExceeded { .. })
        ));
    }

    #[test]
    fn schroeder_residual() {
        let cfg = IterationConfig::default();
        let pgf = example1();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = random_disk(&mut rng, 0.9);
            let lhs = eval_phi(&pgf, pgf.evaluate(z), &cfg).unwrap();
            let rhs = eval_phi(&pgf, z, &cfg).unwrap() * pgf.p1();
            assert!((lhs - rhs).norm() < 10.0 * cfg.tol, "z = {z}");
        }
    }

    #[test]
    fn phi_second_taylor_coefficient() {
        // Cauchy integral on |z| = 0.1
        let cfg = IterationConfig::default();
        let pgf = example1();
        let n = 64;
        let r = 0.1;
        let mut acc = c(0.0, 0.0);
        for k in 0..n {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            let z = Complex64::from_polar(r, a);
            acc += eval_phi(&pgf, z, &cfg).unwrap() * Complex64::from_polar(1.0, -2.0 * a);
        }
        let phi2 = acc / (n as f64 * r * r);
        assert!((phi2.re - 3.75).abs() < 1e-9, "{phi2}");
    }

    #[test]
    fn pi_normalization() {
        let cfg = IterationConfig::default();
        let pgf = example1();
        assert!((eval_pi(&pgf, c(0.0, 0.0), &cfg).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let h = 1e-6;
        let d = (eval_pi(&pgf, c(h, 0.0), &cfg).unwrap() - eval_pi(&pgf, c(-h, 0.0), &cfg).unwrap())
            / (2.0 * h);
        assert!((d - c(-1.0, 0.0)).norm() < 1e-8, "{d}");
    }

    #[test]
    fn poincare_residual() {
        let cfg = IterationConfig::default();
        let pgf = example1();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z = random_disk(&mut rng, 2.0);
            let lhs = pgf.evaluate(eval_pi(&pgf, z, &cfg).unwrap());
            let rhs = eval_pi(&pgf, z * pgf.mean(), &cfg).unwrap();
            assert!((lhs - rhs).norm() < 10.0 * cfg.tol, "z = {z}: {}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn kstar_periodic_and_real() {
        let cfg = IterationConfig::default();
        let pgf = example1();
        let mut mean = 0.0;
        let n = 64;
        for i in 0..n {
            let x = i as f64 / n as f64;
            let k0 = eval_kstar(&pgf, c(x, 0.0), &cfg).unwrap();
            let k1 = eval_kstar(&pgf, c(x + 1.0, 0.0), &cfg).unwrap();
            assert!((k1 - k0).norm() < 10.0 * cfg.tol);
            assert!(k0.im.abs() < 1e-13);
            mean += k0.re / n as f64;
        }
        assert!((mean - 1.94).abs() < 0.01, "{mean}");
    }

    #[test]
    fn psi_low_orders() {
        let psi = psi_expansion(&example1(), 6).unwrap();
        assert_eq!(psi.coeff(1), 1.0);
        assert!((psi.coeff(2) - 0.6).abs() < 1e-15);
        assert!(psi_expansion(&example1(), 1).is_err());
        assert!(matches!(
            psi.ratio_series(6),
            Err(Error::InsufficientPsiOrder { have: 6, need: 7 })
        ));
    }

    #[test]
    fn psi_satisfies_functional_equation_near_one() {
        let pgf = example1();
        let psi = psi_expansion(&pgf, 40).unwrap();
        for z in [c(0.98, 0.0), c(0.99, 0.01), c(1.0, -0.02)] {
            let lhs = psi.eval(pgf.evaluate(z));
            let rhs = psi.eval(z) * pgf.mean();
            assert!((lhs - rhs).norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(IterationConfig::default().validate().is_ok());
        let bad = IterationConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IterationConfig {
            guard_radius: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
