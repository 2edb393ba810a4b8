//! Exact Taylor coefficients `phi_n` of the Schröder solution `Phi`.
//!
//! Extracting `[z^r]` from `sum_n phi_n P(z)^n = p1 sum_n phi_n z^n` gives
//!
//! ```text
//! phi_r = sum_{n<r} phi_n [z^r] P^n / (p1 - p1^r),    phi_1 = 1.
//! ```
//!
//! [`exact_coeffs`] runs this for any polynomial degree, building `P^n`
//! incrementally. [`exact_coeffs_cubic`] is the closed-form cubic variant
//! and [`oracle_coeffs`] composes `P` with itself as a truncated series; both
//! exist to cross-check the general recurrence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pgf::OffspringPgf;
use crate::powerseries::TruncatedSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMethod {
    Recurrence,
    Oracle,
    CubicClosedForm,
}

/// `phi_1..phi_{n_max}` together with how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    values: Vec<f64>,
    method: CoefficientMethod,
    pgf_hash: String,
}

impl CoefficientTable {
    /// `phi_1..phi_{n_max}`; index 0 holds `phi_1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `phi_n` for `1 <= n <= n_max`.
    pub fn phi(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn method(&self) -> CoefficientMethod {
        self.method
    }

    pub fn pgf_hash(&self) -> &str {
        &self.pgf_hash
    }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    Ok(())
}

/// Denominator `p1 - p1^r`, rejected once it carries no significant digits.
fn denominator(p1: f64, r: usize) -> Result<f64> {
    let d = p1 - p1.powi(r as i32);
    if !(d > 64.0 * f64::EPSILON * p1) {
        return Err(Error::IllConditioned {
            n: r,
            denominator: d,
        });
    }
    Ok(d)
}

/// Exact `phi_1..phi_{n_max}` by the general recurrence.
///
/// `acc` holds `sum_{n < r} phi_n P^n` truncated at `n_max`; its `z^r`
/// coefficient is complete by the time `phi_r` is needed because `P^n` has
/// no terms below `z^n`. Time O(n_max^2 N), memory O(n_max).
pub fn exact_coeffs(pgf: &OffspringPgf, n_max: usize) -> Result<CoefficientTable> {
    check_n_max(n_max)?;
    let p1 = pgf.p1();
    let mut poly = vec![0.0];
    poly.extend_from_slice(pgf.coeffs());

    let mut values = Vec::with_capacity(n_max);
    let mut acc = vec![0.0; n_max + 1];
    let mut power = TruncatedSeries::from_slice(&poly, n_max);
    for r in 1..=n_max {
        let phi = if r == 1 {
            1.0
        } else {
            acc[r] / denominator(p1, r)?
        };
        values.push(phi);
        if r == n_max {
            break;
        }
        for (a, c) in acc.iter_mut().zip(power.coeffs()).skip(r + 1) {
            *a += phi * c;
        }
        power = power.multiply_poly(&poly);
    }
    Ok(CoefficientTable {
        values,
        method: CoefficientMethod::Recurrence,
        pgf_hash: pgf.fingerprint(),
    })
}

/// `C(n, k)` by the multiplicative formula.
fn choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `c_{n,r} = [z^r] (p1 z + p2 z^2 + p3 z^3)^n` from the multinomial sum
/// over `k` with `a = 2n + k - r` linear, `b = r - n - 2k` quadratic and `k`
/// cubic factors.
pub fn cubic_c(pgf: &OffspringPgf, n: usize, r: usize) -> Result<f64> {
    if pgf.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: pgf.degree(),
        });
    }
    if r < n || r > 3 * n {
        return Ok(0.0);
    }
    let (p1, p2, p3) = (pgf.p(1), pgf.p(2), pgf.p(3));
    let (n_i, r_i) = (n as i64, r as i64);
    let mut total = 0.0;
    for k in 0..=((r - n) / 2) as i64 {
        let a = 2 * n_i + k - r_i;
        let b = r_i - n_i - 2 * k;
        if a < 0 || b < 0 {
            continue;
        }
        let (a, b, k) = (a as usize, b as usize, k as usize);
        // n! / (a! b! k!) = C(n, k) C(n - k, b)
        let multinomial = choose(n, k) * choose(n - k, b);
        total += multinomial * p1.powi(a as i32) * p2.powi(b as i32) * p3.powi(k as i32);
    }
    Ok(total)
}

/// `phi_n = (p1 - p1^n)^{-1} sum_{j=1}^{floor(2n/3)} c_{n-j,n} phi_{n-j}`.
pub fn exact_coeffs_cubic(pgf: &OffspringPgf, n_max: usize) -> Result<CoefficientTable> {
    check_n_max(n_max)?;
    if pgf.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: pgf.degree(),
        });
    }
    let p1 = pgf.p1();
    let mut values = vec![1.0];
    for n in 2..=n_max {
        let mut s = 0.0;
        for j in 1..=(2 * n / 3) {
            s += cubic_c(pgf, n - j, n)? * values[n - j - 1];
        }
        values.push(s / denominator(p1, n)?);
    }
    Ok(CoefficientTable {
        values,
        method: CoefficientMethod::CubicClosedForm,
        pgf_hash: pgf.fingerprint(),
    })
}

/// Smallest depth that satisfies the oracle's convergence rule, at least 60.
pub fn oracle_depth(pgf: &OffspringPgf) -> usize {
    let needed = (1e-17f64).ln() / pgf.p1().ln();
    60.max(needed.ceil() as usize + 10)
}

/// `phi_n` from the truncated series `p1^{-t} P^{(t)}(z)` with `t = iterations`.
///
/// The series is carried in the rescaled form
/// `S_{t+1} = sum_j p_j p1^{(j-1) t - 1} S_t^j`, which equals
/// `p1^{-t-1} P(P^{(t)})` without the underflow of `P^{(t)}` itself.
pub fn oracle_coeffs(pgf: &OffspringPgf, n_max: usize, iterations: usize) -> Result<CoefficientTable> {
    check_n_max(n_max)?;
    let p1 = pgf.p1();
    let mut s = TruncatedSeries::<f64>::variable(n_max);
    for t in 0..iterations {
        // sum_j p_j p1^{(j-1)t-1} S^j by Horner in S
        let mut acc = TruncatedSeries::<f64>::zero(n_max);
        for j in (1..=pgf.degree()).rev() {
            let w = pgf.p(j) * p1.powf((j as f64 - 1.0) * t as f64 - 1.0);
            let mut c = acc.coeffs().to_vec();
            c[0] += w;
            acc = TruncatedSeries::new(c).multiply(&s)?;
        }
        s = acc;
    }
    Ok(CoefficientTable {
        values: s.coeffs()[1..].to_vec(),
        method: CoefficientMethod::Oracle,
        pgf_hash: pgf.fingerprint(),
    })
}
