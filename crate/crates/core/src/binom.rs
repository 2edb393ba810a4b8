//! Log-gamma, generalized binomial coefficients at complex upper argument,
//! and the polynomials `S_2r` of the large-`n` binomial expansion
//!
//! ```text
//! (-1)^n C(k, n) = n^{-k-1} / Gamma(-k) * sum_r S_2r(k) / n^r.
//! ```

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Reduces the imaginary part into `(-pi, pi]`.
fn principal(z: Complex64) -> Complex64 {
    Complex64::new(z.re, wrap_angle(z.im))
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a - TAU * (a / TAU).round();
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `Log Gamma(z)` with the imaginary part reduced to `(-pi, pi]`.
///
/// Lanczos approximation (g = 7, nine terms) on `Re z >= 1/2` and the
/// reflection formula elsewhere.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleAtNonpositiveInteger(format!("{z}")));
    }
    Ok(principal(log_gamma_unwrapped(z)))
}

fn log_gamma_unwrapped(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - log_gamma_unwrapped(one - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + x.ln() + LN_SQRT_2PI
}

/// A logarithm of `sin(pi z)` that does not overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| <= 1
    let i = Complex64::new(0.0, 1.0);
    let e2 = (i * TAU * z).exp();
    -i * PI * z + ((e2 - 1.0) / (2.0 * i)).ln()
}

/// `1 / Gamma(z)`, entire; exactly zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    (-log_gamma_unwrapped(z)).exp()
}

/// `log C(k, n)` as the sum of `log((k - j) / (j + 1))` over `j < n`, with
/// the imaginary part kept in `(-pi, pi]`. `None` when the binomial is zero
/// (`k` a nonnegative integer below `n`).
pub fn log_binom_complex(k: Complex64, n: usize) -> Option<Complex64> {
    let mut re = 0.0;
    let mut im = 0.0;
    for j in 0..n {
        let factor = (k - j as f64) / (j + 1) as f64;
        if factor == Complex64::new(0.0, 0.0) {
            return None;
        }
        let l = factor.ln();
        re += l.re;
        im = wrap_angle(im + l.im);
    }
    Some(Complex64::new(re, im))
}

/// [`log_binom_complex`] at every `n` in `ns` from a single pass up to
/// `max(ns)`. Values are bit-identical to the one-at-a-time path.
pub fn log_binom_batch(k: Complex64, ns: &[usize]) -> Vec<Option<Complex64>> {
    let mut order: Vec<usize> = (0..ns.len()).collect();
    order.sort_by_key(|&i| ns[i]);
    let mut out = vec![None; ns.len()];
    let (mut re, mut im) = (0.0, 0.0);
    let mut j = 0;
    let mut zero = false;
    for i in order {
        while j < ns[i] && !zero {
            let factor = (k - j as f64) / (j + 1) as f64;
            if factor == Complex64::new(0.0, 0.0) {
                zero = true;
                break;
            }
            let l = factor.ln();
            re += l.re;
            im = wrap_angle(im + l.im);
            j += 1;
        }
        if !zero {
            out[i] = Some(Complex64::new(re, im));
        }
    }
    out
}

/// `C(k, n) = k (k-1) ... (k-n+1) / n!` evaluated in log space.
pub fn binom_complex(k: Complex64, n: usize) -> Complex64 {
    match log_binom_complex(k, n) {
        Some(l) => l.exp(),
        None => Complex64::new(0.0, 0.0),
    }
}

/// `C(k, n) * theta` where `sigma = e^{scale} theta` is a pre-scaled
/// Fourier coefficient. The scale is removed inside the exponent, so neither
/// the tiny `theta` nor the huge `e^{scale}` is formed.
pub fn stabilized_term(k: Complex64, n: usize, sigma: Complex64, scale: f64) -> Result<Complex64> {
    stabilized_from_log(log_binom_complex(k, n), sigma, scale)
}

/// [`stabilized_term`] from a precomputed `ln C(k, n)`; `None` is an exact zero.
pub fn stabilized_from_log(log_binom: Option<Complex64>, sigma: Complex64, scale: f64) -> Result<Complex64> {
    let Some(lb) = log_binom else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let l = lb - scale;
    if l.re > 700.0 {
        return Err(Error::Overflow(l.re));
    }
    Ok(l.exp() * sigma)
}

pub type Rational = Ratio<i128>;

/// `S_2r(k)`, a polynomial of degree `2r` with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SPolynomial {
    index: usize,
    coeffs: Vec<Rational>,
}

impl SPolynomial {
    /// `r` (the polynomial is `S_{2r}`).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Ascending coefficients in `k`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        poly_degree(&self.coeffs)
    }

    pub fn eval(&self, k: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * k + c.to_f64().unwrap_or(f64::NAN)
        })
    }
}

fn poly_degree(p: &[Rational]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Vec<Rational>, p: &[Rational], s: Rational) {
    if acc.len() < p.len() {
        acc.resize(p.len(), Rational::zero());
    }
    for (a, c) in acc.iter_mut().zip(p) {
        *a += c * s;
    }
}

/// `C(-a - k, p)` as a polynomial in `k`.
fn binom_shifted(a: i128, p: usize) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for i in 0..p {
        // (-a - i - k) / (i + 1)
        let lin = [
            Rational::new(-a - i as i128, i as i128 + 1),
            Rational::new(-1, i as i128 + 1),
        ];
        out = poly_mul(&out, &lin);
    }
    out
}

/// `S_0 .. S_{2 r_max}` with exact rational coefficients.
///
/// Matching powers of `1/n` in `(1 - (k+1)/(n+1)) (-1)^n C(k,n) =
/// (-1)^{n+1} C(k,n+1)` gives, for `t >= 1`,
///
/// ```text
/// t S_2t = sum_{r<t} S_2r (C(-r-k-1, t+1-r) + (-1)^{t-r} (k+1)).
/// ```
pub fn s_polynomials(r_max: usize) -> Vec<SPolynomial> {
    let mut polys: Vec<Vec<Rational>> = vec![vec![Rational::one()]];
    let k_plus_1 = [Rational::one(), Rational::one()];
    for t in 1..=r_max {
        let mut acc = vec![Rational::zero()];
        for (r, s) in polys.iter().enumerate() {
            let mut factor = binom_shifted(r as i128 + 1, t + 1 - r);
            let sign = if (t - r) % 2 == 0 { 1 } else { -1 };
            poly_add_scaled(&mut factor, &k_plus_1, Rational::from_integer(sign));
            poly_add_scaled(&mut acc, &poly_mul(s, &factor), Rational::one());
        }
        let inv_t = Rational::new(1, t as i128);
        let mut next: Vec<Rational> = acc.into_iter().map(|c| c * inv_t).collect();
        next.truncate(poly_degree(&next) + 1);
        polys.push(next);
    }
    polys
        .into_iter()
        .enumerate()
        .map(|(index, coeffs)| SPolynomial { index, coeffs })
        .collect()
}

/// Cached `S_0..S_6`.
pub fn cached_s_polynomials() -> &'static [SPolynomial] {
    static CACHE: OnceLock<Vec<SPolynomial>> = OnceLock::new();
    CACHE.get_or_init(|| s_polynomials(3))
}

fn s_poly(r: usize) -> SPolynomial {
    let cached = cached_s_polynomials();
    if r < cached.len() {
        cached[r].clone()
    } else {
        s_polynomials(r).swap_remove(r)
    }
}

/// `(-1)^n n^{-k-1} / Gamma(-k) * sum_{r < terms} S_2r(k) / n^r`.
pub fn gamma_asymptotic_binom(k: Complex64, n: usize, terms: usize) -> Result<Complex64> {
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let minus_k = -k;
    let lg = log_gamma(minus_k)?;
    let nf = n as f64;
    let lead = (-(k + 1.0) * nf.ln() - lg).exp();
    let series = (0..terms).fold(Complex64::new(0.0, 0.0), |acc, r| {
        acc + s_poly(r).eval(k) / nf.powi(r as i32)
    });
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(lead * series * sign)
}
