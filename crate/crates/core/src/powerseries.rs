//! Dense truncated power series `c0 + c1 z + ... + cR z^R`.
//!
//! Every operation is exact truncation: the result holds the same
//! coefficients through order `R` as the untruncated operation would.
//! Multiplication is the plain O(R^2) Cauchy product.

use std::fmt::Debug;

use num_complex::{Complex64, ComplexFloat};

use crate::error::{Error, Result};

/// Scalar field for series coefficients: `f64` or `Complex64`.
pub trait Scalar: ComplexFloat<Real = f64> + Send + Sync + Debug + 'static {
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Series with the given coefficients; order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c0");
        Self { coeffs }
    }

    /// Pads or cuts `coeffs` to exactly `order + 1` entries.
    pub fn from_slice(coeffs: &[T], order: usize) -> Self {
        let mut c: Vec<T> = coeffs.iter().copied().take(order + 1).collect();
        c.resize(order + 1, T::zero());
        Self { coeffs: c }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = T::one();
        s
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the order.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or_else(T::zero)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * k).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let r = self.order();
        let lo_a = self.coeffs.iter().position(|c| *c != T::zero());
        let lo_b = other.coeffs.iter().position(|c| *c != T::zero());
        let mut out = vec![T::zero(); r + 1];
        let (Some(lo_a), Some(lo_b)) = (lo_a, lo_b) else {
            return Ok(Self { coeffs: out });
        };
        for (i, &a) in self.coeffs.iter().enumerate().skip(lo_a) {
            if i + lo_b > r {
                break;
            }
            if a == T::zero() {
                continue;
            }
            for (o, &b) in out[i + lo_b..].iter_mut().zip(&other.coeffs[lo_b..]) {
                *o = *o + a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// Product with a short polynomial `poly[0] + poly[1] z + ...`,
    /// truncated at this series' order. O(R * poly.len()).
    pub fn multiply_poly(&self, poly: &[T]) -> Self {
        let r = self.order();
        let mut out = vec![T::zero(); r + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (j, &b) in poly.iter().enumerate() {
                if i + j > r {
                    break;
                }
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self { coeffs: out }
    }

    fn require_constant(&self, value: T, desc: &'static str) -> Result<()> {
        if self.coeffs[0] != value {
            return Err(Error::ConstantTerm {
                expected_desc: desc,
                found: format!("{:?}", self.coeffs[0]),
            });
        }
        Ok(())
    }

    /// `log(1 + a(z))` for `a0 = 0`, from `(1 + a) b' = a'`.
    pub fn log1p(&self) -> Result<Self> {
        self.require_constant(T::zero(), "0 (log1p)")?;
        let r = self.order();
        let a = &self.coeffs;
        let mut b = vec![T::zero(); r + 1];
        for n in 1..=r {
            // n b_n = n a_n - sum_{k=1}^{n-1} k b_k a_{n-k}
            let mut s = a[n] * T::from_real(n as f64);
            for k in 1..n {
                s = s - b[k] * a[n - k] * T::from_real(k as f64);
            }
            b[n] = s / T::from_real(n as f64);
        }
        Ok(Self { coeffs: b })
    }

    /// `exp(a(z))` for `a0 = 0`, from `e' = a' e`.
    pub fn exp(&self) -> Result<Self> {
        self.require_constant(T::zero(), "0 (exp)")?;
        let r = self.order();
        let a = &self.coeffs;
        let mut e = vec![T::zero(); r + 1];
        e[0] = T::one();
        for n in 1..=r {
            let mut s = T::zero();
            for k in 1..=n {
                s = s + a[k] * e[n - k] * T::from_real(k as f64);
            }
            e[n] = s / T::from_real(n as f64);
        }
        Ok(Self { coeffs: e })
    }

    /// `a(z)^k = exp(k log a(z))` for `a0 = 1`.
    pub fn pow(&self, k: T) -> Result<Self> {
        self.require_constant(T::one(), "1 (pow)")?;
        let mut shifted = self.clone();
        shifted.coeffs[0] = T::zero();
        shifted.log1p()?.scale(k).exp()
    }

    pub fn to_complex(&self) -> TruncatedSeries<Complex64> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.to_complex()).collect(),
        }
    }

    /// Evaluates the truncated polynomial at `z`.
    pub fn eval(&self, z: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * z + c)
    }
}

/// Cauchy product; errors on order mismatch.
pub fn multiply<T: Scalar>(
    a: &TruncatedSeries<T>,
    b: &TruncatedSeries<T>,
) -> Result<TruncatedSeries<T>> {
    a.multiply(b)
}

pub fn log1p_series<T: Scalar>(a: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    a.log1p()
}

pub fn exp_series<T: Scalar>(a: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    a.exp()
}

/// `a(z)^k` for complex `k`; `a0` must be 1.
pub fn pow_complex(
    a: &TruncatedSeries<Complex64>,
    k: Complex64,
) -> Result<TruncatedSeries<Complex64>> {
    a.pow(k)
}
