//! Spectral approximations of `phi_n`.
//!
//! Every variant is a sum over `|m| <= M` of terms built from `theta_m` and
//! `k_m = (2 pi i m + ln p1) / ln E`. Terms for `m >= 1` are formed from the
//! scaled coefficients `sigma_m = e^{2 pi shift m} theta_m` with the scale
//! removed inside an exponent, and the `m < 0` half is the complex conjugate,
//! so the result is `term_0 + 2 Re sum_{m>=1} term_m`.
//!
//! | variant           | term                                                            |
//! |-------------------|-----------------------------------------------------------------|
//! | `plain`           | `(-1)^n C(k, n) theta`                                          |
//! | `corrected`       | `(-1)^n [C(k, n) + psi_2 k C(k + 1, n)] theta`                  |
//! | `gamma_plain`     | `n^{-k-1} theta / Gamma(-k)`                                    |
//! | `gamma_corrected` | the above plus `c n^{-k-2} (k ln E) theta / Gamma(-k - 1)`      |
//! | `asymptotic`      | `sum_{r+j <= kappa-1} S_2r(k+j) rho_j n^{-k-1-r-j} theta / Gamma(-k-j)` |
//!
//! with `c = (P''(1) + E - E^2) / (2 (E^2 - E) ln E)` and `rho_j = [u^j]
//! (Psi(1 - u) / u)^k`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::binom::{
    cached_s_polynomials, log_binom_batch, log_gamma, s_polynomials, stabilized_from_log, stabilized_term,
    SPolynomial,
};
use crate::dynamics::{psi_expansion, PsiExpansion};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::fourier::Spectrum;
use crate::pgf::OffspringPgf;
use crate::powerseries::pow_complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Corrected,
    GammaPlain,
    GammaCorrected,
    Asymptotic,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Plain,
        Variant::Corrected,
        Variant::GammaPlain,
        Variant::GammaCorrected,
        Variant::Asymptotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Corrected => "corrected",
            Variant::GammaPlain => "gamma_plain",
            Variant::GammaCorrected => "gamma_corrected",
            Variant::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant '{s}'")))
    }
}

/// Approximants for a list of `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxResult {
    pub variant: Variant,
    pub m: usize,
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    /// `|term_m|` for `m = 0..=M`, one row per `n`.
    pub per_m_terms: Vec<Vec<f64>>,
}

/// `rho_{j,m} = R_j(2 pi i m)` for `j = 0..=J`, `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct RCoefficients {
    // rows[m][j]
    rows: Vec<Vec<Complex64>>,
}

impl RCoefficients {
    pub fn j_max(&self) -> usize {
        self.rows[0].len() - 1
    }

    pub fn m_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rho(&self, j: usize, m: usize) -> Complex64 {
        self.rows[m][j]
    }
}

/// `k_m = (2 pi i m + ln p1) / ln E`.
pub fn k_m(pgf: &OffspringPgf, m: i64) -> Complex64 {
    Complex64::new(pgf.log_p1(), TAU * m as f64) / pgf.log_mean()
}

fn rho_row(psi: &PsiExpansion, j_max: usize, k: Complex64) -> Result<Vec<Complex64>> {
    let ratio = psi.ratio_series(j_max)?.to_complex();
    Ok(pow_complex(&ratio, k)?.into_coeffs())
}

/// `[u^j] (1 + psi_2 u + psi_3 u^2 + ...)^{k_m}`.
pub fn r_coefficients(
    psi: &PsiExpansion,
    pgf: &OffspringPgf,
    j_max: usize,
    m_max: usize,
) -> Result<RCoefficients> {
    let rows = (0..=m_max)
        .map(|m| rho_row(psi, j_max, k_m(pgf, m as i64)))
        .collect::<Result<_>>()?;
    Ok(RCoefficients { rows })
}

/// Largest `j` (and `r + j`) whose term has a nonnegative power of `n`.
pub fn asymptotic_order(pgf: &OffspringPgf) -> usize {
    // the slack keeps an integer kappa - 1 from rounding down
    (pgf.kappa() - 1.0 + 1e-12).floor().max(0.0) as usize
}

/// `exp(log_num - ln Gamma(z) - scale)`, zero at the poles of Gamma.
fn over_gamma(log_num: Complex64, z: Complex64, scale: f64) -> Result<Complex64> {
    match log_gamma(z) {
        Ok(lg) => {
            let l = log_num - lg - scale;
            if l.re > 700.0 {
                return Err(Error::Overflow(l.re));
            }
            Ok(l.exp())
        }
        Err(Error::PoleAtNonpositiveInteger(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

enum Extra {
    None,
    Corrected { psi2: f64 },
    GammaCorrected { c: f64 },
    Asymptotic {
        psi: PsiExpansion,
        rho: RCoefficients,
        s: Vec<SPolynomial>,
    },
}

struct LogBinoms {
    lead: Vec<Option<Complex64>>,
    shifted: Vec<Option<Complex64>>,
}

struct Engine<'a> {
    spec: &'a Spectrum,
    pgf: &'a OffspringPgf,
    variant: Variant,
    extra: Extra,
}

impl<'a> Engine<'a> {
    fn new(
        variant: Variant,
        spec: &'a Spectrum,
        pgf: &'a OffspringPgf,
        m: usize,
        psi2_override: Option<f64>,
    ) -> Result<Self> {
        if m > spec.m_max() {
            return Err(Error::SpectrumTooShort {
                have: spec.m_max(),
                need: m,
            });
        }
        let e = pgf.mean();
        let extra = match variant {
            Variant::Plain | Variant::GammaPlain => Extra::None,
            Variant::Corrected => Extra::Corrected {
                psi2: psi2_override
                    .unwrap_or(pgf.second_factorial_moment() / (2.0 * (e * e - e))),
            },
            Variant::GammaCorrected => Extra::GammaCorrected {
                c: (pgf.second_factorial_moment() + e - e * e)
                    / (2.0 * (e * e - e) * pgf.log_mean()),
            },
            Variant::Asymptotic => {
                let order = asymptotic_order(pgf);
                let psi = psi_expansion(pgf, (order + 1).max(2))?;
                let rho = r_coefficients(&psi, pgf, order, m)?;
                let cached = cached_s_polynomials();
                let s = if order < cached.len() {
                    cached[..=order].to_vec()
                } else {
                    s_polynomials(order)
                };
                Extra::Asymptotic { psi, rho, s }
            }
        };
        Ok(Self {
            spec,
            pgf,
            variant,
            extra,
        })
    }

    /// `(sigma_m, scale)` with `sigma_{-m} = conj(sigma_m)`.
    fn sigma(&self, m: i64) -> Result<(Complex64, f64)> {
        let am = m.unsigned_abs() as usize;
        let s = self.spec.sigma(am)?;
        let s = if m < 0 { s.conj() } else { s };
        Ok((s, self.spec.log_scale(am)))
    }

    /// `term_m` at `n`, computed directly for either sign of `m`.
    fn term(&self, m: i64, n: usize) -> Result<Complex64> {
        let k = k_m(self.pgf, m);
        let (sigma, scale) = self.sigma(m)?;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let ln_n = (n as f64).ln();
        let t = match (&self.extra, self.variant) {
            (Extra::None, Variant::Plain) => sign * stabilized_term(k, n, sigma, scale)?,
            (Extra::Corrected { psi2 }, _) => {
                let lead = stabilized_term(k, n, sigma, scale)?;
                let corr = if *psi2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    *psi2 * k * stabilized_term(k + 1.0, n, sigma, scale)?
                };
                sign * (lead + corr)
            }
            (Extra::None, _) => over_gamma(-(k + 1.0) * ln_n, -k, scale)? * sigma,
            (Extra::GammaCorrected { c }, _) => {
                let g1 = over_gamma(-(k + 1.0) * ln_n, -k, scale)?;
                let g2 = over_gamma(-(k + 2.0) * ln_n, -k - 1.0, scale)?
                    * (*c * k * self.pgf.log_mean());
                (g1 + g2) * sigma
            }
            (Extra::Asymptotic { psi, rho, s }, _) => {
                let order = s.len() - 1;
                let row;
                let rho_m: &[Complex64] = if m >= 0 {
                    &rho.rows[m as usize]
                } else {
                    row = rho_row(psi, order, k)?;
                    &row
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..=order {
                    let kj = k + j as f64;
                    for (r, s_r) in s.iter().enumerate().take(order - j + 1) {
                        let w = s_r.eval(kj) * rho_m[j];
                        let p = -(kj + 1.0 + r as f64) * ln_n;
                        acc += w * over_gamma(p, -kj, scale)?;
                    }
                }
                acc * sigma
            }
        };
        Ok(t)
    }

    /// `ln C(k_m, n)` and `ln C(k_m + 1, n)` at every `n` in `ns` for
    /// `m = 0..=m_max`, one pass over `n` per binomial.
    fn log_binom_tables(&self, ns: &[usize], m_max: usize, exec: Execution) -> Option<Vec<LogBinoms>> {
        let second = match self.extra {
            Extra::None if self.variant == Variant::Plain => false,
            Extra::Corrected { psi2 } => psi2 != 0.0,
            _ => return None,
        };
        Some(map_range(exec, m_max + 1, |m| {
            let k = k_m(self.pgf, m as i64);
            LogBinoms {
                lead: log_binom_batch(k, ns),
                shifted: if second { log_binom_batch(k + 1.0, ns) } else { Vec::new() },
            }
        }))
    }

    /// `term_m` at `ns[idx]`, reading binomials from `tables` when present.
    fn term_at(&self, m: usize, idx: usize, n: usize, tables: Option<&[LogBinoms]>) -> Result<Complex64> {
        let Some(t) = tables.map(|t| &t[m]) else {
            return self.term(m as i64, n);
        };
        let (sigma, scale) = self.sigma(m as i64)?;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let lead = stabilized_from_log(t.lead[idx], sigma, scale)?;
        let corr = match self.extra {
            Extra::Corrected { psi2 } if psi2 != 0.0 => {
                psi2 * k_m(self.pgf, m as i64) * stabilized_from_log(t.shifted[idx], sigma, scale)?
            }
            _ => Complex64::new(0.0, 0.0),
        };
        Ok(sign * (lead + corr))
    }

    /// Value at `ns[idx]` and the per-`m` magnitudes.
    fn evaluate(&self, idx: usize, n: usize, m_max: usize, tables: Option<&[LogBinoms]>) -> Result<(f64, Vec<f64>)> {
        let mut mags = Vec::with_capacity(m_max + 1);
        let t0 = self.term_at(0, idx, n, tables)?;
        mags.push(t0.norm());
        let mut tail = 0.0;
        for m in 1..=m_max {
            let t = self.term_at(m, idx, n, tables)?;
            mags.push(t.norm());
            tail += t.re;
        }
        Ok((t0.re + 2.0 * tail, mags))
    }
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    Ok(())
}

fn run(
    variant: Variant,
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    ns: &[usize],
    exec: Execution,
    psi2_override: Option<f64>,
) -> Result<ApproxResult> {
    check_ns(ns)?;
    let engine = Engine::new(variant, spec, pgf, m, psi2_override)?;
    let tables = engine.log_binom_tables(ns, m, exec);
    let rows = map_range(exec, ns.len(), |i| engine.evaluate(i, ns[i], m, tables.as_deref()))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (values, per_m_terms) = rows.into_iter().unzip();
    Ok(ApproxResult {
        variant,
        m,
        ns: ns.to_vec(),
        values,
        per_m_terms,
    })
}

/// Evaluates `variant` with truncation `M` at every `n` in `ns`.
pub fn approximate(
    variant: Variant,
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    ns: &[usize],
    exec: Execution,
) -> Result<ApproxResult> {
    run(variant, spec, pgf, m, ns, exec, None)
}

/// The full sum over `-M..=M` without the conjugate shortcut.
///
/// Its imaginary part is rounding noise; its real part equals the value
/// returned by [`approximate`].
pub fn approximate_complex(
    variant: Variant,
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    n: usize,
) -> Result<Complex64> {
    check_ns(&[n])?;
    let engine = Engine::new(variant, spec, pgf, m, None)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for mm in -(m as i64)..=(m as i64) {
        acc += engine.term(mm, n)?;
    }
    Ok(acc)
}

pub fn approx_plain(spec: &Spectrum, pgf: &OffspringPgf, m: usize, ns: &[usize]) -> Result<ApproxResult> {
    approximate(Variant::Plain, spec, pgf, m, ns, Execution::default())
}

pub fn approx_corrected(
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    ns: &[usize],
) -> Result<ApproxResult> {
    approximate(Variant::Corrected, spec, pgf, m, ns, Execution::default())
}

pub fn approx_gamma(
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    ns: &[usize],
    corrected: bool,
) -> Result<ApproxResult> {
    let variant = if corrected {
        Variant::GammaCorrected
    } else {
        Variant::GammaPlain
    };
    approximate(variant, spec, pgf, m, ns, Execution::default())
}

pub fn approx_asymptotic(
    spec: &Spectrum,
    pgf: &OffspringPgf,
    m: usize,
    ns: &[usize],
) -> Result<ApproxResult> {
    approximate(Variant::Asymptotic, spec, pgf, m, ns, Execution::default())
}
