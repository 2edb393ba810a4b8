//! Fourier coefficients of the periodic function `K*`.
//!
//! `K*(z) = sum_m theta_m e^{2 pi i m z}` with `theta_{-m} = conj(theta_m)`.
//! The `theta_m` for `m >= 1` decay like `e^{-pi^2 m / ln E}` and underflow
//! quickly, so they are sampled on the shifted line `Im z = -shift`, which
//! yields the scaled coefficients
//!
//! ```text
//! sigma_m = e^{2 pi shift m} theta_m = int_0^1 K*(x - i shift) e^{-2 pi i m x} dx.
//! ```
//!
//! The integrals use the trapezoid rule on a uniform grid, which converges
//! geometrically for periodic analytic integrands. The grid is doubled until
//! the coefficients settle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::dynamics::{eval_kstar, IterationConfig};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::pgf::OffspringPgf;

pub const DEFAULT_SHIFT_FRACTION: f64 = 1.0;
pub const DEFAULT_MAX_SAMPLES: usize = 8192;
const INITIAL_SAMPLES: usize = 64;
const REL_TOL: f64 = 1e-10;
/// Coefficients below this fraction of `sup |K*|` are compared absolutely.
const ABS_FLOOR: f64 = 1e-3;

/// `theta_0` and the scaled coefficients `sigma_1..sigma_{m_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub theta0: f64,
    pub scaled: Vec<Complex64>,
    pub shift: f64,
    pub samples_used: usize,
    pub converged: bool,
    /// Largest sampled `|K*|` on the shifted line.
    pub sup_norm: f64,
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Coeff {
            m: usize,
            re: f64,
            im: f64,
        }
        let scaled: Vec<Coeff> = self
            .scaled
            .iter()
            .enumerate()
            .map(|(i, s)| Coeff {
                m: i + 1,
                re: s.re,
                im: s.im,
            })
            .collect();
        let mut st = serializer.serialize_struct("Spectrum", 5)?;
        st.serialize_field("theta0", &self.theta0)?;
        st.serialize_field("shift", &self.shift)?;
        st.serialize_field("scaled", &scaled)?;
        st.serialize_field("samples_used", &self.samples_used)?;
        st.serialize_field("converged", &self.converged)?;
        st.end()
    }
}

impl Spectrum {
    pub fn m_max(&self) -> usize {
        self.scaled.len()
    }

    /// `2 pi shift m`, the log of the factor separating `sigma_m` from `theta_m`.
    pub fn log_scale(&self, m: usize) -> f64 {
        TAU * self.shift * m as f64
    }

    /// `sigma_m` for `m >= 0`, with `sigma_0 = theta_0`.
    pub fn sigma(&self, m: usize) -> Result<Complex64> {
        match m {
            0 => Ok(Complex64::new(self.theta0, 0.0)),
            m if m <= self.scaled.len() => Ok(self.scaled[m - 1]),
            m => Err(Error::OutOfRange {
                index: m as i64,
                max: self.scaled.len(),
            }),
        }
    }

    /// Errors with [`Error::NotConverged`] when the sample budget ran out.
    pub fn require_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                samples: self.samples_used,
            })
        }
    }
}

/// `theta_m` for any sign of `m`; underflows to zero for large `m`.
pub fn theta(spec: &Spectrum, m: i64) -> Result<Complex64> {
    let am = m.unsigned_abs() as usize;
    if am > spec.m_max() {
        return Err(Error::OutOfRange {
            index: m,
            max: spec.m_max(),
        });
    }
    if am == 0 {
        return Ok(Complex64::new(spec.theta0, 0.0));
    }
    let t = spec.scaled[am - 1] * (-spec.log_scale(am)).exp();
    Ok(if m < 0 { t.conj() } else { t })
}

/// Knobs for [`compute_spectrum_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub m_max: usize,
    /// Fraction of `pi / (2 ln E)` used as the line shift, in `(0, 1]`.
    pub shift_fraction: f64,
    pub max_samples: usize,
    pub execution: Execution,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            m_max: 2,
            shift_fraction: DEFAULT_SHIFT_FRACTION,
            max_samples: DEFAULT_MAX_SAMPLES,
            execution: Execution::default(),
        }
    }
}

/// `pi / (2 ln E)`, the guaranteed half-width of the strip where `K*` is analytic.
pub fn max_shift(pgf: &OffspringPgf) -> f64 {
    PI / (2.0 * pgf.log_mean())
}

pub fn compute_spectrum(
    pgf: &OffspringPgf,
    m_max: usize,
    shift_fraction: f64,
    cfg: &IterationConfig,
) -> Result<Spectrum> {
    let opts = SpectrumOptions {
        m_max,
        shift_fraction,
        ..Default::default()
    };
    compute_spectrum_with(pgf, &opts, cfg)
}

/// Samples of `K*(x - i shift)` on a uniform grid of `[0, 1)`.
struct LineSamples {
    shift: f64,
    values: Vec<Complex64>,
}

impl LineSamples {
    fn sample(
        pgf: &OffspringPgf,
        shift: f64,
        n: usize,
        cfg: &IterationConfig,
        exec: Execution,
    ) -> Result<Self> {
        let values = Self::eval_points(pgf, shift, n, 0, 1, cfg, exec)?;
        Ok(Self { shift, values })
    }

    fn eval_points(
        pgf: &OffspringPgf,
        shift: f64,
        n: usize,
        start: usize,
        step: usize,
        cfg: &IterationConfig,
        exec: Execution,
    ) -> Result<Vec<Complex64>> {
        let count = (n - start).div_ceil(step);
        map_range(exec, count, |i| {
            let x = (start + i * step) as f64 / n as f64;
            eval_kstar(pgf, Complex64::new(x, -shift), cfg)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::DivergenceDetected { .. } | Error::MaxIterExceeded { .. } if shift > 0.0 => {
                Error::ShiftTooLarge { shift }
            }
            other => other,
        })
    }

    /// Doubles the grid, reusing the existing samples at even indices.
    fn refine(&mut self, pgf: &OffspringPgf, cfg: &IterationConfig, exec: Execution) -> Result<()> {
        let n = self.values.len() * 2;
        let odd = Self::eval_points(pgf, self.shift, n, 1, 2, cfg, exec)?;
        let mut merged = Vec::with_capacity(n);
        for (even, odd) in self.values.iter().zip(odd) {
            merged.push(*even);
            merged.push(odd);
        }
        self.values = merged;
        Ok(())
    }

    /// Trapezoid estimate of `int_0^1 f(x) e^{-2 pi i m x} dx`.
    fn coefficient(&self, m: usize) -> Complex64 {
        let n = self.values.len();
        let sum = self
            .values
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, f)| {
                let phase = -TAU * ((m * k) % n) as f64 / n as f64;
                acc + f * Complex64::from_polar(1.0, phase)
            });
        sum / n as f64
    }

    fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }
}

fn settled(old: &[Complex64], new: &[Complex64], floor: f64) -> bool {
    old.iter()
        .zip(new)
        .all(|(a, b)| (a - b).norm() <= REL_TOL * b.norm().max(floor))
}

pub fn compute_spectrum_with(
    pgf: &OffspringPgf,
    opts: &SpectrumOptions,
    cfg: &IterationConfig,
) -> Result<Spectrum> {
    cfg.validate()?;
    if !(opts.shift_fraction > 0.0 && opts.shift_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "shift fraction must lie in (0, 1], got {}",
            opts.shift_fraction
        )));
    }
    let shift = opts.shift_fraction * max_shift(pgf);
    let start = INITIAL_SAMPLES.max((4 * (opts.m_max + 1)).next_power_of_two());
    let budget = opts.max_samples.max(start);
    let exec = opts.execution;

    // theta_0 on the real line, where K* is smoothest
    let mut real_line = LineSamples::sample(pgf, 0.0, start, cfg, exec)?;
    let mut theta0 = real_line.coefficient(0);
    let mut converged = false;
    while real_line.values.len() * 2 <= budget {
        real_line.refine(pgf, cfg, exec)?;
        let next = real_line.coefficient(0);
        let done = (next - theta0).norm() <= REL_TOL * next.norm();
        theta0 = next;
        if done {
            converged = true;
            break;
        }
    }
    if theta0.im.abs() > REL_TOL * theta0.re.abs().max(1.0) {
        converged = false;
    }

    let mut samples_used = real_line.values.len();
    let mut scaled = Vec::new();
    let mut sup_norm = real_line.sup_norm();
    if opts.m_max > 0 {
        let mut line = LineSamples::sample(pgf, shift, start, cfg, exec)?;
        let coeffs = |l: &LineSamples| (1..=opts.m_max).map(|m| l.coefficient(m)).collect::<Vec<_>>();
        scaled = coeffs(&line);
        let mut line_converged = false;
        while line.values.len() * 2 <= budget {
            line.refine(pgf, cfg, exec)?;
            let next = coeffs(&line);
            let floor = ABS_FLOOR * line.sup_norm();
            let done = settled(&scaled, &next, floor);
            scaled = next;
            if done {
                line_converged = true;
                break;
            }
        }
        converged &= line_converged;
        samples_used = samples_used.max(line.values.len());
        sup_norm = line.sup_norm();
    }

    Ok(Spectrum {
        theta0: theta0.re,
        scaled,
        shift,
        samples_used,
        converged,
        sup_norm,
    })
}
