//! Command implementations behind the `branchdens` binary.
//!
//! Each `cmd_*` function is pure: it takes a [`RunConfig`] and returns a
//! [`Report`] (or a [`JuliaGrid`]) that renders deterministically to CSV or
//! JSON. The binary only parses flags, renders and writes.

mod julia;
mod report;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use branchdens::approx::{approximate, Variant};
use branchdens::dynamics::IterationConfig;
use branchdens::exact::exact_coeffs;
use branchdens::exec::Execution;
use branchdens::fourier::{compute_spectrum_with, theta, Spectrum, SpectrumOptions};
use branchdens::pgf::OffspringPgf;
use serde::Serialize;
use serde_json::json;

pub use julia::{classify_point, cmd_julia, JuliaGrid, PointClass, ESCAPE_RADIUS, INTERIOR_RADIUS};
pub use report::{Cell, Report, Table};

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<branchdens::Error> for CliError {
    fn from(e: branchdens::Error) -> Self {
        use branchdens::Error as E;
        match e {
            E::InvalidDistribution(_)
            | E::DegenerateDegree(_)
            | E::InvalidArgument(_)
            | E::DegreeMismatch { .. }
            | E::OutOfRange { .. }
            | E::SpectrumTooShort { .. }
            | E::InsufficientPsiOrder { .. } => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// Portable graymap, `julia` only.
    Pgm,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pgm" => Ok(Format::Pgm),
            _ => Err(CliError::Input(format!("unknown format '{s}' (csv, json, pgm)"))),
        }
    }
}

/// Parses `0.2,0.6,0.2` or `[0.2, 0.6, 0.2]`.
pub fn parse_pgf(s: &str) -> CliResult<Vec<f64>> {
    let s = s.trim();
    let parsed = if s.starts_with('[') {
        serde_json::from_str::<Vec<f64>>(s).map_err(|e| e.to_string())
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
            .collect()
    };
    parsed.map_err(|e| CliError::Input(format!("cannot parse --pgf: {e}")))
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Input(format!("cannot parse {what} entry '{t}'")))
        })
        .collect()
}

pub const MAX_N: usize = 1_000_000;
pub const MAX_M: usize = 64;

/// Everything a command needs; identical configs give identical output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub pgf: Vec<f64>,
    pub n_max: usize,
    /// Truncation orders; `approx` uses the first.
    pub m_values: Vec<usize>,
    /// `approx` uses the first.
    pub variants: Vec<Variant>,
    pub m_max: usize,
    pub shift_fraction: f64,
    pub samples: usize,
    pub format: Format,
    /// Extra `log10_phi_n` column for `exact`.
    pub log10: bool,
    /// `[re_min, re_max, im_min, im_max]` for `julia`.
    pub bounds: [f64; 4],
    pub width: usize,
    pub height: usize,
    pub max_iter: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(pgf: Vec<f64>) -> Self {
        Self {
            pgf,
            n_max: 1000,
            m_values: vec![2],
            variants: vec![Variant::Corrected],
            m_max: 8,
            shift_fraction: branchdens::fourier::DEFAULT_SHIFT_FRACTION,
            samples: branchdens::fourier::DEFAULT_MAX_SAMPLES,
            format: Format::Csv,
            log10: false,
            bounds: [-2.0, 2.0, -2.0, 2.0],
            width: 200,
            height: 200,
            max_iter: 500,
            out: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Input(msg));
        if !(1..=MAX_N).contains(&self.n_max) {
            return bad(format!("--n-max must lie in 1..={MAX_N}"));
        }
        if self.m_max > MAX_M {
            return bad(format!("--m-max must be at most {MAX_M}"));
        }
        if self.m_values.is_empty() || self.m_values.iter().any(|&m| m > MAX_M) {
            return bad(format!("--M entries must lie in 0..={MAX_M}"));
        }
        if self.variants.is_empty() {
            return bad("--variant needs at least one entry".into());
        }
        if !(self.shift_fraction > 0.0 && self.shift_fraction <= 1.0) {
            return bad("--shift-fraction must lie in (0, 1]".into());
        }
        if self.samples < 64 {
            return bad("--samples must be at least 64".into());
        }
        let [a, b, c, d] = self.bounds;
        if !(self.bounds.iter().all(|x| x.is_finite()) && a < b && c < d) {
            return bad("--bounds must be re_min,re_max,im_min,im_max with min < max".into());
        }
        if self.width == 0 || self.height == 0 || self.width * self.height > 16_000_000 {
            return bad("--resolution must be positive and at most 16 megapixels".into());
        }
        if self.max_iter == 0 {
            return bad("--max-iter must be positive".into());
        }
        Ok(())
    }

    fn build_pgf(&self) -> CliResult<OffspringPgf> {
        self.validate()?;
        Ok(OffspringPgf::new(&self.pgf)?)
    }

    fn spectrum(&self, pgf: &OffspringPgf, m_max: usize) -> CliResult<Spectrum> {
        let opts = SpectrumOptions {
            m_max,
            shift_fraction: self.shift_fraction,
            max_samples: self.samples,
            execution: Execution::Parallel,
        };
        let spec = compute_spectrum_with(pgf, &opts, &IterationConfig::default())?;
        spec.require_converged()?;
        Ok(spec)
    }
}

fn base_meta(command: &str, cfg: &RunConfig, pgf: &OffspringPgf) -> serde_json::Value {
    json!({
        "command": command,
        "tool": { "name": "branchdens", "version": env!("CARGO_PKG_VERSION") },
        "library": { "name": "branchdens", "version": branchdens::VERSION },
        "config": cfg,
        "pgf": pgf,
        "pgf_hash": pgf.fingerprint(),
        "approximations_reliable": !pgf.is_lattice(),
    })
}

fn spectrum_meta(spec: &Spectrum) -> serde_json::Value {
    json!({
        "theta0": spec.theta0,
        "shift": spec.shift,
        "samples_used": spec.samples_used,
        "converged": spec.converged,
        "m_max": spec.m_max(),
    })
}

/// `kappa`, `theta_0`, `sigma_1..sigma_{m_max}` and `e^{pi^2 / ln E}`.
pub fn cmd_characteristics(cfg: &RunConfig) -> CliResult<Report> {
    let pgf = cfg.build_pgf()?;
    let spec = cfg.spectrum(&pgf, cfg.m_max)?;
    let real = |name: &str, v: f64| vec![Cell::Text(name.into()), Cell::Num(v), Cell::Num(0.0)];
    let mut rows = vec![
        real("kappa", pgf.kappa()),
        real("mean", pgf.mean()),
        real("second_factorial_moment", pgf.second_factorial_moment()),
        real("theta0", spec.theta0),
    ];
    for m in 1..=spec.m_max() {
        let s = spec.sigma(m)?;
        rows.push(vec![Cell::Text(format!("sigma{m}")), Cell::Num(s.re), Cell::Num(s.im)]);
    }
    rows.push(real("exp_pi2_over_ln_mean", (PI * PI / pgf.log_mean()).exp()));
    let mut meta = base_meta("characteristics", cfg, &pgf);
    meta["spectrum"] = spectrum_meta(&spec);
    Ok(Report {
        meta,
        table: Table {
            columns: vec!["quantity".into(), "re".into(), "im".into()],
            rows,
        },
    })
}

/// `phi_1..phi_{n_max}` from the exact recurrence.
pub fn cmd_exact(cfg: &RunConfig) -> CliResult<Report> {
    let pgf = cfg.build_pgf()?;
    let table = exact_coeffs(&pgf, cfg.n_max)?;
    let mut columns = vec!["n".to_string(), "phi_n".to_string()];
    if cfg.log10 {
        columns.push("log10_phi_n".into());
    }
    let rows = table
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut row = vec![Cell::Int(i as i64 + 1), Cell::Num(v)];
            if cfg.log10 {
                row.push(Cell::Num(v.log10()));
            }
            row
        })
        .collect();
    let mut meta = base_meta("exact", cfg, &pgf);
    meta["method"] = json!(table.method());
    Ok(Report {
        meta,
        table: Table { columns, rows },
    })
}

/// One approximation variant at one `M` for `n = 1..=n_max`.
pub fn cmd_approx(cfg: &RunConfig) -> CliResult<Report> {
    let pgf = cfg.build_pgf()?;
    let variant = cfg.variants[0];
    let m = cfg.m_values[0];
    let spec = cfg.spectrum(&pgf, cfg.m_max.max(m))?;
    let ns: Vec<usize> = (1..=cfg.n_max).collect();
    let r = approximate(variant, &spec, &pgf, m, &ns, Execution::Parallel)?;
    let rows = r
        .ns
        .iter()
        .zip(&r.values)
        .map(|(&n, &v)| vec![Cell::Int(n as i64), Cell::Num(v)])
        .collect();
    let mut meta = base_meta("approx", cfg, &pgf);
    meta["spectrum"] = spectrum_meta(&spec);
    meta["variant"] = json!(variant);
    meta["M"] = json!(m);
    Ok(Report {
        meta,
        table: Table {
            columns: vec!["n".into(), "value".into()],
            rows,
        },
    })
}

/// Exact values beside every requested `(variant, M)` and its difference.
pub fn cmd_compare(cfg: &RunConfig) -> CliResult<Report> {
    let pgf = cfg.build_pgf()?;
    let m_top = cfg.m_values.iter().copied().max().unwrap_or(0);
    let spec = cfg.spectrum(&pgf, cfg.m_max.max(m_top))?;
    let exact = exact_coeffs(&pgf, cfg.n_max)?;
    let ns: Vec<usize> = (1..=cfg.n_max).collect();

    let mut columns = vec!["n".to_string(), "phi_exact".to_string()];
    let mut series = Vec::new();
    for &v in &cfg.variants {
        for &m in &cfg.m_values {
            let r = approximate(v, &spec, &pgf, m, &ns, Execution::Parallel)?;
            columns.push(format!("{v}_M{m}"));
            columns.push(format!("diff_{v}_M{m}"));
            series.push(r.values);
        }
    }
    let rows = ns
        .iter()
        .map(|&n| {
            let e = exact.phi(n);
            let mut row = vec![Cell::Int(n as i64), Cell::Num(e)];
            for s in &series {
                let a = s[n - 1];
                row.push(Cell::Num(a));
                row.push(Cell::Num(a - e));
            }
            row
        })
        .collect();
    let mut meta = base_meta("compare", cfg, &pgf);
    meta["spectrum"] = spectrum_meta(&spec);
    Ok(Report {
        meta,
        table: Table { columns, rows },
    })
}

/// `sigma_m` and `theta_m` for `m = 0..=m_max`.
pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<Report> {
    let pgf = cfg.build_pgf()?;
    let spec = cfg.spectrum(&pgf, cfg.m_max)?;
    let rows = (0..=spec.m_max())
        .map(|m| {
            let s = spec.sigma(m)?;
            let t = theta(&spec, m as i64)?;
            Ok(vec![
                Cell::Int(m as i64),
                Cell::Num(s.re),
                Cell::Num(s.im),
                Cell::Num(t.re),
                Cell::Num(t.im),
            ])
        })
        .collect::<branchdens::Result<Vec<_>>>()?;
    let mut meta = base_meta("spectrum", cfg, &pgf);
    meta["spectrum"] = spectrum_meta(&spec);
    Ok(Report {
        meta,
        table: Table {
            columns: ["m", "sigma_re", "sigma_im", "theta_re", "theta_im"]
                .map(String::from)
                .to_vec(),
            rows,
        },
    })
}
