use std::path::PathBuf;
use std::process::ExitCode;

use branchdens::approx::Variant;
use branchdens_cli::{
    cmd_approx, cmd_characteristics, cmd_compare, cmd_exact, cmd_julia, cmd_spectrum, parse_list, parse_pgf,
    CliError, CliResult, Format, RunConfig,
};
use clap::{Args, Parser, Subcommand};

/// Exact and spectral approximations of the limit densities of a
/// supercritical Galton-Watson process.
#[derive(Parser)]
#[command(name = "branchdens", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// kappa, theta_0, scaled sigma_m and exp(pi^2 / ln E)
    Characteristics(Opts),
    /// Exact Taylor coefficients phi_1..phi_{n_max}
    Exact(Opts),
    /// One approximation variant at one M
    Approx(Opts),
    /// Exact values against every (variant, M) pair, with differences
    Compare(Opts),
    /// Fourier coefficients of K*
    Spectrum(Opts),
    /// Escape-time grid of the filled Julia set of P
    Julia(Opts),
}

#[derive(Args)]
struct Opts {
    /// Probabilities p1..pN, as "0.2,0.6,0.2" or "[0.2,0.6,0.2]"
    #[arg(long)]
    pgf: String,
    #[arg(long, default_value_t = 1000)]
    n_max: usize,
    /// Truncation order(s), comma separated for compare
    #[arg(long = "M", default_value = "2")]
    m: String,
    /// plain, corrected, gamma_plain, gamma_corrected or asymptotic; comma separated for compare
    #[arg(long, default_value = "corrected")]
    variant: String,
    /// Number of Fourier coefficients to compute
    #[arg(long, default_value_t = 8)]
    m_max: usize,
    /// Sampling line shift as a fraction of pi / (2 ln E)
    #[arg(long, default_value_t = branchdens::fourier::DEFAULT_SHIFT_FRACTION)]
    shift_fraction: f64,
    /// Sample budget for the Fourier coefficients
    #[arg(long, default_value_t = branchdens::fourier::DEFAULT_MAX_SAMPLES)]
    samples: usize,
    /// csv, json, or pgm (julia only)
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a log10 column to exact
    #[arg(long)]
    log10: bool,
    /// Julia window re_min,re_max,im_min,im_max
    #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    bounds: String,
    /// Julia resolution WIDTHxHEIGHT
    #[arg(long, default_value = "200x200")]
    resolution: String,
    /// Julia iteration cap
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
}

impl Opts {
    fn config(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::new(parse_pgf(&self.pgf)?);
        cfg.n_max = self.n_max;
        cfg.m_values = parse_list(&self.m, "--M")?;
        cfg.variants = parse_list::<Variant>(&self.variant, "--variant")?;
        cfg.m_max = self.m_max;
        cfg.shift_fraction = self.shift_fraction;
        cfg.samples = self.samples;
        cfg.format = self.format.parse()?;
        cfg.log10 = self.log10;
        let b: Vec<f64> = parse_list(&self.bounds, "--bounds")?;
        cfg.bounds = b
            .try_into()
            .map_err(|_| CliError::Input("--bounds needs four numbers".into()))?;
        let (w, h) = self
            .resolution
            .split_once('x')
            .ok_or_else(|| CliError::Input("--resolution must look like 200x200".into()))?;
        cfg.width = parse_list(w, "--resolution")?[0];
        cfg.height = parse_list(h, "--resolution")?[0];
        cfg.max_iter = self.max_iter;
        cfg.out = self.out.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: Command) -> CliResult<()> {
    let (opts, is_julia) = match &command {
        Command::Julia(o) => (o, true),
        Command::Characteristics(o)
        | Command::Exact(o)
        | Command::Approx(o)
        | Command::Compare(o)
        | Command::Spectrum(o) => (o, false),
    };
    let cfg = opts.config()?;
    if cfg.format == Format::Pgm && !is_julia {
        return Err(CliError::Input("pgm output is only available for julia".into()));
    }
    if let Some(w) = branchdens::pgf::OffspringPgf::new(&cfg.pgf)
        .ok()
        .and_then(|p| p.warnings().first().cloned())
    {
        eprintln!("warning: {w}");
    }
    let text = if is_julia {
        let grid = cmd_julia(&cfg)?;
        match cfg.format {
            Format::Pgm => grid.to_pgm(),
            Format::Csv => grid.to_report().to_csv(),
            Format::Json => grid.to_report().to_json(),
        }
    } else {
        let report = match command {
            Command::Characteristics(_) => cmd_characteristics(&cfg)?,
            Command::Exact(_) => cmd_exact(&cfg)?,
            Command::Approx(_) => cmd_approx(&cfg)?,
            Command::Compare(_) => cmd_compare(&cfg)?,
            Command::Spectrum(_) => cmd_spectrum(&cfg)?,
            Command::Julia(_) => unreachable!(),
        };
        match cfg.format {
            Format::Json => report.to_json(),
            _ => report.to_csv(),
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
