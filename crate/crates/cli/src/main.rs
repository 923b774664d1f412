//! `ilw`: periodic ILW traveling waves from the command line.

mod commands;
mod config;
mod report;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ilw_core::IlwError;

use config::RunConfig;

/// Failure classes, mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Failure(String),
}

impl CliError {
    fn from_display(e: impl std::fmt::Display) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<IlwError> for CliError {
    fn from(e: IlwError) -> Self {
        match e {
            IlwError::Domain(_) | IlwError::Admissibility(_) | IlwError::Shape { .. } => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "ilw", version, about = "Periodic traveling waves of the Intermediate Long Wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Wave profile by the elliptic and Fourier routes (CSV, SVG); default k = 0.5.
    Wave,
    /// c, c', N, N', a and -phi(L/2) over a k-range (CSV, SVGs).
    SpeedScan,
    /// Spectrum, PF(2), I, D, (P3) and the stability verdict (JSON); default k = 0.85.
    Stability,
    /// Evolve the wave plus a cosine perturbation and track rho_W and invariants (CSV, SVG).
    Evolve,
    /// Run every acceptance check; exits 1 if any fails.
    VerifyAll,
}

/// Flags override values from `--config`.
#[derive(Args)]
struct Opts {
    /// Period L [default: pi]
    #[arg(long = "L", global = true, allow_negative_numbers = true)]
    period: Option<f64>,
    /// Depth parameter delta [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Elliptic modulus k
    #[arg(long, global = true, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Moduli a:b:n for speed-scan [default: 0.05:0.94:90]
    #[arg(long = "k-range", global = true)]
    k_range: Option<String>,
    /// Grid size, even and >= 64 [default: 256]
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Time step [default: 1e-3]
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Final time [default: 50]
    #[arg(long = "t-end", global = true, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Time stepper: gauss, ifrk4 or etdrk4 [default: gauss]
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// Perturbation amplitude for evolve [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Perturbation mode m in epsilon cos(2 pi m x / L) [default: 2]
    #[arg(long, global = true)]
    mode: Option<u32>,
    /// Record every this many steps [default: 100]
    #[arg(long = "record-every", global = true)]
    record_every: Option<usize>,
    /// PF(2) window M [default: 40]
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Relative zero threshold for eigenvalues [default: 1e-8]
    #[arg(long = "rel-tol", global = true, allow_negative_numbers = true)]
    rel_tol: Option<f64>,
    /// Output directory [default: ilw-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of key=value lines using the long flag names
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the JSON report on stdout
    #[arg(long, global = true)]
    json: bool,
}

fn build_config(opts: &Opts) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        cfg.load_file(path)?;
    }
    let flags: [(&str, Option<String>); 14] = [
        ("L", opts.period.map(|v| v.to_string())),
        ("delta", opts.delta.map(|v| v.to_string())),
        ("k", opts.k.map(|v| v.to_string())),
        ("k-range", opts.k_range.clone()),
        ("N", opts.n.map(|v| v.to_string())),
        ("dt", opts.dt.map(|v| v.to_string())),
        ("t-end", opts.t_end.map(|v| v.to_string())),
        ("scheme", opts.scheme.clone()),
        ("epsilon", opts.epsilon.map(|v| v.to_string())),
        ("mode", opts.mode.map(|v| v.to_string())),
        ("record-every", opts.record_every.map(|v| v.to_string())),
        ("window", opts.window.map(|v| v.to_string())),
        ("rel-tol", opts.rel_tol.map(|v| v.to_string())),
        ("out", opts.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            cfg.set(key, &value)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    let cfg = build_config(&cli.opts)?;
    if !matches!(cli.command, Command::VerifyAll) {
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", cfg.out.display())))?;
    }
    match cli.command {
        Command::Wave => commands::wave(&cfg),
        Command::SpeedScan => commands::speed_scan(&cfg),
        Command::Stability => commands::stability(&cfg),
        Command::Evolve => commands::evolve(&cfg),
        Command::VerifyAll => verify::verify_all(cfg.scheme),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.wall_ms = start.elapsed().as_millis() as u64;
            if cli.opts.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.summary());
            }
            if !matches!(cli.command, Command::VerifyAll) {
                let cfg = build_config(&cli.opts).expect("validated above");
                let name = report.command.replace('-', "_");
                if let Err(e) = std::fs::write(cfg.out.join(format!("{name}.json")), report.to_json() + "\n") {
                    eprintln!("error: cannot write report: {e}");
                    return ExitCode::from(1);
                }
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed: {}", report.failures().join(", "));
                ExitCode::from(1)
            }
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
