use clap::{Parser, Subcommand};
use splinebound::constants::{c_hpkr, figure_table, max_smooth_bounds};
use splinebound::harness::{run_convergence, run_verify, ErrorReport, ExperimentConfig};
use splinebound::projection::estimate_constant;
use splinebound::spline::{KnotSequence, SplineSpace};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "splinebound", version, about = "Explicit spline approximation constants and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the data of one constant plot as CSV.
    Constants {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: u8,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the candidates of C_{h,p,k,r} as JSON.
    Bound {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// Smoothness; defaults to p - 1.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i32>,
        /// All maximal-smoothness variants (product, harmonic, ...).
        #[arg(long, conflicts_with = "k")]
        variants: bool,
    },
    /// Verify the estimates selected by a JSON experiment config.
    Project {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a refinement study and check the fitted orders.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the operator norm ‖(I - Z) K^r‖ on a uniform mesh.
    Opnorm {
        #[arg(long)]
        p: usize,
        #[arg(long, allow_negative_numbers = true)]
        k: i32,
        /// Number of interior knots.
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] splinebound::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn summary(report: &ErrorReport) -> (usize, usize, usize) {
    let measured = report.rows.iter().filter(|r| r.effectivity().is_some()).count();
    let violations = report.rows.iter().filter(|r| r.violates()).count();
    (measured, report.rows.len() - measured, violations)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Constants { figure, out } => emit(&figure_table(figure)?.to_csv(), out.as_deref()),
        Command::Bound {
            p,
            r,
            h,
            length,
            k,
            variants,
        } => {
            let b = if variants {
                max_smooth_bounds(h, p, r, length)?
            } else {
                c_hpkr(h, p, k.unwrap_or(p as i32 - 1), r, length)?
            };
            emit(&format!("{}\n", b.to_json()), None)
        }
        Command::Project { config, out } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            let report = run_verify(&cfg)?;
            emit(&report.to_csv(), out.as_deref())?;
            let (measured, skipped, bad) = summary(&report);
            eprintln!("{measured} rows measured, {skipped} skipped, {bad} violations");
            if bad > 0 {
                return Err(CliError::Failed(format!("{bad} rows exceed their bound")));
            }
            Ok(())
        }
        Command::Convergence { config, out } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            let report = run_convergence(&cfg)?;
            emit(&report.to_csv(), out.as_deref())?;
            let (_, _, bad) = summary(&report);
            let slow = report.slow_rows().len();
            eprintln!("{bad} violations, {slow} rows below the expected order");
            if bad > 0 || slow > 0 {
                return Err(CliError::Failed("convergence study failed".into()));
            }
            Ok(())
        }
        Command::Opnorm { p, k, n, r, grid, a, b } => {
            let space = SplineSpace::new(KnotSequence::uniform(a, b, n)?, p, k)?;
            let e = estimate_constant(&space, r, grid)?;
            let json = serde_json::to_string_pretty(&e).expect("estimate serializes");
            emit(&format!("{json}\n"), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
