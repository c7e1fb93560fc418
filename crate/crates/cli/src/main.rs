//! `kahler`: verify, inspect and classify rotation-invariant Kähler-Einstein
//! potentials from the command line.
//!
//! Exit status: 0 pass, 1 fail, 2 usage or input error, 3 file I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kahler_core::exactalg::parse_rational;
use kahler_core::io::{
    constraints_report, induced_report, normalize_report, oracle_report, parse_potential_file,
    parse_spec_file, verify_report, Format, Render, SpecFile, VerifyMode, VerifyResult,
};
use kahler_core::solver::{sweep, SweepConfig};
use kahler_core::Rational;

#[derive(Parser)]
#[command(name = "kahler", version, about = "Exact checks for rotation-invariant Kähler-Einstein potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Monge-Ampère equation for a numeric spec.
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        /// Einstein constant; overrides the spec file.
        #[arg(long, value_parser = rational_arg)]
        lambda: Option<Rational>,
        /// Truncation-free certificate (default).
        #[arg(long, conflicts_with = "degree")]
        exact: bool,
        /// Compare series through this degree instead.
        #[arg(long)]
        degree: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the residual equations of a spec with symbolic coefficients.
    Constraints {
        #[command(flatten)]
        spec: SpecArg,
        /// Highest residual degree (default: support degree + 1).
        #[arg(long)]
        degree: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate supports, solve, certify and classify.
    Sweep {
        /// Dimension range `A..B` (or a single `A`).
        #[arg(long, value_parser = dims_arg)]
        dims: (usize, usize),
        /// Largest number of extra monomials.
        #[arg(long, default_value_t = 3)]
        max_codim: usize,
        /// Largest monomial degree (default: max(max-codim, 2)).
        #[arg(long)]
        deg_cap: Option<u32>,
        /// Residual degree for the constraints (default: deg-cap + 2).
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Test whether exp(Φ) - 1 has nonnegative coefficients through a degree.
    Induced {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rescale a potential so that its linear part is x1 + ... + xn.
    Normalize {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the x-space determinant with a direct (z, zbar) expansion.
    OracleCheck {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct SpecArg {
    /// Spec or potential file (JSON).
    #[arg(long = "spec", value_name = "PATH")]
    path: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not an exact rational: {s} (use p or p/q)"))
}

fn dims_arg(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad dimension range: {s}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => parse(s).map(|a| (a, a)),
    }
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<SpecFile, Failure> {
    let text = read(path)?;
    parse_spec_file(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(report: &impl Render, output: &OutputArgs) -> Result<(), Failure> {
    let text = report.render(output.format());
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `true` for a passing outcome.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { spec, lambda, exact: _, degree, output } => {
            let file = read_spec(&spec.path)?;
            let lambda = lambda
                .or(file.lambda)
                .ok_or_else(|| Failure::Usage("no Einstein constant: pass --lambda or set \"lambda\" in the spec".into()))?;
            let mode = degree.map_or(VerifyMode::Exact, VerifyMode::Degree);
            let report = verify_report(&file.spec, &lambda, mode).map_err(Failure::usage)?;
            emit(&report, &output)?;
            Ok(report.result == VerifyResult::Pass)
        }
        Command::Constraints { spec, degree, output } => {
            let file = read_spec(&spec.path)?;
            let degree = degree.unwrap_or(file.spec.degree() + 1);
            let report = constraints_report(&file.spec, degree).map_err(Failure::usage)?;
            emit(&report, &output)?;
            Ok(true)
        }
        Command::Sweep { dims, max_codim, deg_cap, degree, jobs, output } => {
            let mut cfg = SweepConfig::new(dims, max_codim).with_jobs(jobs);
            if let Some(c) = deg_cap {
                cfg = cfg.with_deg_cap(c);
            }
            if let Some(d) = degree {
                cfg = cfg.with_truncation(d);
            }
            let report = sweep(&cfg).map_err(Failure::usage)?;
            emit(&report, &output)?;
            let s = &report.summary;
            if s.unresolved > 0 {
                eprintln!("WARNING: {} UNRESOLVED outcome(s)", s.unresolved);
            }
            if output.out.is_some() {
                println!("{} specs: {} SOLVED, {} INFEASIBLE, {} UNRESOLVED", s.specs, s.solved, s.infeasible, s.unresolved);
                println!("{}", report.summary_line());
            }
            // unresolved outcomes are reported, not failed
            Ok(true)
        }
        Command::Induced { spec, degree, output } => {
            let src = parse_potential_file(&read(&spec.path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", spec.path.display())))?;
            let report = induced_report(&src, degree).map_err(Failure::usage)?;
            emit(&report, &output)?;
            Ok(report.report.is_induced())
        }
        Command::Normalize { spec, degree, output } => {
            let src = parse_potential_file(&read(&spec.path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", spec.path.display())))?;
            let report = normalize_report(&src, degree).map_err(Failure::usage)?;
            emit(&report, &output)?;
            Ok(true)
        }
        Command::OracleCheck { spec, output } => {
            let file = read_spec(&spec.path)?;
            let report = oracle_report(&file.spec).map_err(Failure::usage)?;
            emit(&report, &output)?;
            Ok(report.report.equal)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
