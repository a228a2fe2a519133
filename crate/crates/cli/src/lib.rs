//! Command-line front end for the cone complementarity toolkit.
//!
//! Every command prints one JSON report on standard output and exits with
//! 0 (success or solution), 1 (certified negative outcome) or 2 (input
//! error).

pub mod commands;
pub mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use conelcp_core::random::MatrixKind;
use serde::Serialize;
use serde_json::Value;

use commands::{CliError, CommandOutput, Settings};
use input::{check_tol, InstanceFile};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 0;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "conelcp",
    version,
    about = "Complementarity problems on simplicial cones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Numerical tolerance [default: 1e-9]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random offsets tried by the Q-property check [default: 200]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for every sampled quantity [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Human-readable summary on standard error
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trichotomy class and P/F/Q verdicts with certificates
    Classify { file: PathBuf },
    /// Solve LCP(K, M, q); K defaults to the nonnegative orthant
    Solve { file: PathBuf },
    /// Congruence-orbit witnesses for the matrix's trichotomy branch
    Witness { file: PathBuf },
    /// Exhaustive enumeration of all solutions
    Oracle { file: PathBuf },
    /// Print a seeded random instance
    Gen {
        #[arg(long)]
        kind: MatrixKind,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    file: String,
    settings: Settings,
    input_digest: String,
    result: Value,
    wall_time_ms: f64,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INPUT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(tol) = cli.tol {
        check_tol(tol).map_err(CliError::Usage)?;
    }
    let (name, file) = match &cli.command {
        Command::Gen { kind, dim } => {
            let text = commands::gen(*kind, *dim, cli.seed.unwrap_or(DEFAULT_SEED))?;
            println!("{text}");
            if cli.verbose {
                eprintln!("generated {kind} instance of dimension {dim}");
            }
            return Ok(0);
        }
        Command::Classify { file } => ("classify", file),
        Command::Solve { file } => ("solve", file),
        Command::Witness { file } => ("witness", file),
        Command::Oracle { file } => ("oracle", file),
    };

    let start = Instant::now();
    let (inst, input_digest) = input::load(file)?;
    let settings = resolve(cli, &inst);
    let run: fn(&InstanceFile, &Settings) -> Result<CommandOutput, CliError> = match name {
        "classify" => commands::classify,
        "solve" => commands::solve,
        "witness" => commands::witness,
        _ => commands::oracle,
    };
    let out = run(&inst, &settings)?;
    let envelope = Envelope {
        command: name,
        file: display(file),
        settings,
        input_digest,
        result: out.result,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let text = serde_json::to_string_pretty(&envelope).expect("reports serialize to JSON");
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{text}");
    if cli.verbose {
        eprintln!("{name}: {}", out.summary);
    }
    Ok(out.status.code())
}

/// Flags override instance values, which override the defaults.
pub fn resolve(cli: &Cli, inst: &InstanceFile) -> Settings {
    Settings {
        tol: cli.tol.or(inst.tol).unwrap_or(DEFAULT_TOL),
        samples: cli.samples.or(inst.samples).unwrap_or(DEFAULT_SAMPLES),
        seed: cli.seed.or(inst.seed).unwrap_or(DEFAULT_SEED),
    }
}

fn display(path: &Path) -> String {
    path.to_string_lossy().replace('\\', "/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_precedence() {
        let mut inst = InstanceFile::parse("1,0\n0,1").unwrap();
        let cli = Cli::try_parse_from(["conelcp", "classify", "x.csv"]).unwrap();
        assert_eq!(
            resolve(&cli, &inst),
            Settings {
                tol: DEFAULT_TOL,
                samples: DEFAULT_SAMPLES,
                seed: DEFAULT_SEED
            }
        );
        inst.tol = Some(1e-6);
        inst.seed = Some(4);
        let cli = Cli::try_parse_from([
            "conelcp",
            "classify",
            "x.csv",
            "--seed",
            "9",
            "--samples",
            "3",
        ])
        .unwrap();
        assert_eq!(
            resolve(&cli, &inst),
            Settings {
                tol: 1e-6,
                samples: 3,
                seed: 9
            }
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["conelcp", "gen", "--kind", "bogus", "--dim", "2"]), 2);
        assert_eq!(run(["conelcp", "gen", "--kind", "pd", "--dim", "0"]), 2);
        assert_eq!(run(["conelcp", "classify", "/nonexistent/file.json"]), 2);
        assert_eq!(run(["conelcp", "--tol", "-1", "classify", "x"]), 2);
        assert_eq!(run(["conelcp"]), 2);
    }
}
