//! `orbitmat`: analyze iteration matrices of fixed-point-free integer maps.
//!
//! Exit codes: 0 analyzed without a cycle, 3 cycle found, 1 usage or parse
//! error, 2 overflow or size limit.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use orbitmat::exact_oracle::DEFAULT_ORACLE_LIMIT;
use orbitmat::svg::write_svg;
use orbitmat::{run_analyze, run_oracle, scan_for_cycle, AnalyzeOptions, Error};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_CYCLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "orbitmat",
    version,
    about = "Cycle indicator and nilpotent inverse for local iteration matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one function at one window size and print a JSON report.
    Analyze {
        /// Function spec, e.g. `collatz` or `rcwa:mod=2;0:1,0;1:3,1;cut=2`.
        #[arg(long = "fn", value_name = "SPEC")]
        spec: String,
        #[arg(long, value_name = "N")]
        n: usize,
        /// Also write the report to this file.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// SVG sparsity plot of I - M.
        #[arg(long, value_name = "PATH")]
        svg_ihat: Option<PathBuf>,
        /// SVG sparsity plot of (I - M)^-1 (requires no cycle).
        #[arg(long, value_name = "PATH")]
        svg_inv: Option<PathBuf>,
        /// Cross-check with the dense exact oracle (n <= 512).
        #[arg(long)]
        verify: bool,
        /// Count inverse nonzeros without building the inverse.
        #[arg(long)]
        no_materialize_inverse: bool,
    },
    /// Find the smallest window size in a range at which a cycle appears.
    Scan {
        #[arg(long = "fn", value_name = "SPEC")]
        spec: String,
        #[arg(long, value_name = "A")]
        n_min: usize,
        #[arg(long, value_name = "B")]
        n_max: usize,
    },
    /// Exact determinant and inverse verification only.
    Oracle {
        #[arg(long = "fn", value_name = "SPEC")]
        spec: String,
        #[arg(long, value_name = "N")]
        n: usize,
    },
}

fn exit_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_limit() => EXIT_LIMIT,
        _ => EXIT_USAGE,
    }
}

fn cycle_code(found: bool) -> u8 {
    if found {
        EXIT_CYCLE
    } else {
        EXIT_OK
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Analyze {
            spec,
            n,
            json,
            svg_ihat,
            svg_inv,
            verify,
            no_materialize_inverse,
        } => {
            let opts = AnalyzeOptions {
                verify,
                materialize_inverse: !no_materialize_inverse || svg_inv.is_some(),
                oracle_limit: DEFAULT_ORACLE_LIMIT,
            };
            let analysis = run_analyze(&spec, n, &opts)?;
            let text = analysis.report.to_json();
            if let Some(path) = json {
                std::fs::write(&path, format!("{text}\n"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = svg_ihat {
                write_svg(&analysis.ihat, &path)?;
            }
            if let Some(path) = svg_inv {
                match &analysis.inverse {
                    Some(inv) => write_svg(inv, &path)?,
                    None => eprintln!("no inverse: the local function has a cycle"),
                }
            }
            println!("{text}");
            Ok(cycle_code(analysis.report.has_cycle))
        }
        Command::Scan { spec, n_min, n_max } => {
            let outcome = scan_for_cycle(&spec, n_min, n_max)?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
            Ok(cycle_code(outcome.first.is_some()))
        }
        Command::Oracle { spec, n } => {
            let report = run_oracle(&spec, n, DEFAULT_ORACLE_LIMIT)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(cycle_code(report.det == 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}
