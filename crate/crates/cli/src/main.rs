//! `qusp`: batch front end for scenario files, exhaustive scans and
//! certificate generation.
//!
//! Exit codes: 0 when every certificate passes, 1 when a counterexample was
//! found (the report carries the witness), 2 on any input error.

mod report;
mod run;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qusp_core::rational::{self, Rational};
use qusp_core::ratcover::{DEFAULT_DEPTH, DEFAULT_GRID};

use report::Report;
use run::Outcome;
use scenario::{DenseWitness, KelleyDemo, Probes, Scenario, SingularScan};

#[derive(Parser)]
#[command(name = "qusp", version, about = "Computational lab for quasi-uniform spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Count the preorders (finite topologies) on n points.
    Enumerate {
        n: usize,
        /// List every preorder as row strings.
        #[arg(long)]
        list: bool,
    },
    /// Look for distinct QH-equivalent quasi-uniformities on n points.
    Scan { n: usize },
    /// Kelley metric of a seeded random normal sequence, with its sandwich check.
    Kelley {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Certificates for the dense cover of (0,1) ∩ ℚ.
    Witness {
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Comma-separated background scales.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, default_value = "1/4,1/16")]
        scales: Vec<Rational>,
        #[arg(long, default_value_t = 3)]
        star_steps: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Seed for the probe family; without it no probe certificates are made.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100, requires = "seed")]
        probes: usize,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("QUSP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("QUSP_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure worker threads")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs `scenario`, whose canonical input is `input`, and emits its report.
fn report(cli: &Cli, input: &[u8], scenario: serde_json::Value, outcome: Outcome, start: Instant) -> Result<bool> {
    let timing = cli.timing.then(|| start.elapsed().as_millis());
    let r = Report::new(input, scenario, outcome, timing);
    emit(cli.out.as_deref(), &r.to_json())?;
    Ok(r.passed())
}

fn scenario_report(cli: &Cli, s: Scenario, start: Instant) -> Result<bool> {
    let echo = serde_json::to_value(&s)?;
    let input = serde_json::to_vec(&echo)?;
    let outcome = run::run(&s)?;
    report(cli, &input, echo, outcome, start)
}

fn execute(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let start = Instant::now();
    match &cli.command {
        Command::Run { file, format } => {
            let (s, bytes) = Scenario::load(file)?;
            match format {
                Format::Dot => {
                    emit(cli.out.as_deref(), &run::dot(&s)?)?;
                    Ok(true)
                }
                Format::Json => {
                    let outcome = run::run(&s)?;
                    report(cli, &bytes, serde_json::to_value(&s)?, outcome, start)
                }
            }
        }
        Command::Enumerate { n, list } => {
            let echo = serde_json::json!({ "command": "enumerate", "n": n, "list": list });
            let input = serde_json::to_vec(&echo)?;
            let outcome = run::enumerate(*n, *list)?;
            report(cli, &input, echo, outcome, start)
        }
        Command::Scan { n } => scenario_report(cli, Scenario::SingularScan(SingularScan { n: *n }), start),
        Command::Kelley { seed, n, depth } => scenario_report(
            cli,
            Scenario::KelleyDemo(KelleyDemo {
                seed: *seed,
                n: *n,
                depth: *depth,
            }),
            start,
        ),
        Command::Witness {
            eps,
            depth,
            scales,
            star_steps,
            grid,
            seed,
            probes,
        } => {
            let d = DenseWitness {
                eps: eps.clone(),
                depth: *depth,
                scales: scales.clone(),
                star_steps: *star_steps,
                grid: *grid,
                probes: seed.map(|seed| Probes { seed, count: *probes }),
            };
            scenario_report(cli, Scenario::DenseWitness(d), start)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
