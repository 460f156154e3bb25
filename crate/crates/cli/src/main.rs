use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use sbmc_core::besw::{generate_model, parse_scenario, run_suite, BeswError, GenOptions, SuiteOptions};
use sbmc_core::checker::{check, CheckError, CheckOptions};
use sbmc_core::lts::{explore, read_lts, write_lts, ExploreError, ExploreLimits, Lts};
use sbmc_core::model::{parse_model, typecheck, TypedModel};
use sbmc_core::mucalc::{parse_formula, Signature};

#[derive(Parser)]
#[command(name = "sbmc", version, about = "Explicit-state model checking of process specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck a model, then print it in canonical form.
    Parse { model: PathBuf },
    /// Explore the state space of a model and report its size.
    Explore {
        model: PathBuf,
        #[command(flatten)]
        explore: ExploreArgs,
        /// Write the transition system to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a property file against a model or an exported `.ltx` file.
    Check {
        /// A model (`.sbm`) or a transition system (`.ltx`).
        input: PathBuf,
        /// The property file.
        #[arg(short, long)]
        formula: PathBuf,
        /// Print a counterexample when the property fails.
        #[arg(long)]
        trace: bool,
        /// Print state, equation and timing statistics.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        explore: ExploreArgs,
    },
    /// Generate the controller model of a scenario and check the property corpus.
    Suite {
        scenario: PathBuf,
        /// One JSON record per property instead of a table.
        #[arg(long)]
        json: bool,
        /// Check only these property ids.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        #[command(flatten)]
        explore: ExploreArgs,
    },
    /// Write the controller model of a scenario.
    Gen {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Explore a model and write its transition system.
    Export {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        explore: ExploreArgs,
    },
}

#[derive(Args)]
struct ExploreArgs {
    /// Stop exploring after this many states.
    #[arg(long)]
    max_states: Option<usize>,
    /// Exploration threads; defaults to the available parallelism.
    #[arg(long, env = "SBMC_WORKERS")]
    workers: Option<usize>,
}

impl ExploreArgs {
    fn limits(&self) -> ExploreLimits {
        let mut limits = ExploreLimits::default();
        if let Some(n) = self.max_states {
            limits.max_states = n;
        }
        limits
    }

    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Explore(ExploreError),
    #[error("{0}")]
    Check(CheckError),
    #[error("{0}")]
    Suite(BeswError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Explore(ExploreError::LimitExceeded { .. })
            | CliError::Check(CheckError::CapacityExceeded { .. })
            | CliError::Suite(BeswError::Explore(ExploreError::LimitExceeded { .. }))
            | CliError::Suite(BeswError::Check { source: CheckError::CapacityExceeded { .. }, .. }) => 3,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<TypedModel, CliError> {
    let input = |message: String| CliError::Input { path: path.to_path_buf(), message };
    let src = parse_model(&read(path)?).map_err(|e| input(e.to_string()))?;
    typecheck(&src).map_err(|e| input(e.to_string()))
}

fn explore_model(path: &Path, args: &ExploreArgs) -> Result<(TypedModel, Lts), CliError> {
    let model = load_model(path)?;
    let lts = explore(&model, args.limits(), args.workers()).map_err(CliError::Explore)?;
    Ok((model, lts))
}

fn is_lts_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "ltx")
}

fn lts_text(lts: &Lts) -> String {
    let mut out = Vec::new();
    write_lts(lts, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("labels are UTF-8")
}

fn deadlocks(lts: &Lts) -> usize {
    let mut has_out = vec![false; lts.num_states as usize];
    for t in &lts.transitions {
        has_out[t.src as usize] = true;
    }
    has_out.iter().filter(|h| !**h).count()
}

/// Runs one command; `Ok(false)` means a property failed or a verdict
/// differed from its expectation.
fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Parse { model } => {
            let input = |message: String| CliError::Input { path: model.clone(), message };
            let src = parse_model(&read(&model)?).map_err(|e| input(e.to_string()))?;
            typecheck(&src).map_err(|e| input(e.to_string()))?;
            print!("{src}");
            Ok(true)
        }
        Command::Explore { model, explore: args, output } => {
            let start = Instant::now();
            let (_, lts) = explore_model(&model, &args)?;
            println!("states: {}", lts.num_states);
            println!("transitions: {}", lts.transitions.len());
            println!("deadlocks: {}", deadlocks(&lts));
            eprintln!("explored in {} ms with {} workers", start.elapsed().as_millis(), args.workers());
            if let Some(out) = output {
                write_output(Some(&out), &lts_text(&lts))?;
            }
            Ok(true)
        }
        Command::Export { model, output, explore: args } => {
            let (_, lts) = explore_model(&model, &args)?;
            write_output(Some(&output), &lts_text(&lts))?;
            Ok(true)
        }
        Command::Check { input, formula, trace, stats, explore: args } => {
            let start = Instant::now();
            let (lts, sig) = if is_lts_file(&input) {
                let file = fs::File::open(&input).map_err(|source| CliError::Io { path: input.clone(), source })?;
                let lts = read_lts(&mut BufReader::new(file))
                    .map_err(|e| CliError::Input { path: input.clone(), message: e.to_string() })?;
                let sig = Signature::from_lts(&lts);
                (lts, sig)
            } else {
                let (model, lts) = explore_model(&input, &args)?;
                (lts, Signature::from_model(&model))
            };
            let explored = start.elapsed();
            let (_, f) = parse_formula(&read(&formula)?, &sig)
                .map_err(|e| CliError::Input { path: formula.clone(), message: e.to_string() })?;
            let r = check(&lts, &f, &sig, CheckOptions::default()).map_err(CliError::Check)?;
            let mut out = BufWriter::new(io::stdout().lock());
            let _ = writeln!(out, "holds: {}", r.holds);
            if trace && !r.holds {
                match &r.counterexample {
                    Some(cx) => {
                        let _ = writeln!(out, "trace ({} steps):", cx.labels.len());
                        for l in &cx.labels {
                            let _ = writeln!(out, "  {l}");
                        }
                    }
                    None => eprintln!("no trace: {}", CheckError::NotSafetyFragment),
                }
            }
            if stats {
                let _ = writeln!(out, "states: {}", lts.num_states);
                let _ = writeln!(out, "transitions: {}", lts.transitions.len());
                let _ = writeln!(out, "equations: {}", r.stats.equations);
                let _ = writeln!(out, "blocks: {}", r.stats.blocks);
                let _ = writeln!(out, "iterations: {}", r.stats.iterations);
                let _ = writeln!(out, "explore ms: {}", explored.as_millis());
                let _ = writeln!(out, "check ms: {}", r.stats.wall.as_millis());
            }
            Ok(r.holds)
        }
        Command::Suite { scenario, json, only, explore: args } => {
            let c = parse_scenario(&read(&scenario)?)
                .map_err(|e| CliError::Input { path: scenario.clone(), message: e.to_string() })?;
            let opts = SuiteOptions { workers: args.workers(), limits: args.limits(), gen: GenOptions::default(), only };
            let report = run_suite(&c, &opts).map_err(CliError::Suite)?;
            if json {
                let mut out = BufWriter::new(io::stdout().lock());
                for r in report.records() {
                    let _ = writeln!(out, "{}", serde_json::to_string(&r).expect("records serialize"));
                }
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.all_match())
        }
        Command::Gen { scenario, output } => {
            let c = parse_scenario(&read(&scenario)?)
                .map_err(|e| CliError::Input { path: scenario.clone(), message: e.to_string() })?;
            write_output(output.as_deref(), &generate_model(&c, &GenOptions::default()))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
