use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dopwalk::config::{Format, OperatorKind, Overrides, RunPlan, WalkConfig};
use dopwalk::{run, CliError};

/// Density-operator quantum walks on directed graphs.
#[derive(Parser)]
#[command(name = "dop-walk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a walk and write the vertex distribution at every step.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Walk configuration (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in instance; `paper-line` is the only one.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    /// Line window margin beyond the light cone.
    #[arg(long, value_name = "N")]
    margin: Option<usize>,
    /// json or csv.
    #[arg(long)]
    format: Option<Format>,
    /// Distribution file; stdout when absent. Dumps are written beside it.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Write every ρ_t to `<output stem>.states.json`.
    #[arg(long)]
    dump_states: bool,
    /// Write pi, swap or u to `<output stem>.operator-<which>.json`.
    #[arg(long, value_name = "WHICH")]
    dump_operator: Option<OperatorKind>,
    /// Check operator and state invariants and report residuals on stderr.
    #[arg(long)]
    check_invariants: bool,
    /// Measure after every step and continue from the collapsed state.
    #[arg(long)]
    collapse_each_step: bool,
    /// Tolerance for validation and invariant checks.
    #[arg(long, value_name = "X")]
    tolerance: Option<f64>,
    /// Seed for outcome sampling with --collapse-each-step.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn load_config(path: &PathBuf) -> Result<WalkConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::ParseConfig {
        path: path.clone(),
        source,
    })
}

fn execute(args: RunArgs) -> Result<(), CliError> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => WalkConfig::default(),
    };
    let flags = Overrides {
        preset: args.preset,
        steps: args.steps,
        margin: args.margin,
        format: args.format,
        output: args.output,
        dump_states: args.dump_states,
        dump_operator: args.dump_operator,
        check_invariants: args.check_invariants,
        collapse_each_step: args.collapse_each_step,
        tolerance: args.tolerance,
        seed: args.seed,
    };
    let plan = RunPlan::resolve(config, flags).map_err(CliError::Validation)?;
    run(&plan, &mut io::stdout().lock(), &mut io::stderr().lock()).map(|_| ())
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = e.report(&mut io::stderr().lock());
            ExitCode::from(e.exit_code())
        }
    }
}
