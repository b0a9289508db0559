//! `critnet`: critical-state analysis, recall dynamics and pattern packing
//! for networks of bosonic qudit neurons.
//!
//! Reports go to standard output as JSON (or to `--json`), tables to
//! `--csv`. Failures print one JSON line on standard error and exit with
//! 2 (invalid input), 3 (numerical failure) or 4 (capacity limit).

mod config;
mod report;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use critnet::critical::DEFAULT_ENUMERATION_LIMIT;
use critnet::fock::DEFAULT_DIMENSION_LIMIT;

use config::{Params, Task};
use report::CliError;
use tasks::Limits;

#[derive(Debug, Parser)]
#[command(name = "critnet", version, about = "Bosonic qudit neuron networks near criticality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest Fock-space dimension the exact engine may allocate.
    #[arg(long, global = true, env = "CRITNET_DIM_LIMIT")]
    dim_limit: Option<u128>,
    /// Largest pattern count enumerated one by one.
    #[arg(long, global = true, env = "CRITNET_ENUM_LIMIT")]
    enum_limit: Option<u128>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical splits, gaps and pattern counts of a model.
    Analyze(TaskArgs),
    /// Response of the output layer to a stimulus.
    Evolve(TaskArgs),
    /// Recall from the critical state against recall from the ground state.
    Compare(TaskArgs),
    /// Count separated classical patterns within a gap budget.
    Pack(TaskArgs),
    /// The bundled six-neuron example.
    PaperExample(TaskArgs),
    /// Run the task named in a scenario file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct TaskArgs {
    /// Scenario file (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (TOML).
    config: PathBuf,
    #[command(flatten)]
    params: Params,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let limits = Limits {
        dimension: cli.dim_limit.unwrap_or(DEFAULT_DIMENSION_LIMIT),
        enumeration: cli.enum_limit.unwrap_or(DEFAULT_ENUMERATION_LIMIT),
    };
    let (task, config, flags) = match cli.command {
        Command::Analyze(a) => (Some(Task::Analyze), a.config, a.params),
        Command::Evolve(a) => (Some(Task::Evolve), a.config, a.params),
        Command::Compare(a) => (Some(Task::Compare), a.config, a.params),
        Command::Pack(a) => (Some(Task::Pack), a.config, a.params),
        Command::PaperExample(a) => (Some(Task::PaperExample), a.config, a.params),
        Command::Run(a) => (None, Some(a.config), a.params),
    };
    let (task, params) = config::resolve(task, config.as_deref(), flags)?;
    let output = tasks::run(task, &params, &limits)?;
    if let (Some(path), Some(table)) = (&params.csv, &output.table) {
        table.write(path)?;
    }
    report::emit_json(&output.report, params.json.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
