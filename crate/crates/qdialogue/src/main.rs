use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdialogue::cli::{self, Invocation, OutputFormat};

/// Quantum dialogue protocol simulator.
#[derive(Parser)]
#[command(name = "qdialogue", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one full dialogue and write the transcript
    Dialogue(CommonArgs),
    /// Sweep rotation angles under an attack and write per-angle metrics
    AttackSweep(CommonArgs),
    /// Efficiency report: closed formula cross-checked by a transcript audit
    Efficiency(CommonArgs),
    /// Key establishment only: abort rate, decoy stats, key fidelity
    KeygenCheck(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; unknown keys are rejected
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count (overrides the config file)
    #[arg(long)]
    trials: Option<usize>,
    /// Output path; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn assemble(args: &CommonArgs, default_format: OutputFormat) -> Result<Invocation, String> {
    let format = match args.format {
        Some(FormatArg::Json) => OutputFormat::Json,
        Some(FormatArg::Csv) => OutputFormat::Csv,
        None => default_format,
    };
    Invocation::assemble(
        args.config.as_deref(),
        args.seed,
        args.trials,
        args.out.clone(),
        format,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, default_format, run): (&CommonArgs, OutputFormat, fn(&Invocation) -> i32) =
        match &cli.command {
            Command::Dialogue(a) => (a, OutputFormat::Json, cli::cmd_dialogue),
            Command::AttackSweep(a) => (a, OutputFormat::Csv, cli::cmd_attack_sweep),
            Command::Efficiency(a) => (a, OutputFormat::Json, cli::cmd_efficiency),
            Command::KeygenCheck(a) => (a, OutputFormat::Json, cli::cmd_keygen_check),
        };
    let code = match assemble(args, default_format) {
        Ok(inv) => run(&inv),
        Err(msg) => {
            eprintln!("error: {msg}");
            cli::exit_code::USAGE
        }
    };
    ExitCode::from(code as u8)
}
