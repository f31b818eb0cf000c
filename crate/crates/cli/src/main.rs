use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use submin_cli::commands::{self, CliResult, Format};
use submin_cli::generate::{GenerateConfig, TermSpec};

/// Exact minimization of sums of low-order submodular terms.
#[derive(Parser)]
#[command(name = "submin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize an instance and report the minimizer and phase statistics.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Enumerate every term's constraints after each augmentation (slow).
        #[arg(long)]
        audit: bool,
        /// Include the wall time.
        #[arg(long)]
        stats: bool,
    },
    /// Check an instance and print the violations found.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Rewrite non-normalized terms, moving the difference into the unary
    /// capacities and the offset.
    Normalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a random normalized instance.
    Generate {
        #[arg(long)]
        nodes: usize,
        /// Comma-separated `kind:count[:size]` with kind one of pairwise,
        /// cardinality, bicardinality, general or mixed. For mixed the size
        /// is an upper bound.
        #[arg(long, value_delimiter = ',')]
        terms: Vec<TermSpec>,
        #[arg(long, default_value_t = 100)]
        max_value: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Minimize by enumerating all subsets (at most 20 nodes).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Solve { input, output, format, audit, stats } => {
            let text = commands::solve(&input, format, audit, stats)?;
            commands::write_output(output.as_deref(), &text)?;
        }
        Command::Validate { input } => {
            let (text, valid) = commands::validate(&input)?;
            commands::write_output(None, &text)?;
            if !valid {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Normalize { input, output } => {
            let text = commands::normalize(&input)?;
            commands::write_output(output.as_deref(), &text)?;
        }
        Command::Generate { nodes, terms, max_value, seed, output } => {
            let config = GenerateConfig { nodes, terms, max_value, seed };
            let text = commands::generate_instance(&config)?;
            commands::write_output(output.as_deref(), &text)?;
        }
        Command::Oracle { input, format } => {
            let text = commands::oracle(&input, format)?;
            commands::write_output(None, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
