//! `snakevqe`: run snake and gradient-descent VQE experiments over
//! Hamiltonian families.
//!
//! Exit codes: 0 when every run converged, 1 on invalid input, 2 when an
//! iteration budget ran out.

mod commands;
mod config;
mod plot;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{SolveArgs, Status};
use config::{AnsatzFlags, FamilyFlags, Optimizer, RunFlags};

#[derive(Parser)]
#[command(
    name = "snakevqe",
    version,
    about = "Collective (snake) VQE over Hamiltonian families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one ansatz over a whole family; writes results.csv, report.json, trajectory.csv
    Solve {
        #[command(flatten)]
        family: FamilyFlags,
        #[command(flatten)]
        ansatz: AnsatzFlags,
        /// [default: snake]
        #[arg(long, value_enum)]
        optimizer: Option<Optimizer>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Snake against gradient descent on the Styblinski-Tang family
    BenchmarkSt {
        /// Number of t points on [0, 6]
        #[arg(long)]
        members: Option<usize>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Snake against gradient descent with the nonconvex two-parameter H2 ansatz
    NonconvexH2 {
        #[command(flatten)]
        family: FamilyFlags,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Exact ground energies by dense diagonalization; writes oracle.csv
    Oracle {
        #[command(flatten)]
        family: FamilyFlags,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Render SVG plots from result, trajectory or benchmark CSV files
    Plot {
        #[arg(value_name = "CSV")]
        inputs: Vec<PathBuf>,
        /// Directory for the SVG files [default: next to each input]
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Solve {
            family,
            ansatz,
            optimizer,
            run,
        } => commands::solve(SolveArgs {
            family,
            ansatz,
            optimizer: *optimizer,
            run,
        }),
        Command::BenchmarkSt { members, run } => commands::benchmark_st(*members, run),
        Command::NonconvexH2 { family, run } => commands::nonconvex_h2(family, run),
        Command::Oracle {
            family,
            config,
            out,
        } => commands::oracle(family, config.as_deref(), out.as_ref()),
        Command::Plot { inputs, out } => commands::plot(inputs, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Status::Converged) => ExitCode::SUCCESS,
        Ok(Status::BudgetExhausted) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
