use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ctrlcheck_cli::{AnalyzeArgs, Outcome, SweepArgs, TOL_ENV};

/// Complete-controllability analysis for dipole-driven N-level quantum systems.
#[derive(Parser)]
#[command(name = "ctrlcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one system description file.
    Analyze {
        spec: PathBuf,
        /// Closure tolerance (relative).
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the machine-readable JSON report.
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Emit the human-readable report (default).
        #[arg(long)]
        text: bool,
        /// Skip the constructive-proof witnesses.
        #[arg(long)]
        no_witness: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Recompute the reference dimension grid and compare against it.
    Table2 {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Analyze a template over a grid of parameter values.
    Sweep {
        template: PathBuf,
        /// `path=v1,v2,...`; repeat for a Cartesian grid.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// One JSON object per line instead of summary lines.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        no_witness: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let env_tol = std::env::var(TOL_ENV).ok();
    let outcome: Outcome = match cli.command {
        Command::Analyze {
            spec,
            tol,
            json,
            text: _,
            no_witness,
            timing,
        } => ctrlcheck_cli::analyze(
            &spec,
            &AnalyzeArgs {
                tol,
                json,
                no_witness,
                timing,
                env_tol,
            },
        ),
        Command::Table2 { max_n, json } => ctrlcheck_cli::table2(max_n, json, env_tol.as_deref()),
        Command::Sweep {
            template,
            params,
            tol,
            json,
            no_witness,
        } => ctrlcheck_cli::sweep(
            &template,
            &SweepArgs {
                params,
                tol,
                json,
                no_witness,
                env_tol,
            },
        ),
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}
