//! The `entsim` command line: run, verify and sweep the protocols and emit
//! JSON or CSV reports.
//!
//! Data goes to standard output (or `--out`), progress to standard error.
//! Exit status is 0 when the summary passes, 1 when verification fails and
//! 2 for usage errors, including parameters beyond the resource caps.

mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    composed_grid_point, dj_check, eq_reduce, verify_composed, verify_slot, verify_table,
    ComposedRow, DjCheckRow, EqRow, SlotRow, TableRow,
};
pub use report::{Format, Report, Summary};

#[derive(Debug, Parser)]
#[command(name = "entsim", version, about = "Exact classical simulation of Bell-pair statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Report encoding.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analytic,
    Montecarlo,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    /// `M_A = {-pi/8, 3pi/8}`, `M_B = {pi/8, -3pi/8}`.
    Bell,
    /// `M_A = M_B = {0, pi/2}`.
    Correlated,
    /// Every Deutsch-Jozsa measurement on `--n` qubits.
    Dj,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the four-bit protocol on a grid over [0, 2pi)^2.
    #[command(name = "verify-slot", visible_alias = "verify-thm2")]
    VerifySlot {
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-3)]
        significance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the eight-bit protocol for general measurements.
    #[command(name = "verify-composed", visible_alias = "verify-thm3")]
    VerifyComposed {
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the table protocol on a finite scenario.
    #[command(name = "verify-table", visible_alias = "verify-thm1")]
    VerifyTable {
        #[arg(long, value_enum, default_value_t = ScenarioKind::Bell)]
        scenario: ScenarioKind,
        /// Qubit count for the Deutsch-Jozsa scenario.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        significance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Check the Deutsch-Jozsa equal-outcome probabilities.
    #[command(name = "dj-check")]
    DjCheck {
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Pairs to sample when n > 2.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Solve restricted equality with the table simulator.
    #[command(name = "eq-reduce")]
    EqReduce {
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Independent seeds per promise pair.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Pairs to sample when n = 3.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// What `main` should do after a command.
pub struct Outcome {
    pub text: String,
    pub out: Option<PathBuf>,
    pub pass: bool,
}

fn finish<R: serde::Serialize>(report: Report<R>, output: &Output) -> crate::Result<Outcome> {
    Ok(Outcome {
        text: report.render(output.format)?,
        out: output.out.clone(),
        pass: report.summary.pass,
    })
}

/// Runs a parsed command and renders its report.
pub fn execute(cli: &Cli) -> crate::Result<Outcome> {
    match &cli.command {
        Command::VerifySlot { grid, samples, seed, mode, significance, output } => {
            finish(verify_slot(*grid, *samples, *seed, *mode, *significance)?, output)
        }
        Command::VerifyComposed { grid, samples, seed, output } => {
            finish(verify_composed(*grid, *samples, *seed)?, output)
        }
        Command::VerifyTable { scenario, n, samples, seed, significance, output } => {
            finish(verify_table(*scenario, *n, *samples, *seed, *significance)?, output)
        }
        Command::DjCheck { n, samples, seed, output } => {
            finish(dj_check(*n, *samples, *seed)?, output)
        }
        Command::EqReduce { n, seeds, samples, seed, output } => {
            finish(eq_reduce(*n, *seeds, *samples, *seed)?, output)
        }
    }
}
