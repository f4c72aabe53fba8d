//! Experiment orchestration behind the command-line tool.

mod experiment;
mod report;
mod tasks;

pub use experiment::{run_experiment, Experiment, Suite};
pub use report::{summarize_dir, LadderCount, Report, ReportRow, ReportSummary};
pub use tasks::{
    oracle_value, simulate, solve, thread_pool, DebtorFrequencies, OracleKind, SimulationLaw,
    SimulationSummary, SolveSummary,
};
