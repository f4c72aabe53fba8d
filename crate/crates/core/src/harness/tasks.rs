//! Single-shot tasks behind `simulate`, `solve` and `oracle`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::HarnessError;
use crate::ladder::{
    build_ladder, count_equations, integrate_ladder, ladder_dump, survival_via_theorem_with,
    LadderDump, SolverOptions,
};
use crate::model::{DebtorSet, Model};
use crate::oracles::{case2_ode_survival, markov_joint_survival, single_name_survival_oracle};
use crate::sim::{
    collect_paths, estimates_from_rows, simulate_contagion_path, simulate_fbar_path,
    simulate_fbar_system_path, simulate_p0_path, PathSeed, SystemPath,
};
use crate::stats::EstimateCI;

/// Thread pool with `threads` workers, or one per core when `None`.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Usage(format!("cannot start worker pool: {e}")))
}

/// Path law for `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationLaw {
    /// Baseline law without contagion.
    P0,
    /// Contagion law for the contagious set.
    Contagion,
    /// Default-adjusted environment for the contagious set, extended with
    /// threshold defaults.
    PBar,
}

impl FromStr for SimulationLaw {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p0" => Ok(SimulationLaw::P0),
            "pc" => Ok(SimulationLaw::Contagion),
            "pbar" => Ok(SimulationLaw::PBar),
            _ => Err(format!("unknown law {s:?}; expected p0, pc or pbar")),
        }
    }
}

impl fmt::Display for SimulationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimulationLaw::P0 => "p0",
            SimulationLaw::Contagion => "pc",
            SimulationLaw::PBar => "pbar",
        })
    }
}

/// Per-debtor event frequencies by `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebtorFrequencies {
    pub debtor: usize,
    pub survival: EstimateCI,
    pub a_default: EstimateCI,
    pub b_default: EstimateCI,
    /// `P(T(k) > t)`.
    pub no_t_event: EstimateCI,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub law: String,
    pub contagious: String,
    pub t: f64,
    pub paths: usize,
    pub seed: u64,
    pub debtors: Vec<DebtorFrequencies>,
}

fn sample(model: &Model, law: SimulationLaw, c: DebtorSet, seed: PathSeed) -> SystemPath {
    match law {
        SimulationLaw::P0 => simulate_p0_path(model, seed),
        SimulationLaw::Contagion => simulate_contagion_path(model, c, seed),
        SimulationLaw::PBar => simulate_fbar_system_path(model, c, seed),
    }
}

/// Simulates `paths` paths and summarizes each debtor at `t`. The paths are
/// returned as well, in index order, for dumping.
pub fn simulate(
    model: &Model,
    law: SimulationLaw,
    contagious: DebtorSet,
    paths: usize,
    seed: u64,
    t: f64,
) -> (SimulationSummary, Vec<SystemPath>) {
    let n = model.n();
    let all = collect_paths(paths, |p| sample(model, law, contagious, PathSeed::new(seed, p)));
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let rows: Vec<Vec<f64>> = all
        .iter()
        .map(|path| {
            (0..n)
                .flat_map(|k| {
                    [
                        ind(path.tau(k) > t),
                        ind(path.tau_a(k) <= t),
                        ind(path.tau_b(k) <= t),
                        ind(path.t_time(k) > t),
                    ]
                })
                .collect()
        })
        .collect();
    let est = estimates_from_rows(&rows, 4 * n);
    let debtors = (0..n)
        .map(|k| DebtorFrequencies {
            debtor: k,
            survival: est[4 * k],
            a_default: est[4 * k + 1],
            b_default: est[4 * k + 2],
            no_t_event: est[4 * k + 3],
        })
        .collect();
    let summary = SimulationSummary {
        law: law.to_string(),
        contagious: contagious.to_string(),
        t,
        paths,
        seed,
        debtors,
    };
    (summary, all)
}

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub target: String,
    pub t: f64,
    pub equations: u64,
    pub estimate: EstimateCI,
}

/// Survival of `target` by `t` through the ladder, optionally with the
/// ladder values along the first environment path.
pub fn solve(
    model: &Model,
    target: DebtorSet,
    t: f64,
    paths: usize,
    seed: u64,
    opts: &SolverOptions,
    dump: bool,
) -> Result<(SolveSummary, Option<LadderDump>), HarnessError> {
    let free = target.complement(model.n());
    let estimate = survival_via_theorem_with(model, target, t, paths, seed, opts)?;
    let dump = if dump {
        let ladder = build_ladder(model, target);
        let f_path = simulate_fbar_path(model, target, PathSeed::new(seed, 0));
        let grid: Vec<f64> = (0..=10).map(|i| t * i as f64 / 10.0).collect();
        let values = integrate_ladder(model, &ladder, &f_path, &grid, opts)?;
        Some(ladder_dump(&ladder, &values))
    } else {
        None
    };
    Ok((
        SolveSummary {
            target: target.to_string(),
            t,
            equations: count_equations(free.len(), free.intersection(model.systemic()).len()),
            estimate,
        },
        dump,
    ))
}

/// Which closed-form or deterministic reference to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Single-name formula; the target must be one debtor, and contagion is
    /// ignored.
    Single,
    Markov,
    Case2,
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(OracleKind::Single),
            "markov" => Ok(OracleKind::Markov),
            "case2" => Ok(OracleKind::Case2),
            _ => Err(format!("unknown oracle {s:?}; expected single, markov or case2")),
        }
    }
}

/// `P(target survives to t)` from the chosen oracle.
pub fn oracle_value(model: &Model, kind: OracleKind, target: DebtorSet, t: f64) -> Result<f64, HarnessError> {
    Ok(match kind {
        OracleKind::Single => {
            if target.len() != 1 {
                return Err(HarnessError::Usage("the single-name oracle needs a one-debtor target".into()));
            }
            let k = target.iter().next().expect("one member");
            single_name_survival_oracle(model.alpha(k), model.gamma(k), model.p0(k), t)?
        }
        OracleKind::Markov => markov_joint_survival(model, target, t)?,
        OracleKind::Case2 => case2_ode_survival(model, target, &[t])?[0],
    })
}
