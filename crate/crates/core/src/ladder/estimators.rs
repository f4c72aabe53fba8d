//! Monte Carlo averages of ladder values over default-adjusted environment
//! paths.

use super::integrate::{integrate_ladder, SolverOptions};
use super::lattice::{build_ladder, Ladder};
use crate::error::SolverError;
use crate::model::{DebtorSet, Model};
use crate::sim::{collect_paths, estimates_from_rows, simulate_fbar_path, FPath, PathSeed};
use crate::stats::EstimateCI;

/// One quantity read off the top nodes of a ladder: the probability that the
/// target survives and every debtor of `d` has a B-default by `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderQuery {
    pub d: DebtorSet,
    pub t: f64,
}

impl LadderQuery {
    pub fn survival(t: f64) -> Self {
        LadderQuery {
            d: DebtorSet::EMPTY,
            t,
        }
    }
}

fn check_query(model: &Model, c: DebtorSet, q: &LadderQuery) -> Result<(), SolverError> {
    if !c.is_disjoint(q.d) {
        return Err(SolverError::Overlap { c, d: q.d });
    }
    if let Some(debtor) = q.d.difference(model.systemic()).iter().next() {
        return Err(SolverError::InvalidD { debtor });
    }
    if !(0.0..=model.horizon()).contains(&q.t) {
        return Err(SolverError::BadGrid {
            horizon: model.horizon(),
        });
    }
    Ok(())
}

/// Sorted distinct query times.
fn query_grid(queries: &[LadderQuery]) -> Vec<f64> {
    let mut grid: Vec<f64> = queries.iter().map(|q| q.t).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Per-query samples `ℓ^{S|D}(t)·Π_{j∈D} p0(j)·1{T(j) ≤ t}` on one path.
fn path_row(
    model: &Model,
    ladder: &Ladder,
    f_path: &FPath,
    grid: &[f64],
    queries: &[LadderQuery],
    opts: &SolverOptions,
) -> Result<Vec<f64>, SolverError> {
    let values = integrate_ladder(model, ladder, f_path, grid, opts)?;
    Ok(queries
        .iter()
        .map(|q| {
            let g = grid.partition_point(|&s| s < q.t);
            let node = ladder.top(q.d).expect("D is a systemic subset of S");
            let factor: f64 = q
                .d
                .iter()
                .map(|j| if f_path.t(j) <= q.t { model.p0(j) } else { 0.0 })
                .product();
            if factor == 0.0 {
                0.0
            } else {
                values.at(g, node) * factor
            }
        })
        .collect())
}

/// Estimates every query for target `c` on one shared set of `n_paths`
/// environment paths drawn under the default-adjusted law for `c`.
///
/// Without systemic debtors the ladder does not depend on the path, so it is
/// integrated once and the estimates carry zero standard error.
pub fn ladder_estimates(
    model: &Model,
    c: DebtorSet,
    queries: &[LadderQuery],
    n_paths: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<Vec<EstimateCI>, SolverError> {
    for q in queries {
        check_query(model, c, q)?;
    }
    let ladder = build_ladder(model, c);
    let grid = query_grid(queries);
    if model.systemic().is_empty() {
        let f_path = FPath::new(vec![f64::INFINITY; model.n()]);
        let row = path_row(model, &ladder, &f_path, &grid, queries, opts)?;
        return Ok(row
            .into_iter()
            .map(|v| EstimateCI::new(v, 0.0, n_paths))
            .collect());
    }
    let rows = collect_paths(n_paths, |p| {
        let f_path = simulate_fbar_path(model, c, PathSeed::new(seed, p));
        path_row(model, &ladder, &f_path, &grid, queries, opts)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(estimates_from_rows(&rows, queries.len()))
}

/// `P(τ(k) > t for all k ∈ target)` through the ladder, with default solver
/// settings.
pub fn survival_via_theorem(
    model: &Model,
    target: DebtorSet,
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<EstimateCI, SolverError> {
    survival_via_theorem_with(model, target, t, n_paths, seed, &SolverOptions::default())
}

pub fn survival_via_theorem_with(
    model: &Model,
    target: DebtorSet,
    t: f64,
    n_paths: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<EstimateCI, SolverError> {
    Ok(ladder_estimates(model, target, &[LadderQuery::survival(t)], n_paths, seed, opts)?[0])
}

/// `P(τ(k) > t for k ∈ c, τᴮ(j) ≤ t for j ∈ d)` through the ladder.
///
/// A non-systemic debtor in `d` never has a B-default, so the probability is
/// exactly zero; this is reported as [`SolverError::InvalidD`] rather than
/// computed.
pub fn joint_b_default_via_theorem(
    model: &Model,
    c: DebtorSet,
    d: DebtorSet,
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<EstimateCI, SolverError> {
    joint_b_default_via_theorem_with(model, c, d, t, n_paths, seed, &SolverOptions::default())
}

pub fn joint_b_default_via_theorem_with(
    model: &Model,
    c: DebtorSet,
    d: DebtorSet,
    t: f64,
    n_paths: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<EstimateCI, SolverError> {
    Ok(ladder_estimates(model, c, &[LadderQuery { d, t }], n_paths, seed, opts)?[0])
}
