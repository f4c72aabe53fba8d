//! Monte Carlo front end over path laws.

use rayon::prelude::*;

use super::path::SystemPath;
use super::rng::PathSeed;
use super::sampler::{simulate_contagion_path, simulate_p0_path};
use super::weights::girsanov_weight;
use crate::model::{DebtorSet, Model};
use crate::stats::EstimateCI;

/// The law paths are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    /// Conditionally independent baseline.
    P0,
    /// Contagion law with the given contagious set, sampled directly.
    Contagion(DebtorSet),
    /// Baseline paths weighted by the density of the contagion law.
    WeightedP0(DebtorSet),
}

impl Law {
    pub fn sample(&self, model: &Model, seed: PathSeed) -> SystemPath {
        match *self {
            Law::P0 | Law::WeightedP0(_) => simulate_p0_path(model, seed),
            Law::Contagion(c) => simulate_contagion_path(model, c, seed),
        }
    }

    /// Path weight at `t` (1 for the unweighted laws).
    pub fn weight(&self, model: &Model, path: &SystemPath, t: f64) -> f64 {
        match *self {
            Law::WeightedP0(c) => girsanov_weight(model, c, path, t),
            _ => 1.0,
        }
    }
}

/// An event of a path observed at a fixed time.
pub trait PathEvent: Sync {
    fn time(&self) -> f64;
    fn holds(&self, path: &SystemPath) -> bool;
}

/// `{τ(k) > t for all k ∈ c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survival {
    pub c: DebtorSet,
    pub t: f64,
}

impl PathEvent for Survival {
    fn time(&self) -> f64 {
        self.t
    }
    fn holds(&self, path: &SystemPath) -> bool {
        path.survives(self.c, self.t)
    }
}

/// `{τ(k) > t for k ∈ c; τᴮ(j) ≤ t for j ∈ d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointB {
    pub c: DebtorSet,
    pub d: DebtorSet,
    pub t: f64,
}

impl PathEvent for JointB {
    fn time(&self) -> f64 {
        self.t
    }
    fn holds(&self, path: &SystemPath) -> bool {
        path.survives(self.c, self.t) && path.b_defaulted(self.d, self.t)
    }
}

/// An arbitrary predicate observed at `t`.
pub struct Predicate<F> {
    pub t: f64,
    pub f: F,
}

impl<F: Fn(&SystemPath) -> bool + Sync> PathEvent for Predicate<F> {
    fn time(&self) -> f64 {
        self.t
    }
    fn holds(&self, path: &SystemPath) -> bool {
        (self.f)(path)
    }
}

/// Evaluates `f` on path indices `0..n_paths` in parallel and returns the
/// results in index order.
pub fn collect_paths<T, F>(n_paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n_paths as u64).into_par_iter().map(f).collect()
}

/// Splits per-path rows into one estimate per column.
pub fn estimates_from_rows(rows: &[Vec<f64>], columns: usize) -> Vec<EstimateCI> {
    (0..columns)
        .map(|c| {
            let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            EstimateCI::from_samples(&col)
        })
        .collect()
}

/// Probability of `event` under `law`, averaged over `n_paths` paths.
///
/// Intended for `n_paths ≥ 100`; smaller counts give unreliable errors.
pub fn estimate_probability(
    model: &Model,
    law: Law,
    event: &dyn PathEvent,
    n_paths: usize,
    seed: u64,
) -> EstimateCI {
    estimate_probabilities(model, law, &[event], n_paths, seed)[0]
}

/// Several events estimated on one shared set of paths.
pub fn estimate_probabilities(
    model: &Model,
    law: Law,
    events: &[&dyn PathEvent],
    n_paths: usize,
    seed: u64,
) -> Vec<EstimateCI> {
    let rows = collect_paths(n_paths, |p| {
        let path = law.sample(model, PathSeed::new(seed, p));
        events
            .iter()
            .map(|e| {
                if e.holds(&path) {
                    law.weight(model, &path, e.time())
                } else {
                    0.0
                }
            })
            .collect::<Vec<f64>>()
    });
    estimates_from_rows(&rows, events.len())
}
