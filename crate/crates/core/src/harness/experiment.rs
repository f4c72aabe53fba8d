//! The comparison suites behind `compare`.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{LadderCount, Report, ReportRow};
use crate::error::{HarnessError, OracleError};
use crate::ladder::{
    build_ladder, count_equations, integrate_ladder, ladder_estimates, LadderQuery, SolverOptions,
};
use crate::model::config::{model_hash, LoadedConfig};
use crate::model::{DebtorSet, Model};
use crate::oracles::{case2_ode_survival, markov_joint_survival, single_name_survival_oracle};
use crate::sim::{
    collect_paths, derive_seed, estimate_probabilities, estimate_probability, estimates_from_rows,
    girsanov_weight, pbar_weight, simulate_p0_path, FPath, JointB, Law, PathEvent, PathSeed,
    Survival,
};
use crate::stats::{compare_auto, compare_estimates, EstimateCI};

/// Which comparisons to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Ladder survival estimates against direct Monte Carlo and, where one
    /// applies, an oracle.
    Survival,
    /// Joint survival and B-default estimates against direct Monte Carlo.
    JointB,
    /// Weighted baseline estimates against direct sampling, and unit means of
    /// the densities.
    Girsanov,
    /// Survival of `C` under full contagion against contagion from `N − C`
    /// only.
    Identity42,
    /// Ladder sizes and initial values.
    ValidateSuite,
    /// Deterministic ladder values against the Markov and subset-ODE oracles.
    OracleCompare,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Survival,
        Suite::JointB,
        Suite::Girsanov,
        Suite::Identity42,
        Suite::ValidateSuite,
        Suite::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Survival => "survival",
            Suite::JointB => "joint_b",
            Suite::Girsanov => "girsanov",
            Suite::Identity42 => "identity42",
            Suite::ValidateSuite => "validate_suite",
            Suite::OracleCompare => "oracle_compare",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Parameters of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub suite: Suite,
    pub times: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    pub solver: SolverOptions,
    /// Threshold in combined standard errors.
    pub sigma: f64,
    /// Absolute threshold between deterministic values.
    pub exact_tol: f64,
    /// Largest target size enumerated.
    pub max_target: usize,
}

impl Experiment {
    pub fn new(suite: Suite, times: Vec<f64>, paths: usize, seed: u64) -> Self {
        Experiment {
            suite,
            times,
            paths,
            seed,
            solver: SolverOptions::default(),
            sigma: crate::stats::DEFAULT_SIGMA_THRESHOLD,
            exact_tol: crate::stats::DEFAULT_EXACT_THRESHOLD,
            max_target: 3,
        }
    }
}

// stream salts, one per independent sample set
const SALT_THEOREM: u64 = 1;
const SALT_DIRECT: u64 = 2;
const SALT_WEIGHTED: u64 = 3;
const SALT_EVENTS: u64 = 4;
const SALT_REDUCED: u64 = 5;

/// Nonempty targets of size at most `max`, by size then mask.
fn targets(n: usize, max: usize) -> Vec<DebtorSet> {
    let mut out: Vec<DebtorSet> = DebtorSet::full(n)
        .subsets()
        .filter(|c| !c.is_empty() && c.len() <= max)
        .collect();
    out.sort();
    out
}

struct Ctx<'a> {
    model: &'a Model,
    exp: &'a Experiment,
    rows: Vec<ReportRow>,
    ladders: Vec<LadderCount>,
}

impl Ctx<'_> {
    fn stat(&self, lhs: EstimateCI, rhs: EstimateCI) -> crate::stats::ComparisonVerdict {
        compare_auto(lhs, rhs, self.exp.sigma, self.exp.exact_tol)
    }

    fn note_ladder(&mut self, target: DebtorSet) {
        let n = self.model.n();
        let free = target.complement(n);
        self.ladders.push(LadderCount {
            target: target.to_string(),
            equations: count_equations(free.len(), free.intersection(self.model.systemic()).len()),
        });
    }

    fn check_times(&self) -> Result<(), HarnessError> {
        let h = self.model.horizon();
        if self.exp.times.is_empty() || self.exp.times.iter().any(|t| !(0.0..=h).contains(t)) {
            return Err(HarnessError::Usage(format!("times must lie in [0, {h}]")));
        }
        Ok(())
    }
}

/// Runs `exp` on the loaded model and collects every comparison.
pub fn run_experiment(config: &LoadedConfig, exp: &Experiment) -> Result<Report, HarnessError> {
    let model = &config.model;
    let mut ctx = Ctx {
        model,
        exp,
        rows: Vec::new(),
        ladders: Vec::new(),
    };
    ctx.check_times()?;
    match exp.suite {
        Suite::Survival => survival_suite(&mut ctx)?,
        Suite::JointB => joint_b_suite(&mut ctx)?,
        Suite::Girsanov => girsanov_suite(&mut ctx),
        Suite::Identity42 => identity_suite(&mut ctx),
        Suite::ValidateSuite => validate_suite(&mut ctx)?,
        Suite::OracleCompare => oracle_suite(&mut ctx)?,
    }
    let pass = ctx.rows.iter().all(|r| r.pass);
    Ok(Report {
        suite: exp.suite.to_string(),
        model_hash: model_hash(model),
        config_id: config.config_id.clone(),
        seed: exp.seed,
        paths: exp.paths,
        times: exp.times.clone(),
        tol: exp.solver.tol,
        ladders: ctx.ladders,
        rows: ctx.rows,
        pass,
    })
}

/// An exact reference for `P(target survives to t)`, when one exists.
fn survival_oracle(model: &Model, target: DebtorSet, t: f64) -> Option<(&'static str, f64)> {
    if model.n() == 1 {
        let v = single_name_survival_oracle(model.alpha(0), model.gamma(0), model.p0(0), t).ok()?;
        return Some(("single_name_oracle", v));
    }
    markov_joint_survival(model, target, t)
        .ok()
        .map(|v| ("markov_oracle", v))
}

fn survival_suite(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let (model, exp) = (ctx.model, ctx.exp);
    let all_targets = targets(model.n(), exp.max_target);
    let queries: Vec<_> = exp.times.iter().map(|&t| LadderQuery::survival(t)).collect();

    let events: Vec<Survival> = all_targets
        .iter()
        .flat_map(|&c| exp.times.iter().map(move |&t| Survival { c, t }))
        .collect();
    let refs: Vec<&dyn PathEvent> = events.iter().map(|e| e as &dyn PathEvent).collect();
    let direct = estimate_probabilities(
        model,
        Law::Contagion(model.all()),
        &refs,
        exp.paths,
        derive_seed(exp.seed, SALT_DIRECT),
    );

    let mut direct = direct.into_iter();
    for &c in &all_targets {
        ctx.note_ladder(c);
        let theorem = ladder_estimates(
            model,
            c,
            &queries,
            exp.paths,
            derive_seed(exp.seed, SALT_THEOREM),
            &exp.solver,
        )?;
        for (&t, th) in exp.times.iter().zip(theorem) {
            let mc = direct.next().expect("one direct estimate per event");
            let v = compare_estimates(th, mc, exp.sigma);
            ctx.rows.push(
                ReportRow::from_verdict("theorem_vs_direct", ("theorem", "direct_pn"), v).at(c, t),
            );
            if let Some((kind, value)) = survival_oracle(model, c, t) {
                let v = ctx.stat(th, EstimateCI::exact(value));
                ctx.rows.push(ReportRow::from_verdict("theorem_vs_oracle", ("theorem", kind), v).at(c, t));
                let v = compare_estimates(mc, EstimateCI::exact(value), exp.sigma);
                ctx.rows.push(ReportRow::from_verdict("direct_vs_oracle", ("direct_pn", kind), v).at(c, t));
            }
        }
    }
    Ok(())
}

fn joint_b_suite(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let (model, exp) = (ctx.model, ctx.exp);
    let mut pairs = Vec::new();
    for c in targets(model.n(), 2) {
        for j in model.systemic().difference(c).iter() {
            pairs.push((c, DebtorSet::singleton(j)));
        }
    }
    if pairs.is_empty() {
        return Err(HarnessError::Usage(
            "joint_b needs a systemic debtor outside some target".into(),
        ));
    }
    let events: Vec<JointB> = pairs
        .iter()
        .flat_map(|&(c, d)| exp.times.iter().map(move |&t| JointB { c, d, t }))
        .collect();
    let refs: Vec<&dyn PathEvent> = events.iter().map(|e| e as &dyn PathEvent).collect();
    let direct = estimate_probabilities(
        model,
        Law::Contagion(model.all()),
        &refs,
        exp.paths,
        derive_seed(exp.seed, SALT_DIRECT),
    );
    let mut direct = direct.into_iter();
    let mut last_c = None;
    for (c, d) in pairs {
        if last_c != Some(c) {
            ctx.note_ladder(c);
            last_c = Some(c);
        }
        let queries: Vec<_> = exp.times.iter().map(|&t| LadderQuery { d, t }).collect();
        let theorem = ladder_estimates(
            model,
            c,
            &queries,
            exp.paths,
            derive_seed(exp.seed, SALT_THEOREM),
            &exp.solver,
        )?;
        for (&t, th) in exp.times.iter().zip(theorem) {
            let mc = direct.next().expect("one direct estimate per event");
            let v = compare_estimates(th, mc, exp.sigma);
            ctx.rows.push(
                ReportRow::from_verdict("theorem_vs_direct", ("theorem", "direct_pn"), v)
                    .at(c, t)
                    .with_d(d),
            );
        }
    }
    Ok(())
}

/// A randomly drawn event for the weighting audit.
#[derive(Debug, Clone, Copy)]
enum AuditEvent {
    Survival(Survival),
    JointB(JointB),
}

impl AuditEvent {
    fn as_dyn(&self) -> &dyn PathEvent {
        match self {
            AuditEvent::Survival(e) => e,
            AuditEvent::JointB(e) => e,
        }
    }
}

/// Ten reproducible `(contagious set, event)` pairs.
fn audit_events(model: &Model, times: &[f64], seed: u64) -> Vec<(DebtorSet, AuditEvent)> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, SALT_EVENTS));
    let n = model.n();
    let nonempty: Vec<DebtorSet> = targets(n, n);
    let small: Vec<DebtorSet> = targets(n, 3.min(n));
    (0..10)
        .map(|_| {
            let contagious = *nonempty.choose(&mut rng).expect("n ≥ 1");
            let c = *small.choose(&mut rng).expect("n ≥ 1");
            let t = *times.choose(&mut rng).expect("times are nonempty");
            let outside: Vec<usize> = model.systemic().difference(c).iter().collect();
            let event = match outside.choose(&mut rng) {
                Some(&j) if rng.random_bool(0.5) => AuditEvent::JointB(JointB {
                    c,
                    d: DebtorSet::singleton(j),
                    t,
                }),
                _ => AuditEvent::Survival(Survival { c, t }),
            };
            (contagious, event)
        })
        .collect()
}

fn girsanov_suite(ctx: &mut Ctx) {
    let (model, exp) = (ctx.model, ctx.exp);
    let all = model.all();
    // unit means of both densities on one set of baseline paths
    let times = &exp.times;
    let rows = collect_paths(exp.paths, |p| {
        let path = simulate_p0_path(model, PathSeed::new(derive_seed(exp.seed, SALT_WEIGHTED), p));
        let f: FPath = path.f_path();
        times
            .iter()
            .flat_map(|&t| [girsanov_weight(model, all, &path, t), pbar_weight(model, all, &f, t)])
            .collect::<Vec<f64>>()
    });
    let means = estimates_from_rows(&rows, 2 * times.len());
    for (i, &t) in times.iter().enumerate() {
        let v = compare_estimates(means[2 * i], EstimateCI::exact(1.0), exp.sigma);
        ctx.rows.push(
            ReportRow::from_verdict("contagion_density_mean", ("weighted_p0", "one"), v)
                .at("", t)
                .with_contagious(all),
        );
        let v = compare_estimates(means[2 * i + 1], EstimateCI::exact(1.0), exp.sigma);
        ctx.rows.push(
            ReportRow::from_verdict("pbar_density_mean", ("weighted_p0", "one"), v)
                .at("", t)
                .with_contagious(all),
        );
    }
    for (k, (contagious, event)) in audit_events(model, times, exp.seed).into_iter().enumerate() {
        let seed = derive_seed(exp.seed, SALT_WEIGHTED + 16 * (k as u64 + 1));
        let weighted = estimate_probability(model, Law::WeightedP0(contagious), event.as_dyn(), exp.paths, seed);
        let direct = estimate_probability(
            model,
            Law::Contagion(contagious),
            event.as_dyn(),
            exp.paths,
            derive_seed(seed, SALT_DIRECT),
        );
        let v = compare_estimates(weighted, direct, exp.sigma);
        let row = ReportRow::from_verdict("weighted_vs_direct", ("weighted_p0", "direct_pc"), v)
            .with_contagious(contagious);
        ctx.rows.push(match event {
            AuditEvent::Survival(e) => row.at(e.c, e.t),
            AuditEvent::JointB(e) => row.at(e.c, e.t).with_d(e.d),
        });
    }
}

fn identity_suite(ctx: &mut Ctx) {
    let (model, exp) = (ctx.model, ctx.exp);
    let all_targets = targets(model.n(), exp.max_target);
    let events: Vec<Survival> = all_targets
        .iter()
        .flat_map(|&c| exp.times.iter().map(move |&t| Survival { c, t }))
        .collect();
    let refs: Vec<&dyn PathEvent> = events.iter().map(|e| e as &dyn PathEvent).collect();
    let full = estimate_probabilities(
        model,
        Law::Contagion(model.all()),
        &refs,
        exp.paths,
        derive_seed(exp.seed, SALT_DIRECT),
    );
    for (i, e) in events.iter().enumerate() {
        let reduced_set = e.c.complement(model.n());
        let reduced = estimate_probability(
            model,
            Law::Contagion(reduced_set),
            e,
            exp.paths,
            derive_seed(exp.seed, SALT_REDUCED + 16 * (i as u64 + 1)),
        );
        let v = compare_estimates(full[i], reduced, exp.sigma);
        ctx.rows.push(
            ReportRow::from_verdict("full_vs_reduced_contagion", ("direct_pn", "direct_pn_minus_c"), v)
                .at(e.c, e.t)
                .with_contagious(reduced_set),
        );
    }
}

fn validate_suite(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let model = ctx.model;
    let n = model.n();
    let mut all: Vec<DebtorSet> = model.all().subsets().collect();
    all.sort();
    for c in all {
        let free = c.complement(n);
        if free.len() > 12 {
            continue;
        }
        ctx.note_ladder(c);
        let ladder = build_ladder(model, c);
        let expected = count_equations(free.len(), free.intersection(model.systemic()).len());
        let v = compare_auto(
            EstimateCI::exact(ladder.len() as f64),
            EstimateCI::exact(expected as f64),
            0.0,
            0.0,
        );
        ctx.rows.push(ReportRow::from_verdict("ladder_size", ("nodes", "count_equations"), v).at(c, 0.0));
        let start = integrate_ladder(model, &ladder, &FPath::new(vec![f64::INFINITY; n]), &[0.0], &ctx.exp.solver)?;
        let worst = start.values[0]
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        let v = compare_auto(EstimateCI::exact(1.0 + worst), EstimateCI::exact(1.0), 0.0, 0.0);
        ctx.rows.push(ReportRow::from_verdict("initial_value", ("max_node_at_0", "one"), v).at(c, 0.0));
    }
    Ok(())
}

fn oracle_suite(ctx: &mut Ctx) -> Result<(), HarnessError> {
    let (model, exp) = (ctx.model, ctx.exp);
    let n = model.n();
    if !model.systemic().is_empty() && n > 1 {
        return Err(OracleError::SystemicDebtor(model.systemic().iter().next().unwrap_or(0)).into());
    }
    let queries: Vec<_> = exp.times.iter().map(|&t| LadderQuery::survival(t)).collect();
    let mut grid = exp.times.clone();
    grid.sort_by(f64::total_cmp);
    for c in targets(n, exp.max_target) {
        ctx.note_ladder(c);
        let ladder = ladder_estimates(model, c, &queries, exp.paths, derive_seed(exp.seed, SALT_THEOREM), &exp.solver)?;
        if n == 1 {
            for (&t, l) in exp.times.iter().zip(ladder) {
                let oracle = single_name_survival_oracle(model.alpha(0), model.gamma(0), model.p0(0), t)?;
                let v = ctx.stat(l, EstimateCI::exact(oracle));
                ctx.rows.push(ReportRow::from_verdict("ladder_vs_single", ("ladder", "single_name_oracle"), v).at(c, t));
            }
            continue;
        }
        let ode = case2_ode_survival(model, c, &grid)?;
        for (&t, l) in exp.times.iter().zip(ladder) {
            let markov = EstimateCI::exact(markov_joint_survival(model, c, t)?);
            let ode_t = EstimateCI::exact(ode[grid.partition_point(|&s| s < t)]);
            let v = ctx.stat(l, markov);
            ctx.rows.push(ReportRow::from_verdict("ladder_vs_markov", ("ladder", "markov_oracle"), v).at(c, t));
            let v = ctx.stat(ode_t, markov);
            ctx.rows.push(ReportRow::from_verdict("ode_vs_markov", ("case2_ode", "markov_oracle"), v).at(c, t));
        }
    }
    Ok(())
}
