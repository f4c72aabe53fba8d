//! Exact samplers under the baseline, contagion and default-adjusted laws.

use rand::Rng;

use super::path::{EventKind, FPath, SystemEvent, SystemPath};
use super::rng::{exp1, PathSeed, Purpose};
use crate::model::{DebtorSet, Model};

/// Draws `T(k)` under the baseline rate `γ(k)` by inversion; `∞` past the
/// horizon.
fn baseline_t<R: Rng>(model: &Model, k: usize, rng: &mut R) -> f64 {
    let t = model.gamma(k).inverse_integral(exp1(rng));
    censor(t, model.horizon())
}

#[inline]
fn censor(t: f64, horizon: f64) -> f64 {
    if t <= horizon {
        t
    } else {
        f64::INFINITY
    }
}

/// Environment path with every `T(k)` at its baseline law.
pub fn simulate_baseline_f_path(model: &Model, seed: PathSeed) -> FPath {
    FPath::new(
        (0..model.n())
            .map(|k| baseline_t(model, k, &mut seed.stream(k, Purpose::Environment)))
            .collect(),
    )
}

/// The unit-exponential thresholds `e(k)` of a path.
pub fn draw_thresholds(model: &Model, seed: PathSeed) -> Vec<f64> {
    (0..model.n())
        .map(|k| exp1(&mut seed.stream(k, Purpose::Threshold)))
        .collect()
}

/// Adds defaults to an environment path by the threshold construction:
/// `τ(k)` is the first time the hazard `∫α + 1{T(k) ≤ t}·(−ln(1 − g_T))`
/// reaches `e(k)`. A default exactly at `T(k)` is a B-default.
pub fn extend_with_defaults(model: &Model, f_path: &FPath, thresholds: &[f64]) -> SystemPath {
    let n = model.n();
    let horizon = model.horizon();
    let mut events = Vec::with_capacity(2 * n);
    for k in 0..n {
        let e = thresholds[k];
        let alpha = model.alpha(k);
        let t_k = f_path.t(k);
        let a_only = alpha.inverse_integral(e);
        let mut b_default = false;
        let tau_a = if a_only < t_k || t_k.is_infinite() {
            a_only
        } else {
            let jump = -(-model.g(k, t_k)).ln_1p();
            if e - alpha.integral(t_k) <= jump {
                b_default = true;
                f64::INFINITY
            } else {
                alpha.inverse_integral(e - jump)
            }
        };
        if tau_a <= horizon {
            events.push(SystemEvent {
                time: tau_a,
                kind: EventKind::ADefault(k),
            });
        }
        if t_k.is_finite() {
            events.push(SystemEvent {
                time: t_k,
                kind: EventKind::TEvent {
                    debtor: k,
                    defaulted: b_default,
                },
            });
        }
    }
    SystemPath::from_events(n, events, Some(thresholds.to_vec()))
}

/// One trajectory under the conditionally independent baseline law.
pub fn simulate_p0_path(model: &Model, seed: PathSeed) -> SystemPath {
    let f = simulate_baseline_f_path(model, seed);
    extend_with_defaults(model, &f, &draw_thresholds(model, seed))
}

/// One trajectory under the contagion law with contagious set `contagious`.
///
/// Each debtor carries a residual A-threshold, consumed at its tilted A-rate
/// and reduced by the hazard jump at `T(k)`, and a residual unit exponential
/// for its environment clock, consumed at the tilted T-rate. All rates are
/// constant between events and coefficient breakpoints, so every clock is
/// inverted exactly. With `contagious = ∅` the draws coincide with
/// [`simulate_p0_path`] under the same seed.
pub fn simulate_contagion_path(model: &Model, contagious: DebtorSet, seed: PathSeed) -> SystemPath {
    let n = model.n();
    let horizon = model.horizon();
    let thresholds = draw_thresholds(model, seed);
    let mut a_res = thresholds.clone();
    let mut t_res: Vec<f64> = (0..n)
        .map(|k| exp1(&mut seed.stream(k, Purpose::Environment)))
        .collect();
    let mut alive = vec![true; n];
    let mut pending = vec![true; n];
    let mut a_src = DebtorSet::EMPTY;
    let mut b_src = DebtorSet::EMPTY;
    let mut ra = vec![0.0; n];
    let mut rt = vec![0.0; n];
    let mut events = Vec::with_capacity(2 * n);
    let stops = model.stops();
    let mut stop_idx = 0;
    let mut t = 0.0;

    loop {
        while stop_idx < stops.len() && stops[stop_idx] <= t {
            stop_idx += 1;
        }
        let seg_end = stops.get(stop_idx).copied().unwrap_or(horizon);
        for i in 0..n {
            ra[i] = if alive[i] {
                model.alpha(i).value_at(t)
                    + a_src
                        .iter()
                        .map(|j| model.phi_a(i, j).value_at(t))
                        .sum::<f64>()
            } else {
                0.0
            };
            rt[i] = if pending[i] {
                model.gamma(i).value_at(t)
                    + b_src
                        .iter()
                        .map(|j| model.phi_b(i, j).value_at(t))
                        .sum::<f64>()
            } else {
                0.0
            };
        }
        // earliest clock; ties go to the lower debtor, A before T
        let mut next: Option<(f64, usize, bool)> = None;
        for i in 0..n {
            let cands = [(ra[i], a_res[i], true), (rt[i], t_res[i], false)];
            for (rate, res, is_a) in cands {
                if rate > 0.0 {
                    let te = t + res / rate;
                    if next.is_none_or(|(best, _, _)| te < best) {
                        next = Some((te, i, is_a));
                    }
                }
            }
        }
        let fire = next.filter(|&(te, _, _)| te <= seg_end);
        let to = fire.map_or(seg_end, |(te, _, _)| te);
        let dt = to - t;
        for i in 0..n {
            a_res[i] = (a_res[i] - ra[i] * dt).max(0.0);
            t_res[i] = (t_res[i] - rt[i] * dt).max(0.0);
        }
        t = to;
        let Some((te, i, is_a)) = fire else {
            if seg_end >= horizon {
                break;
            }
            continue;
        };
        if is_a {
            alive[i] = false;
            a_res[i] = 0.0;
            if contagious.contains(i) {
                a_src = a_src.insert(i);
            }
            events.push(SystemEvent {
                time: te,
                kind: EventKind::ADefault(i),
            });
        } else {
            pending[i] = false;
            t_res[i] = 0.0;
            let mut defaulted = false;
            if alive[i] {
                let jump = -(-model.g(i, te)).ln_1p();
                if a_res[i] <= jump {
                    defaulted = true;
                    alive[i] = false;
                    if contagious.contains(i) {
                        b_src = b_src.insert(i);
                    }
                } else {
                    a_res[i] -= jump;
                }
            }
            events.push(SystemEvent {
                time: te,
                kind: EventKind::TEvent {
                    debtor: i,
                    defaulted,
                },
            });
        }
    }
    SystemPath::from_events(n, events, Some(thresholds))
}

/// Environment path under the default-adjusted law for `c`: for `k ∈ c`,
/// `T(k)` has intensity `γ(1 − g)`, drawn by thinning a `γ`-rate proposal
/// stream; all other debtors keep the baseline law.
pub fn simulate_fbar_path(model: &Model, c: DebtorSet, seed: PathSeed) -> FPath {
    let horizon = model.horizon();
    let t_times = (0..model.n())
        .map(|k| {
            let mut rng = seed.stream(k, Purpose::Environment);
            if !c.contains(k) {
                return baseline_t(model, k, &mut rng);
            }
            let gamma = model.gamma(k);
            let mut cum = 0.0;
            loop {
                cum += exp1(&mut rng);
                let s = gamma.inverse_integral(cum);
                if s > horizon {
                    return f64::INFINITY;
                }
                let u: f64 = rng.random();
                if u < 1.0 - model.g(k, s) {
                    return s;
                }
            }
        })
        .collect();
    FPath::new(t_times)
}

/// Default-adjusted environment for `c`, extended with threshold defaults of
/// every debtor. This is the path law under which the pathwise `L` process is
/// averaged.
pub fn simulate_fbar_system_path(model: &Model, c: DebtorSet, seed: PathSeed) -> SystemPath {
    let f = simulate_fbar_path(model, c, seed);
    extend_with_defaults(model, &f, &draw_thresholds(model, seed))
}
