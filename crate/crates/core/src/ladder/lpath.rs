//! The explicit product `L^{S|D}` whose optional projection is `ℓ^{S|D}`.

use crate::model::{DebtorSet, Model};
use crate::sim::SystemPath;

/// `L^{S|D}(t)` along a full path, with `S = N − c` and `R = S − d`.
///
/// The path should be drawn with
/// [`simulate_fbar_system_path`](crate::sim::simulate_fbar_system_path) for
/// `c`: environment under the default-adjusted law, defaults of the other
/// debtors from their thresholds. The value is
///
/// * a stochastic exponential over the A-defaults of `R`, with coefficient
///   `Σ_{j∈R} φᴬ(i,j)·1{τᴬ(j) < s} / α(i)`;
/// * a stochastic exponential over all T-events, with coefficient
///   `B(i) = Σ_{j∈R} φᴮ(i,j)·1{τᴮ(j) < s} + Σ_{j∈d} φᴮ(i,j)·1{T(j) < s}`
///   divided by `γ(i)`, compensated at rate `B(i)·(1 − g(i)·1{i ∈ c})`;
/// * `exp(−Λ)` where `Λ` collects the intensity of `c` (base rates, `γg`
///   before `T`, and the contagion from `R` and `d` through both channels)
///   plus the A-contagion `d` receives from `R` before its T-events.
///
/// At `t = 0` the value is 1; without contagion it is
/// `exp(−Σ_{i∈c} (∫α(i) + ∫^{t∧T(i)} γg(i)))`.
pub fn l_pathwise(model: &Model, c: DebtorSet, d: DebtorSet, path: &SystemPath, t: f64) -> f64 {
    let n = model.n();
    let r = c.union(d).complement(n);
    let mut log_l = 0.0;
    let mut factor = 1.0;

    // A-channel of R
    for i in r.iter() {
        let ti = path.tau_a(i);
        if ti <= t {
            let bump: f64 = r
                .iter()
                .filter(|&j| path.tau_a(j) < ti)
                .map(|j| model.phi_a(i, j).value_at(ti))
                .sum();
            factor *= 1.0 + bump / model.alpha(i).value_at(ti);
        }
        let end = t.min(path.tau(i));
        for j in r.iter() {
            log_l -= model.phi_a(i, j).integral_between(path.tau_a(j), end);
        }
    }

    // T-events of every debtor
    let starts = || {
        r.iter()
            .map(move |j| (j, path.tau_b(j)))
            .chain(d.iter().map(move |j| (j, path.t_time(j))))
    };
    for i in 0..n {
        let ti = path.t_time(i);
        if ti <= t {
            let b: f64 = starts()
                .filter(|&(_, s)| s < ti)
                .map(|(j, _)| model.phi_b(i, j).value_at(ti))
                .sum();
            factor *= 1.0 + b / model.gamma(i).value_at(ti);
        }
        // for i ∈ c the compensator B(1 − g) and the g·B part of Λ add up to B
        let end = t.min(ti);
        for (j, s) in starts() {
            log_l -= model.phi_b(i, j).integral_between(s, end);
        }
    }

    // intensity of c
    for i in c.iter() {
        let ti = path.t_time(i);
        log_l -= model.alpha(i).integral(t);
        log_l -= model.gamma_g_integral(i, t.min(ti));
        for j in r.iter() {
            log_l -= model.phi_a(i, j).integral_between(path.tau_a(j), t);
        }
    }

    // A-contagion received by d before its T-event
    for j in d.iter() {
        let end = t.min(path.t_time(j));
        for k in r.iter() {
            log_l -= model.phi_a(j, k).integral_between(path.tau_a(k), end);
        }
    }

    factor * log_l.exp()
}
