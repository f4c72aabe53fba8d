//! Radon–Nikodým weights and the baseline martingales along a path.

use super::path::{FPath, SystemPath};
use crate::model::{DebtorSet, Model};

/// Density of the contagion law for `contagious` against the baseline law,
/// evaluated pathwise at `t`.
///
/// For every debtor `i` this multiplies the stochastic exponential of the
/// A-channel, `exp(−∫₀^{t∧τ(i)} Σ_{j∈C} φᴬ(i,j)1{τᴬ(j)<s} ds)·(1 + Aᶜ(i))` at
/// `τᴬ(i) ≤ t`, with the T-channel analogue driven by `φᴮ` and `τᴮ`.
pub fn girsanov_weight(model: &Model, contagious: DebtorSet, path: &SystemPath, t: f64) -> f64 {
    let mut log_w = 0.0;
    let mut jumps = 1.0;
    for i in 0..model.n() {
        let end_a = t.min(path.tau(i));
        let end_b = t.min(path.t_time(i));
        let tau_a = path.tau_a(i);
        let t_i = path.t_time(i);
        let mut a_jump = 0.0;
        let mut b_jump = 0.0;
        for j in contagious.iter().filter(|&j| j != i) {
            let phi_a = model.phi_a(i, j);
            let start = path.tau_a(j);
            log_w -= phi_a.integral_between(start, end_a);
            if tau_a <= t && start < tau_a {
                a_jump += phi_a.value_at(tau_a);
            }
            let phi_b = model.phi_b(i, j);
            let start = path.tau_b(j);
            log_w -= phi_b.integral_between(start, end_b);
            if t_i <= t && start < t_i {
                b_jump += phi_b.value_at(t_i);
            }
        }
        if a_jump > 0.0 {
            jumps *= 1.0 + a_jump / model.alpha(i).value_at(tau_a);
        }
        if b_jump > 0.0 {
            jumps *= 1.0 + b_jump / model.gamma(i).value_at(t_i);
        }
    }
    jumps * log_w.exp()
}

/// Density of the default-adjusted law for `c` against the baseline law at
/// `t`: `Π_{k∈c} exp(∫₀^{t∧T(k)} γg)·(1 − g_{T(k)})^{1{T(k)≤t}}`.
pub fn pbar_weight(model: &Model, c: DebtorSet, f_path: &FPath, t: f64) -> f64 {
    c.iter()
        .map(|k| model.nu_exponential(k, t, f_path.t(k)))
        .product()
}

/// `1{τᴬ(k) ≤ t} − ∫₀^{t∧τ(k)} α(k)`, a baseline martingale.
pub fn a_martingale(model: &Model, path: &SystemPath, k: usize, t: f64) -> f64 {
    let jump = if path.tau_a(k) <= t { 1.0 } else { 0.0 };
    jump - model.alpha(k).integral(t.min(path.tau(k)))
}

/// `1{T(k) ≤ t} − ∫₀^{t∧T(k)} γ(k)`, a baseline martingale.
pub fn t_martingale(model: &Model, f_path: &FPath, k: usize, t: f64) -> f64 {
    let jump = if f_path.t(k) <= t { 1.0 } else { 0.0 };
    jump - model.gamma(k).integral(t.min(f_path.t(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_spec, ModelSpec};
    use crate::sim::path::{EventKind, SystemEvent};

    #[test]
    fn weight_is_one_without_contagion_or_defaults() {
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_p0(1, 0.2)).unwrap();
        let path = SystemPath::from_events(
            2,
            vec![SystemEvent { time: 0.3, kind: EventKind::ADefault(0) }],
            None,
        );
        assert_eq!(girsanov_weight(&m, m.all(), &path, 1.0), 1.0);

        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_phi_a(1, 0, 0.3)).unwrap();
        let quiet = SystemPath::from_events(2, vec![], None);
        assert_eq!(girsanov_weight(&m, m.all(), &quiet, 1.0), 1.0);
    }

    #[test]
    fn weight_of_single_default_path() {
        // debtor 0 A-defaults at 0.4 and raises debtor 1's rate by 0.3
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_phi_a(1, 0, 0.3)).unwrap();
        let path = SystemPath::from_events(
            2,
            vec![SystemEvent { time: 0.4, kind: EventKind::ADefault(0) }],
            None,
        );
        let w = girsanov_weight(&m, m.all(), &path, 1.0);
        assert!((w - (-0.3f64 * 0.6).exp()).abs() < 1e-15);
        assert!((w - 0.835270).abs() < 1e-6);
        // debtor 0 outside the contagious set: no tilt
        assert_eq!(girsanov_weight(&m, DebtorSet::singleton(1), &path, 1.0), 1.0);
    }

    #[test]
    fn weight_includes_jump_factor() {
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_phi_a(1, 0, 0.3)).unwrap();
        let path = SystemPath::from_events(
            2,
            vec![
                SystemEvent { time: 0.4, kind: EventKind::ADefault(0) },
                SystemEvent { time: 0.9, kind: EventKind::ADefault(1) },
            ],
            None,
        );
        let w = girsanov_weight(&m, m.all(), &path, 1.0);
        let expect = (1.0 + 0.3 / 0.1) * (-0.3f64 * 0.5).exp();
        assert!((w - expect).abs() < 1e-14);
    }

    #[test]
    fn pbar_weight_cases() {
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_p0(0, 0.2)).unwrap();
        let f = FPath::new(vec![0.5, 0.3]);
        assert_eq!(pbar_weight(&m, DebtorSet::EMPTY, &f, 1.0), 1.0);
        assert_eq!(pbar_weight(&m, DebtorSet::singleton(1), &f, 1.0), 1.0);
        let w = pbar_weight(&m, DebtorSet::singleton(0), &f, 1.0);
        let gg = 0.5 * 0.2 * (0.05f64.exp() - 1.0) / 0.1;
        assert!((w - gg.exp() * (1.0 - 0.2 * 0.05f64.exp())).abs() < 1e-15);
    }
}
