//! Shared models and independent reference computations for the
//! integration tests. Nothing here calls the crate's own oracles.

#![allow(dead_code)]

use overspill::{validate_spec, Model, ModelSpec, PiecewiseConstant};

/// Composite Simpson rule with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    assert!(m % 2 == 0);
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Single-name survival for constant rates by quadrature of
/// `e^{−αt}[e^{−γt} + ∫₀ᵗ (1 − p0 e^{αs}) γ e^{−γs} ds]`.
pub fn single_name_quadrature(alpha: f64, gamma: f64, p0: f64, t: f64) -> f64 {
    let integral = simpson(
        |s| (1.0 - p0 * (alpha * s).exp()) * gamma * (-gamma * s).exp(),
        0.0,
        t,
        20_000,
    );
    (-alpha * t).exp() * ((-gamma * t).exp() + integral)
}

/// `P̄(T > t) = exp(−∫₀ᵗ γ(1 − p0 e^{αs}) ds)` by quadrature.
pub fn thinned_no_event_quadrature(alpha: f64, gamma: f64, p0: f64, t: f64) -> f64 {
    (-simpson(|s| gamma * (1.0 - p0 * (alpha * s).exp()), 0.0, t, 20_000)).exp()
}

pub const STD_ALPHA: f64 = 0.1;
pub const STD_GAMMA: f64 = 0.5;
pub const STD_P0: f64 = 0.2;

pub fn single_name() -> Model {
    validate_spec(ModelSpec::single_name(STD_ALPHA, STD_GAMMA, STD_P0, 1.0)).unwrap()
}

/// Two names where only debtor 0's default affects debtor 1.
pub fn one_way() -> Model {
    validate_spec(ModelSpec::uniform(2, 2.0, 0.1, 0.5).with_phi_a(1, 0, 0.3)).unwrap()
}

/// `e^{−0.1}(e^{−0.1} + 0.5(e^{−0.1} − e^{−0.3}))`, the survival of debtor 1
/// in [`one_way`] at `t = 1`, from integrating over debtor 0's default time.
pub fn one_way_closed_form() -> f64 {
    let e1 = (-0.1f64).exp();
    e1 * (e1 + 0.5 * (e1 - (-0.3f64).exp()))
}

/// Four debtors, two systemic, with dense direct and indirect contagion.
pub fn four_debtors() -> Model {
    let alpha = [0.10, 0.15, 0.08, 0.12];
    let gamma = [0.6, 0.4, 0.8, 0.5];
    let p0 = [0.0, 0.0, 0.1, 0.2];
    let phi_a = [
        [0.0, 0.2, 0.3, 0.1],
        [0.25, 0.0, 0.15, 0.4],
        [0.1, 0.35, 0.0, 0.2],
        [0.3, 0.1, 0.25, 0.0],
    ];
    let phi_b = [
        [0.0, 0.3, 0.5, 0.8],
        [0.2, 0.0, 0.6, 0.4],
        [0.7, 0.3, 0.0, 0.5],
        [0.4, 0.6, 0.2, 0.0],
    ];
    let mut s = ModelSpec::uniform(4, 1.0, 0.1, 0.5);
    for k in 0..4 {
        s = s
            .with_alpha(k, PiecewiseConstant::constant(alpha[k]))
            .with_gamma(k, PiecewiseConstant::constant(gamma[k]))
            .with_p0(k, p0[k]);
        for j in 0..4 {
            if j != k {
                s = s.with_phi_a(k, j, phi_a[k][j]).with_phi_b(k, j, phi_b[k][j]);
            }
        }
    }
    validate_spec(s).unwrap()
}

/// Parameters of the two-name model where debtor 1's A-default raises
/// debtor 0's intensity by `a` and there is no indirect contagion.
pub const BIAS_ALPHA: [f64; 2] = [0.1, 0.3];
pub const BIAS_GAMMA: [f64; 2] = [0.5, 1.0];
pub const BIAS_P0: [f64; 2] = [0.2, 0.5];
pub const BIAS_A: f64 = 2.0;

pub fn bias_model() -> Model {
    let mut s = ModelSpec::uniform(2, 1.0, 0.1, 0.5);
    for k in 0..2 {
        s = s
            .with_alpha(k, PiecewiseConstant::constant(BIAS_ALPHA[k]))
            .with_gamma(k, PiecewiseConstant::constant(BIAS_GAMMA[k]))
            .with_p0(k, BIAS_P0[k]);
    }
    validate_spec(s.with_phi_a(0, 1, BIAS_A)).unwrap()
}

/// Survival of debtor 0 in [`bias_model`]. Debtor 1 evolves on its own, so
/// conditioning on its A-default time `s` (density `α₁·S₁(s)`) gives
/// `S₀(t)·[1 − ∫₀ᵗ α₁ S₁(s) (1 − e^{−a(t−s)}) ds]`.
pub fn bias_oracle(t: f64) -> f64 {
    let s0 = single_name_quadrature(BIAS_ALPHA[0], BIAS_GAMMA[0], BIAS_P0[0], t);
    let inner = simpson(
        |s| {
            let s1 = single_name_quadrature(BIAS_ALPHA[1], BIAS_GAMMA[1], BIAS_P0[1], s);
            BIAS_ALPHA[1] * s1 * (1.0 - (-BIAS_A * (t - s)).exp())
        },
        0.0,
        t,
        400,
    );
    s0 * (1.0 - inner)
}

/// `|a − b| ≤ k·√(se_a² + se_b²)`.
pub fn within(a: (f64, f64), b: (f64, f64), k: f64) -> bool {
    (a.0 - b.0).abs() <= k * a.1.hypot(b.1)
}
