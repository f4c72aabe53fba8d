use crate::error::OracleError;
use crate::model::{exp_growth_integral, PiecewiseConstant};

/// Survival probability `P(τ > t)` of a single name under the baseline law.
///
/// `e^{−∫α}·[e^{−∫γ} + ∫₀ᵗ (1 − p0·e^{∫₀ˢα}) γ_s e^{−∫₀ˢγ} ds]`, which
/// simplifies to `e^{−∫α}·[1 − p0 ∫₀ᵗ γ_s e^{∫₀ˢ(α−γ)} ds]`; the remaining
/// integral is evaluated in closed form on each constant segment.
pub fn single_name_survival_oracle(
    alpha: &PiecewiseConstant,
    gamma: &PiecewiseConstant,
    p0: f64,
    t: f64,
) -> Result<f64, OracleError> {
    let g_max = p0 * alpha.integral(t).exp();
    if g_max >= 1.0 {
        return Err(OracleError::Cap(g_max));
    }
    if t <= 0.0 {
        return Ok(1.0);
    }
    let mut cuts: Vec<f64> = alpha
        .breakpoints()
        .iter()
        .chain(gamma.breakpoints())
        .copied()
        .filter(|&b| b > 0.0 && b < t)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut jump_part = 0.0;
    let mut u = 0.0;
    for v in cuts.into_iter().chain(std::iter::once(t)) {
        let (a, c) = (alpha.value_at(u), gamma.value_at(u));
        let level = (alpha.integral(u) - gamma.integral(u)).exp();
        jump_part += c * level * exp_growth_integral(a - c, v - u);
        u = v;
    }
    Ok((-alpha.integral(t)).exp() * (1.0 - p0 * jump_part))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a = PiecewiseConstant::constant(0.1);
        let c = PiecewiseConstant::constant(0.5);
        let s = single_name_survival_oracle(&a, &c, 0.0, 3.0).unwrap();
        assert!((s - (-0.3f64).exp()).abs() < 1e-15);
        let s = single_name_survival_oracle(&a, &c, 0.2, 1.0).unwrap();
        let closed = (-0.1f64).exp() * (1.0 - 0.1 * ((-0.4f64).exp() - 1.0) / -0.4);
        assert!((s - closed).abs() < 1e-15);
        assert!((s - 0.83026).abs() < 1e-5);
        assert_eq!(single_name_survival_oracle(&a, &c, 0.2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn cap_is_enforced() {
        let a = PiecewiseConstant::constant(0.5);
        let c = PiecewiseConstant::constant(0.5);
        assert!(matches!(
            single_name_survival_oracle(&a, &c, 0.9, 1.0),
            Err(OracleError::Cap(_))
        ));
    }

    #[test]
    fn segments_compose() {
        // splitting a constant rate at an artificial breakpoint changes nothing
        let a1 = PiecewiseConstant::constant(0.2);
        let a2 = PiecewiseConstant::new(vec![0.0, 0.3], vec![0.2, 0.2]).unwrap();
        let c = PiecewiseConstant::new(vec![0.0, 0.6], vec![0.4, 0.9]).unwrap();
        let x = single_name_survival_oracle(&a1, &c, 0.3, 1.0).unwrap();
        let y = single_name_survival_oracle(&a2, &c, 0.3, 1.0).unwrap();
        assert!((x - y).abs() < 1e-15);
    }
}
