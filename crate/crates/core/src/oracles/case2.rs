//! The deterministic subset ODE that survival probabilities satisfy when no
//! debtor is systemic, solved by matrix exponentials.

use nalgebra::{DMatrix, DVector};

use super::markov::MARKOV_MAX_DEBTORS;
use crate::error::OracleError;
use crate::model::{DebtorSet, Model};

/// Largest `|N − C|` the dense exponential handles (2¹⁰ unknowns).
pub const CASE2_MAX_FREE: usize = 10;

/// `ℓ^S(t)` for `S = N − target` on a nondecreasing grid.
///
/// For every `S ⊆ N − target`, with `C = N − S`,
/// `dℓ^S = −ℓ^S (λ(C) + φᴬ(C,S)) dt + Σ_{j∈S} ℓ^{S−j} φᴬ(C,j) dt`, `ℓ^S(0) = 1`.
/// The system is linear with piecewise-constant coefficients, so each
/// segment is advanced exactly with `exp(M·h)`.
pub fn case2_ode_survival(model: &Model, target: DebtorSet, t_grid: &[f64]) -> Result<Vec<f64>, OracleError> {
    if let Some(k) = model.systemic().iter().next() {
        return Err(OracleError::SystemicDebtor(k));
    }
    let n = model.n();
    let free = target.complement(n);
    if n > MARKOV_MAX_DEBTORS || free.len() > CASE2_MAX_FREE {
        return Err(OracleError::DimensionCap {
            n,
            cap: CASE2_MAX_FREE,
        });
    }
    // unknowns indexed by the compressed position of S inside `free`
    let members: Vec<usize> = free.iter().collect();
    let dim = 1usize << members.len();
    let expand = |idx: usize| -> DebtorSet {
        members
            .iter()
            .enumerate()
            .filter(|&(b, _)| idx >> b & 1 == 1)
            .map(|(_, &k)| k)
            .collect()
    };
    let system = |t: f64| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let s = expand(idx);
            let c = s.complement(n);
            let lambda: f64 = c.iter().map(|i| model.alpha(i).value_at(t)).sum();
            let phi = |j: usize| -> f64 { c.iter().map(|i| model.phi_a(i, j).value_at(t)).sum() };
            let mut diag = lambda;
            for (b, &j) in members.iter().enumerate() {
                if idx >> b & 1 == 1 {
                    let p = phi(j);
                    diag += p;
                    m[(idx, idx & !(1 << b))] += p;
                }
            }
            m[(idx, idx)] -= diag;
        }
        m
    };

    let mut ell = DVector::from_element(dim, 1.0);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut u = 0.0;
    for &g in t_grid {
        let cuts: Vec<f64> = model.stops().iter().copied().filter(|&s| s > u && s < g).collect();
        for v in cuts.into_iter().chain(std::iter::once(g)) {
            if v > u {
                ell = (system(u) * (v - u)).exp() * ell;
                u = v;
            }
        }
        out.push(ell[dim - 1]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_spec, ModelSpec, PiecewiseConstant};

    #[test]
    fn no_contagion_is_exponential_decay() {
        let m = validate_spec(
            ModelSpec::uniform(3, 2.0, 0.1, 0.5)
                .with_alpha(2, PiecewiseConstant::new(vec![0.0, 0.5], vec![0.2, 0.4]).unwrap()),
        )
        .unwrap();
        let c = DebtorSet::from_mask(0b101);
        let v = case2_ode_survival(&m, c, &[0.25, 1.0, 2.0]).unwrap();
        for (t, got) in [0.25, 1.0, 2.0].iter().zip(v) {
            let expect = (-(m.alpha(0).integral(*t) + m.alpha(2).integral(*t))).exp();
            assert!((got - expect).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn one_way_contagion_closed_form() {
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_phi_a(1, 0, 0.3)).unwrap();
        let v = case2_ode_survival(&m, DebtorSet::singleton(1), &[0.0, 1.0]).unwrap();
        let e1 = (-0.1f64).exp();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - e1 * (e1 + 0.5 * (e1 - (-0.3f64).exp()))).abs() < 1e-12);
    }

    #[test]
    fn rejects_systemic() {
        let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_p0(0, 0.1)).unwrap();
        assert!(case2_ode_survival(&m, DebtorSet::singleton(1), &[1.0]).is_err());
    }
}
