//! The contagion model without environment defaults as a continuous-time
//! Markov chain on default vectors `x ∈ {0,1}ⁿ`, encoded as [`DebtorSet`]
//! masks.

use crate::error::OracleError;
use crate::model::{DebtorSet, Model};

/// Largest debtor count the chain oracles accept.
pub const MARKOV_MAX_DEBTORS: usize = 12;

const TAIL_TOL: f64 = 1e-12;
/// Largest `Λh` per uniformization step, keeping `e^{−Λh}` well above
/// underflow.
const MAX_UNIFORM_STEP: f64 = 10.0;

/// Generator at one time, stored row-wise as the `n` single-flip rates
/// `q(x, x ∪ {k})` of every state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    rates: Vec<f64>,
}

impl GeneratorMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> usize {
        1 << self.n
    }

    /// `q(x, x ∪ {k})`; zero when `k ∈ x`.
    #[inline]
    pub fn flip_rate(&self, x: DebtorSet, k: usize) -> f64 {
        self.rates[x.mask() as usize * self.n + k]
    }

    /// `q(x, y)` for any pair of states.
    pub fn entry(&self, x: DebtorSet, y: DebtorSet) -> f64 {
        if x == y {
            return -self.exit_rate(x);
        }
        let flipped = x.mask() ^ y.mask();
        if flipped.count_ones() == 1 && x.is_subset(y) {
            self.flip_rate(x, flipped.trailing_zeros() as usize)
        } else {
            0.0
        }
    }

    /// `−q(x, x)`.
    pub fn exit_rate(&self, x: DebtorSet) -> f64 {
        let i = x.mask() as usize * self.n;
        self.rates[i..i + self.n].iter().sum()
    }

    /// `q(x, ·)` summed over all targets, diagonal included.
    pub fn row_sum(&self, x: DebtorSet) -> f64 {
        (0..self.states() as u32)
            .map(|y| self.entry(x, DebtorSet::from_mask(y)))
            .sum()
    }

    fn max_exit_rate(&self) -> f64 {
        (0..self.states() as u32)
            .map(|x| self.exit_rate(DebtorSet::from_mask(x)))
            .fold(0.0, f64::max)
    }

    /// `p ↦ p·P` with `P = I + Q/Λ`.
    fn uniformized_step(&self, p: &[f64], lambda: f64, out: &mut [f64]) {
        let n = self.n;
        for (x, o) in out.iter_mut().enumerate() {
            *o = p[x] * (1.0 - self.exit_rate(DebtorSet::from_mask(x as u32)) / lambda);
        }
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for k in 0..n {
                let r = self.rates[x * n + k];
                if r > 0.0 {
                    out[x | 1 << k] += px * r / lambda;
                }
            }
        }
    }
}

fn check_markov(model: &Model) -> Result<(), OracleError> {
    if let Some(k) = model.systemic().iter().next() {
        return Err(OracleError::SystemicDebtor(k));
    }
    if model.n() > MARKOV_MAX_DEBTORS {
        return Err(OracleError::DimensionCap {
            n: model.n(),
            cap: MARKOV_MAX_DEBTORS,
        });
    }
    Ok(())
}

/// Generator at `t`: an alive debtor `k` defaults at
/// `α_t(k) + Σ_j φᴬ_t(k,j)·x(j)`.
pub fn markov_generator(model: &Model, t: f64) -> Result<GeneratorMatrix, OracleError> {
    check_markov(model)?;
    let n = model.n();
    let mut rates = vec![0.0; n << n];
    for x in 0..1u32 << n {
        let set = DebtorSet::from_mask(x);
        for k in 0..n {
            if set.contains(k) {
                continue;
            }
            let contagion: f64 = set.iter().map(|j| model.phi_a(k, j).value_at(t)).sum();
            rates[x as usize * n + k] = model.alpha(k).value_at(t) + contagion;
        }
    }
    Ok(GeneratorMatrix { n, rates })
}

/// `p ↦ p·exp(Q h)` by uniformization, truncating the Poisson series once the
/// remaining mass is below `1e−12`.
fn propagate(q: &GeneratorMatrix, p: &mut Vec<f64>, h: f64) {
    let lambda = q.max_exit_rate();
    if lambda == 0.0 || h <= 0.0 {
        return;
    }
    let steps = (lambda * h / MAX_UNIFORM_STEP).ceil().max(1.0) as usize;
    let dt = h / steps as f64;
    let lh = lambda * dt;
    let mut term = vec![0.0; p.len()];
    let mut next = vec![0.0; p.len()];
    for _ in 0..steps {
        let mut weight = (-lh).exp();
        let mut mass = weight;
        let mut acc: Vec<f64> = p.iter().map(|v| v * weight).collect();
        term.copy_from_slice(p);
        let mut k = 0usize;
        while 1.0 - mass > TAIL_TOL && k < 10_000 {
            k += 1;
            q.uniformized_step(&term, lambda, &mut next);
            std::mem::swap(&mut term, &mut next);
            weight *= lh / k as f64;
            mass += weight;
            for (a, v) in acc.iter_mut().zip(&term) {
                *a += weight * v;
            }
        }
        *p = acc;
    }
}

/// State distribution at `t`, starting from all debtors alive.
pub fn markov_distribution(model: &Model, t: f64) -> Result<Vec<f64>, OracleError> {
    check_markov(model)?;
    let mut p = vec![0.0; 1 << model.n()];
    p[0] = 1.0;
    let mut u = 0.0;
    let cuts = model.stops().iter().copied().filter(|&s| s < t);
    for v in cuts.chain(std::iter::once(t)) {
        if v > u {
            let q = markov_generator(model, u)?;
            propagate(&q, &mut p, v - u);
            u = v;
        }
    }
    Ok(p)
}

/// `P(no debtor in c has defaulted by t)` for the chain.
pub fn markov_joint_survival(model: &Model, c: DebtorSet, t: f64) -> Result<f64, OracleError> {
    let p = markov_distribution(model, t)?;
    Ok(p.iter()
        .enumerate()
        .filter(|&(x, _)| DebtorSet::from_mask(x as u32).is_disjoint(c))
        .map(|(_, v)| v)
        .sum())
}
