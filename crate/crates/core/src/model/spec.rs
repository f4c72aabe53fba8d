//! Model parameterization, validation and coefficient evaluation.

use serde::Serialize;

use super::coeff::PiecewiseConstant;
use super::debtors::{DebtorSet, MAX_DEBTORS};
use crate::error::{CoeffLocation, ModelError, ValidationError, Violation};

/// Full parameterization of a default system.
///
/// `phi_a[i][j]` and `phi_b[i][j]` are the impacts of debtor `j`'s default on
/// debtor `i`. The conditional default probability at the environment event
/// `T(k)` is driven by the constant `p0[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub n: usize,
    pub horizon: f64,
    pub epsilon_g: f64,
    pub alpha: Vec<PiecewiseConstant>,
    pub gamma: Vec<PiecewiseConstant>,
    pub p0: Vec<f64>,
    #[serde(rename = "phiA")]
    pub phi_a: Vec<Vec<PiecewiseConstant>>,
    #[serde(rename = "phiB")]
    pub phi_b: Vec<Vec<PiecewiseConstant>>,
}

pub const DEFAULT_EPSILON_G: f64 = 1e-6;

impl ModelSpec {
    /// `n` debtors with constant baselines `alpha`, `gamma`, no systemic
    /// debtors and no contagion.
    pub fn uniform(n: usize, horizon: f64, alpha: f64, gamma: f64) -> Self {
        let zero = || vec![vec![PiecewiseConstant::zero(); n]; n];
        ModelSpec {
            n,
            horizon,
            epsilon_g: DEFAULT_EPSILON_G,
            alpha: vec![PiecewiseConstant::constant(alpha); n],
            gamma: vec![PiecewiseConstant::constant(gamma); n],
            p0: vec![0.0; n],
            phi_a: zero(),
            phi_b: zero(),
        }
    }

    pub fn single_name(alpha: f64, gamma: f64, p0: f64, horizon: f64) -> Self {
        Self::uniform(1, horizon, alpha, gamma).with_p0(0, p0)
    }

    pub fn with_alpha(mut self, k: usize, rate: PiecewiseConstant) -> Self {
        self.alpha[k] = rate;
        self
    }

    pub fn with_gamma(mut self, k: usize, rate: PiecewiseConstant) -> Self {
        self.gamma[k] = rate;
        self
    }

    pub fn with_p0(mut self, k: usize, p0: f64) -> Self {
        self.p0[k] = p0;
        self
    }

    /// Constant direct impact of `j`'s default on `i`.
    pub fn with_phi_a(mut self, i: usize, j: usize, value: f64) -> Self {
        self.phi_a[i][j] = PiecewiseConstant::constant(value);
        self
    }

    /// Constant indirect impact of `j`'s default on `i`'s environment.
    pub fn with_phi_b(mut self, i: usize, j: usize, value: f64) -> Self {
        self.phi_b[i][j] = PiecewiseConstant::constant(value);
        self
    }
}

/// Checks every invariant and returns a validated [`Model`] or all violations.
pub fn validate_spec(spec: ModelSpec) -> Result<Model, ValidationError> {
    let mut violations = Vec::new();
    let n = spec.n;
    if n == 0 || n > MAX_DEBTORS {
        violations.push(Violation::DebtorCount(n));
    }
    if !(spec.horizon.is_finite() && spec.horizon > 0.0) {
        violations.push(Violation::Horizon(spec.horizon));
    }
    if !(spec.epsilon_g > 0.0 && spec.epsilon_g < 1.0) {
        violations.push(Violation::Epsilon(spec.epsilon_g));
    }
    let mut dim = |what: &str, found: usize| {
        if found != n {
            violations.push(Violation::DimensionMismatch {
                what: what.to_string(),
                expected: n,
                found,
            });
        }
    };
    dim("alpha", spec.alpha.len());
    dim("gamma", spec.gamma.len());
    dim("p0", spec.p0.len());
    dim("phiA rows", spec.phi_a.len());
    dim("phiB rows", spec.phi_b.len());
    for (i, row) in spec.phi_a.iter().enumerate() {
        dim(&format!("phiA[{i}]"), row.len());
    }
    for (i, row) in spec.phi_b.iter().enumerate() {
        dim(&format!("phiB[{i}]"), row.len());
    }
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }

    let horizon = spec.horizon;
    for k in 0..n {
        for (rate, loc) in [
            (&spec.alpha[k], CoeffLocation::Alpha(k)),
            (&spec.gamma[k], CoeffLocation::Gamma(k)),
        ] {
            for (seg, (&b, &v)) in rate.breakpoints().iter().zip(rate.values()).enumerate() {
                if b <= horizon && v <= 0.0 {
                    violations.push(Violation::NonPositiveBaseline {
                        location: loc.clone(),
                        segment: seg,
                        value: v,
                    });
                }
            }
        }
        let p = spec.p0[k];
        if !(p.is_finite() && (0.0..1.0).contains(&p)) {
            violations.push(Violation::P0OutOfRange { debtor: k, value: p });
        } else {
            let g_max = p * spec.alpha[k].integral(horizon).exp();
            let limit = 1.0 - spec.epsilon_g;
            if g_max > limit {
                violations.push(Violation::CapViolation {
                    debtor: k,
                    value: g_max,
                    limit,
                });
            }
        }
        if !spec.phi_a[k][k].is_zero() {
            violations.push(Violation::DiagonalImpact {
                location: CoeffLocation::PhiA(k, k),
            });
        }
        if !spec.phi_b[k][k].is_zero() {
            violations.push(Violation::DiagonalImpact {
                location: CoeffLocation::PhiB(k, k),
            });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }
    Ok(Model::build(spec))
}

/// Merged α/γ segments of one debtor with cached `∫α` and `∫γg`.
#[derive(Debug, Clone)]
struct DebtorCurve {
    p0: f64,
    breaks: Vec<f64>,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    cum_a: Vec<f64>,
    cum_gg: Vec<f64>,
}

/// `∫₀^dt e^{r s} ds`, stable for small `r·dt`.
#[inline]
pub(crate) fn exp_growth_integral(rate: f64, dt: f64) -> f64 {
    let x = rate * dt;
    if x.abs() < 1e-300 {
        dt
    } else {
        dt * (x.exp_m1() / x)
    }
}

impl DebtorCurve {
    fn new(alpha: &PiecewiseConstant, gamma: &PiecewiseConstant, p0: f64) -> Self {
        let breaks = merge_breaks([alpha, gamma]);
        let a: Vec<f64> = breaks.iter().map(|&b| alpha.value_at(b)).collect();
        let c: Vec<f64> = breaks.iter().map(|&b| gamma.value_at(b)).collect();
        let mut cum_a = vec![0.0f64];
        let mut cum_gg = vec![0.0f64];
        for i in 1..breaks.len() {
            let dt = breaks[i] - breaks[i - 1];
            let ga = p0 * cum_a[i - 1].exp();
            cum_gg.push(cum_gg[i - 1] + c[i - 1] * ga * exp_growth_integral(a[i - 1], dt));
            cum_a.push(cum_a[i - 1] + a[i - 1] * dt);
        }
        DebtorCurve {
            p0,
            breaks,
            alpha: a,
            gamma: c,
            cum_a,
            cum_gg,
        }
    }

    #[inline]
    fn seg(&self, t: f64) -> usize {
        self.breaks.partition_point(|&b| b <= t).saturating_sub(1)
    }

    #[inline]
    fn g(&self, t: f64) -> f64 {
        if self.p0 == 0.0 {
            return 0.0;
        }
        let i = self.seg(t);
        self.p0 * (self.cum_a[i] + self.alpha[i] * (t - self.breaks[i])).exp()
    }

    /// `∫₀ᵗ γ_s g_s ds` (no cut at `T`).
    #[inline]
    fn gamma_g(&self, t: f64) -> f64 {
        if self.p0 == 0.0 {
            return 0.0;
        }
        let i = self.seg(t);
        let ga = self.p0 * self.cum_a[i].exp();
        self.cum_gg[i] + self.gamma[i] * ga * exp_growth_integral(self.alpha[i], t - self.breaks[i])
    }
}

pub(crate) fn merge_breaks<'a>(rates: impl IntoIterator<Item = &'a PiecewiseConstant>) -> Vec<f64> {
    let mut all: Vec<f64> = rates
        .into_iter()
        .flat_map(|r| r.breakpoints().iter().copied())
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// A validated model. Construct with [`validate_spec`].
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    systemic: DebtorSet,
    curves: Vec<DebtorCurve>,
    stops: Vec<f64>,
}

impl Model {
    fn build(spec: ModelSpec) -> Self {
        let n = spec.n;
        let systemic = (0..n).filter(|&k| spec.p0[k] > 0.0).collect();
        let curves = (0..n)
            .map(|k| DebtorCurve::new(&spec.alpha[k], &spec.gamma[k], spec.p0[k]))
            .collect();
        let rates = spec
            .alpha
            .iter()
            .chain(&spec.gamma)
            .chain(spec.phi_a.iter().flatten())
            .chain(spec.phi_b.iter().flatten());
        let stops = merge_breaks(rates)
            .into_iter()
            .filter(|&b| b > 0.0 && b < spec.horizon)
            .collect();
        Model {
            spec,
            systemic,
            curves,
            stops,
        }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn horizon(&self) -> f64 {
        self.spec.horizon
    }

    pub fn all(&self) -> DebtorSet {
        DebtorSet::full(self.spec.n)
    }

    /// Debtors with `p0 > 0`, the only ones that can default at `T(k)`.
    pub fn systemic(&self) -> DebtorSet {
        self.systemic
    }

    pub fn is_systemic(&self, k: usize) -> bool {
        self.systemic.contains(k)
    }

    pub fn alpha(&self, k: usize) -> &PiecewiseConstant {
        &self.spec.alpha[k]
    }

    pub fn gamma(&self, k: usize) -> &PiecewiseConstant {
        &self.spec.gamma[k]
    }

    pub fn p0(&self, k: usize) -> f64 {
        self.spec.p0[k]
    }

    pub fn phi_a(&self, i: usize, j: usize) -> &PiecewiseConstant {
        &self.spec.phi_a[i][j]
    }

    pub fn phi_b(&self, i: usize, j: usize) -> &PiecewiseConstant {
        &self.spec.phi_b[i][j]
    }

    /// Interior breakpoints of every coefficient, sorted, within `(0, horizon)`.
    pub fn stops(&self) -> &[f64] {
        &self.stops
    }

    pub fn has_contagion(&self) -> bool {
        self.spec
            .phi_a
            .iter()
            .chain(&self.spec.phi_b)
            .flatten()
            .any(|r| !r.is_zero())
    }

    fn check_time(&self, t: f64) -> Result<(), ModelError> {
        if (0.0..=self.horizon()).contains(&t) {
            Ok(())
        } else {
            Err(ModelError::TimeOutOfRange {
                t,
                horizon: self.horizon(),
            })
        }
    }

    fn check_debtor(&self, k: usize) -> Result<(), ModelError> {
        if k < self.n() {
            Ok(())
        } else {
            Err(ModelError::DebtorOutOfRange(k))
        }
    }

    /// Exact `∫₀ᵗ f`, restricted to the model horizon.
    pub fn coeff_integral(&self, f: &PiecewiseConstant, t: f64) -> Result<f64, ModelError> {
        self.check_time(t)?;
        Ok(f.integral(t))
    }

    /// `p0(k)·exp(∫₀ᵗ α(k))`, the default probability at `T(k) = t`.
    pub fn g_value(&self, k: usize, t: f64) -> Result<f64, ModelError> {
        self.check_debtor(k)?;
        self.check_time(t)?;
        Ok(self.g(k, t))
    }

    /// Unchecked [`Model::g_value`] for hot loops.
    #[inline]
    pub fn g(&self, k: usize, t: f64) -> f64 {
        self.curves[k].g(t)
    }

    /// Size of the hazard jump `−ln(1 − g)` at `T(k) = t`.
    pub fn hazard_jump(&self, k: usize, t: f64) -> Result<f64, ModelError> {
        let g = self.g_value(k, t)?;
        if g >= 1.0 {
            return Err(ModelError::CapViolation { debtor: k, g });
        }
        Ok(-(-g).ln_1p())
    }

    /// `(λ, β)` of debtor `k` at `t`. After `T(k)` the jump channel is closed.
    pub fn base_intensities(&self, k: usize, t: f64, t_occurred: bool) -> (f64, f64) {
        let alpha = self.spec.alpha[k].value_at(t);
        if t_occurred {
            return (alpha, 0.0);
        }
        let beta = self.g(k, t) * self.spec.gamma[k].value_at(t);
        (alpha + beta, beta)
    }

    /// `Σ_{k∈C} φᴬ(k,j) + Σ_{k∈D} φᴬ(k,j)·1{T(k) > t}`.
    pub fn psi_a(
        &self,
        c: DebtorSet,
        d: DebtorSet,
        j: usize,
        t: f64,
        t_times: &[f64],
    ) -> f64 {
        let from_c: f64 = c.iter().map(|k| self.spec.phi_a[k][j].value_at(t)).sum();
        let from_d: f64 = d
            .iter()
            .filter(|&k| t_times[k] > t)
            .map(|k| self.spec.phi_a[k][j].value_at(t))
            .sum();
        from_c + from_d
    }

    /// `∫₀ᵗ γ_s(k) g_s(k) ds`, ignoring the cut at `T(k)`.
    #[inline]
    pub fn gamma_g_integral(&self, k: usize, t: f64) -> f64 {
        self.curves[k].gamma_g(t)
    }

    /// `∫ₐᵇ f(s) g_s(k) ds` for a piecewise-constant `f`, in closed form.
    pub fn integral_times_g(&self, k: usize, f: &PiecewiseConstant, a: f64, b: f64) -> f64 {
        let curve = &self.curves[k];
        if b <= a || curve.p0 == 0.0 || f.is_zero() {
            return 0.0;
        }
        let mut cuts: Vec<f64> = curve
            .breaks
            .iter()
            .chain(f.breakpoints())
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut u = a;
        for v in cuts.into_iter().chain(std::iter::once(b)) {
            let rate = curve.alpha[curve.seg(u)];
            total += f.value_at(u) * curve.g(u) * exp_growth_integral(rate, v - u);
            u = v;
        }
        total
    }

    /// Stochastic exponential of `ν(k) = −∫ g dn(k)` at `t`, given `T(k)`:
    /// `exp(∫₀^{t∧T} γ g)·(1 − g_T)^{1{T ≤ t}}`.
    pub fn nu_exponential(&self, k: usize, t: f64, t_k: f64) -> f64 {
        if self.spec.p0[k] == 0.0 {
            return 1.0;
        }
        if t_k <= t {
            self.gamma_g_integral(k, t_k).exp() * (1.0 - self.g(k, t_k))
        } else {
            self.gamma_g_integral(k, t).exp()
        }
    }
}
