//! Pathwise integration of the ladder along an environment path.
//!
//! For a node `(S, D)` with `C = N − S`, `R = S − D`, pending set
//! `P = {k : T(k) > t}` and occurred set `O = {k : T(k) < t}`, write
//! `ψ_j = ψᴬ(C ∪ D, j)`, `P_j = p0(j)·1{j ∈ O}·ℓ^{S|D∪j}` and
//! `K_i = Σ_{j∈R∩O} φᴮ(i,j) P_j + Σ_{j∈D∩O} φᴮ(i,j) ℓ^{S|D}`. Between
//! environment events
//!
//! ```text
//! dℓ^{S|D} = [ −ℓ^{S|D} (λ(C) + Σ_{j∈R} ψ_j) + Σ_{j∈R} (Q_j + P_j) ψ_j − Σ_{i∈P} K_i ] dt
//! ```
//!
//! and at `T(k)` every node jumps by `K_k / γ_k`. The term `Q_j` depends on
//! the [`DriftForm`].

use serde::Serialize;

use super::dp54::{Dp54, StepControl};
use super::lattice::Ladder;
use crate::error::SolverError;
use crate::model::{DebtorSet, Model};
use crate::sim::FPath;

/// Which version of the `ℓ^{S−j|D}` coupling to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftForm {
    /// `Q_j = ℓ^{S−j|D}·E_t(ν(j))`, where `E_t(ν(j)) =
    /// exp(∫₀^{t∧T(j)} γg)·(1 − g_{T(j)})^{1{T(j)≤t}}` accounts for
    /// `ℓ^{S−j|D}` being an average under the default-adjusted law for
    /// `C ∪ {j}` rather than `C`. This is the form whose average matches the
    /// survival probabilities when debtors in `S` are systemic.
    #[default]
    Projected,
    /// `Q_j = ℓ^{S−j|D}`. Agrees with [`DriftForm::Projected`] when no debtor
    /// is systemic and is biased otherwise.
    Uncompensated,
    /// The sign pattern `(ℓ^{S|D} − ℓ^{S−j|D} + P_j)ψ_j` with decay
    /// `−ℓ^{S|D} λ(C)`. Kept for regression checks; it does not reproduce the
    /// Markov chain even without systemic debtors.
    PrintedSigns,
}

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Absolute and relative local error tolerance.
    pub tol: f64,
    /// Values below `−tol_neg` abort with [`SolverError::NegativeValue`].
    pub tol_neg: f64,
    /// Optional cap on the step size.
    pub max_step: Option<f64>,
    pub form: DriftForm,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::with_tol(1e-8)
    }
}

impl SolverOptions {
    /// `tol` with `tol_neg = 10·tol`.
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            tol_neg: 10.0 * tol,
            max_step: None,
            form: DriftForm::Projected,
        }
    }

    pub fn form(mut self, form: DriftForm) -> Self {
        self.form = form;
        self
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = Some(h);
        self
    }
}

/// `ℓ^{S|D}` of every node at every grid time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderValues {
    pub grid: Vec<f64>,
    /// `values[g][node]`.
    pub values: Vec<Vec<f64>>,
}

impl LadderValues {
    pub fn at(&self, grid_index: usize, node: usize) -> f64 {
        self.values[grid_index][node]
    }
}

/// Linear coefficients of one node's drift at a fixed time:
/// `drift = diag·ℓ^{S|D} + Σ down·ℓ^{S−j|D} + Σ up·ℓ^{S|D∪j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftTerms {
    pub diag: f64,
    /// `(j, coefficient of ℓ^{S−j|D})`.
    pub down: Vec<(usize, f64)>,
    /// `(j, coefficient of ℓ^{S|D∪j})`.
    pub up: Vec<(usize, f64)>,
}

/// Coefficients of one node on a segment where the path flags and all
/// piecewise-constant rates are fixed. Only `g` and `E(ν)` still vary.
#[derive(Debug, Clone)]
struct NodeCoeffs {
    diag: f64,
    /// Debtors in `C` whose `γg` decay is active.
    g_decay: DebtorSet,
    /// `(node, coefficient, j if multiplied by E_t(ν(j)))`.
    down: Vec<(usize, f64, Option<usize>)>,
    up: Vec<(usize, f64)>,
}

/// Per-debtor state of `g` and `E(ν)` on a segment starting at `t0`.
#[derive(Debug, Clone, Copy)]
struct DebtorSegment {
    alpha: f64,
    gamma: f64,
    g0: f64,
    /// `∫₀^{t0} γg` when `T` is pending, else the frozen `E(ν)`.
    cum0: f64,
    pending: bool,
}

struct Segment {
    t0: f64,
    debtors: Vec<DebtorSegment>,
    nodes: Vec<NodeCoeffs>,
}

impl Segment {
    fn build(model: &Model, ladder: &Ladder, f_path: &FPath, t0: f64, form: DriftForm) -> Self {
        let n = model.n();
        let t_times = &f_path.t_times;
        let pending: DebtorSet = (0..n).filter(|&k| t_times[k] > t0).collect();
        let occurred = pending.complement(n);
        let debtors = (0..n)
            .map(|k| {
                let is_pending = pending.contains(k);
                DebtorSegment {
                    alpha: model.alpha(k).value_at(t0),
                    gamma: model.gamma(k).value_at(t0),
                    g0: model.g(k, t0),
                    cum0: if is_pending {
                        model.gamma_g_integral(k, t0)
                    } else {
                        model.nu_exponential(k, t0, t_times[k])
                    },
                    pending: is_pending,
                }
            })
            .collect();
        let phi_b_from_pending = |j: usize| -> f64 {
            pending.iter().map(|i| model.phi_b(i, j).value_at(t0)).sum()
        };
        let nodes = ladder
            .nodes()
            .iter()
            .enumerate()
            .map(|(m, nd)| {
                let alpha_c: f64 = nd.c.iter().map(|i| model.alpha(i).value_at(t0)).sum();
                let mut psi_total = 0.0;
                let mut down = Vec::new();
                let mut up = Vec::new();
                for e in ladder.edges(m) {
                    let psi = model.psi_a(nd.c, nd.d, e.j, t0, t_times);
                    psi_total += psi;
                    let (coef, nu) = match form {
                        DriftForm::Projected => (psi, model.is_systemic(e.j).then_some(e.j)),
                        DriftForm::Uncompensated => (psi, None),
                        DriftForm::PrintedSigns => (-psi, None),
                    };
                    if coef != 0.0 {
                        down.push((e.down, coef, nu));
                    }
                    if let Some(u) = e.up {
                        if occurred.contains(e.j) {
                            let c = model.p0(e.j) * (psi - phi_b_from_pending(e.j));
                            if c != 0.0 {
                                up.push((u, c));
                            }
                        }
                    }
                }
                let d_noise: f64 = nd.d.intersection(occurred).iter().map(phi_b_from_pending).sum();
                let diag = match form {
                    DriftForm::PrintedSigns => -alpha_c + psi_total - d_noise,
                    _ => -alpha_c - psi_total - d_noise,
                };
                NodeCoeffs {
                    diag,
                    g_decay: nd.c.intersection(pending),
                    down,
                    up,
                }
            })
            .collect();
        Segment {
            t0,
            debtors,
            nodes,
        }
    }

    /// `γg` and `E(ν)` of every debtor at `t` in this segment.
    fn debtor_state(&self, t: f64, gg: &mut [f64], nu: &mut [f64]) {
        let dt = t - self.t0;
        for (k, d) in self.debtors.iter().enumerate() {
            if d.pending {
                if d.g0 == 0.0 {
                    gg[k] = 0.0;
                    nu[k] = 1.0;
                } else {
                    gg[k] = d.gamma * d.g0 * (d.alpha * dt).exp();
                    let cum = d.cum0 + d.gamma * d.g0 * crate::model::exp_growth_integral(d.alpha, dt);
                    nu[k] = cum.exp();
                }
            } else {
                gg[k] = 0.0;
                nu[k] = d.cum0;
            }
        }
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64], gg: &mut [f64], nu: &mut [f64]) {
        self.debtor_state(t, gg, nu);
        for (m, nc) in self.nodes.iter().enumerate() {
            let decay: f64 = nc.g_decay.iter().map(|i| gg[i]).sum();
            let mut acc = (nc.diag - decay) * y[m];
            for &(idx, c, j) in &nc.down {
                acc += c * y[idx] * j.map_or(1.0, |j| nu[j]);
            }
            for &(idx, c) in &nc.up {
                acc += c * y[idx];
            }
            dy[m] = acc;
        }
    }
}

/// Drift coefficients of every node at `t`, for inspection and tests.
pub fn drift_terms(
    model: &Model,
    ladder: &Ladder,
    f_path: &FPath,
    t: f64,
    form: DriftForm,
) -> Vec<DriftTerms> {
    let seg = Segment::build(model, ladder, f_path, t, form);
    let n = model.n();
    let mut gg = vec![0.0; n];
    let mut nu = vec![0.0; n];
    seg.debtor_state(t, &mut gg, &mut nu);
    let j_of = |m: usize, idx: usize, up: bool| -> usize {
        ladder
            .edges(m)
            .iter()
            .find(|e| if up { e.up == Some(idx) } else { e.down == idx })
            .map(|e| e.j)
            .expect("coefficient refers to an edge")
    };
    seg.nodes
        .iter()
        .enumerate()
        .map(|(m, nc)| DriftTerms {
            diag: nc.diag - nc.g_decay.iter().map(|i| gg[i]).sum::<f64>(),
            down: nc
                .down
                .iter()
                .map(|&(idx, c, j)| (j_of(m, idx, false), c * j.map_or(1.0, |j| nu[j])))
                .collect(),
            up: nc.up.iter().map(|&(idx, c)| (j_of(m, idx, true), c)).collect(),
        })
        .collect()
}

/// Applies the jumps of every node at `T(k)`, using pre-jump values.
fn apply_jump(model: &Model, ladder: &Ladder, f_path: &FPath, k: usize, y: &mut [f64]) {
    let t = f_path.t(k);
    let gamma_k = model.gamma(k).value_at(t);
    let before = y.to_vec();
    for (m, nd) in ladder.nodes().iter().enumerate() {
        let mut kk = 0.0;
        for j in nd.d.iter().filter(|&j| f_path.t(j) < t) {
            kk += model.phi_b(k, j).value_at(t) * before[m];
        }
        for e in ladder.edges(m) {
            if let Some(u) = e.up {
                if f_path.t(e.j) < t {
                    kk += model.phi_b(k, e.j).value_at(t) * model.p0(e.j) * before[u];
                }
            }
        }
        y[m] += kk / gamma_k;
    }
}

/// Integrates every node of `ladder` along `f_path`, reporting values at
/// each time of the nondecreasing `t_grid`.
pub fn integrate_ladder(
    model: &Model,
    ladder: &Ladder,
    f_path: &FPath,
    t_grid: &[f64],
    opts: &SolverOptions,
) -> Result<LadderValues, SolverError> {
    let horizon = model.horizon();
    if t_grid.windows(2).any(|w| w[1] < w[0])
        || t_grid.iter().any(|&t| !(0.0..=horizon).contains(&t))
    {
        return Err(SolverError::BadGrid { horizon });
    }
    let t_end = t_grid.last().copied().unwrap_or(0.0);
    let n = model.n();
    let dim = ladder.len();

    // segment boundaries: coefficient breakpoints, T-events and grid times
    let mut cuts: Vec<f64> = model.stops().iter().copied().filter(|&s| s < t_end).collect();
    cuts.extend((0..n).map(|k| f_path.t(k)).filter(|&t| t <= t_end));
    cuts.extend_from_slice(t_grid);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut y = vec![1.0; dim];
    let mut out = Vec::with_capacity(t_grid.len());
    let mut dp = Dp54::new(
        dim,
        StepControl {
            atol: opts.tol,
            rtol: opts.tol,
            max_step: opts.max_step,
        },
    );
    let mut gg = vec![0.0; n];
    let mut nu = vec![0.0; n];
    let mut grid_idx = 0;
    let mut t = 0.0;
    let tol_neg = opts.tol_neg;
    let check = |t: f64, y: &[f64]| -> Result<(), SolverError> {
        match y.iter().position(|&v| v < -tol_neg) {
            Some(node) => Err(SolverError::NegativeValue {
                node,
                value: y[node],
                t,
            }),
            None => Ok(()),
        }
    };
    for cut in cuts {
        if cut > t {
            let seg = Segment::build(model, ladder, f_path, t, opts.form);
            dp.integrate(
                |s, y, dy| seg.rhs(s, y, dy, &mut gg, &mut nu),
                t,
                cut,
                &mut y,
                check,
            )?;
            t = cut;
        }
        // jumps at T(k) = cut, in debtor order, before recording the grid
        for k in (0..n).filter(|&k| f_path.t(k) == cut) {
            apply_jump(model, ladder, f_path, k, &mut y);
            check(cut, &y)?;
        }
        while grid_idx < t_grid.len() && t_grid[grid_idx] == cut {
            out.push(y.clone());
            grid_idx += 1;
        }
    }
    // grid times at 0 when nothing was integrated
    while grid_idx < t_grid.len() {
        out.push(y.clone());
        grid_idx += 1;
    }
    Ok(LadderValues {
        grid: t_grid.to_vec(),
        values: out,
    })
}

/// Debug view of a ladder and one path's values.
#[derive(Debug, Serialize)]
pub struct LadderDump {
    pub nodes: Vec<NodeDump>,
    pub grid: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct NodeDump {
    pub s: u32,
    pub d: u32,
    pub c: u32,
    /// `(j, down node, up node)`.
    pub edges: Vec<(usize, usize, Option<usize>)>,
    pub values: Vec<f64>,
}

pub fn ladder_dump(ladder: &Ladder, values: &LadderValues) -> LadderDump {
    LadderDump {
        nodes: ladder
            .nodes()
            .iter()
            .enumerate()
            .map(|(m, nd)| NodeDump {
                s: nd.s.mask(),
                d: nd.d.mask(),
                c: nd.c.mask(),
                edges: ladder.edges(m).iter().map(|e| (e.j, e.down, e.up)).collect(),
                values: values.values.iter().map(|v| v[m]).collect(),
            })
            .collect(),
        grid: values.grid.clone(),
    }
}
