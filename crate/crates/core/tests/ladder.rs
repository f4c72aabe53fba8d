mod common;

use common::*;
use overspill::ladder::*;
use overspill::oracles::markov_joint_survival;
use overspill::sim::*;
use overspill::{validate_spec, DebtorSet, EstimateCI, Model, ModelSpec, SolverError};
use proptest::prelude::*;

fn no_events(n: usize) -> FPath {
    FPath::new(vec![f64::INFINITY; n])
}

#[test]
fn no_contagion_is_exponential_decay() {
    let m = validate_spec(ModelSpec::uniform(3, 1.0, 0.1, 0.5).with_alpha(
        1,
        overspill::PiecewiseConstant::new(vec![0.0, 0.4], vec![0.2, 0.05]).unwrap(),
    ))
    .unwrap();
    let c = DebtorSet::from_mask(0b011);
    let l = build_ladder(&m, c);
    let v = integrate_ladder(&m, &l, &no_events(3), &[0.3, 1.0], &SolverOptions::default()).unwrap();
    let top = l.top(DebtorSet::EMPTY).unwrap();
    for (g, t) in [0.3, 1.0].into_iter().enumerate() {
        let expect = (-(m.alpha(0).integral(t) + m.alpha(1).integral(t))).exp();
        assert!((v.at(g, top) - expect).abs() < 1e-9);
    }
}

#[test]
fn one_way_contagion_value() {
    let m = one_way();
    let e = survival_via_theorem(&m, DebtorSet::singleton(1), 1.0, 10, 0).unwrap();
    assert_eq!(e.std_error, 0.0);
    assert!((e.mean - one_way_closed_form()).abs() < 1e-8);
    assert!((e.mean - 0.89293).abs() < 1e-5);
}

#[test]
fn single_name_theorem_estimate() {
    let m = single_name();
    let oracle = single_name_quadrature(STD_ALPHA, STD_GAMMA, STD_P0, 1.0);
    let e = survival_via_theorem(&m, m.all(), 1.0, 100_000, 13).unwrap();
    assert!(within((e.mean, e.std_error), (oracle, 0.0), 3.0), "{e:?} vs {oracle}");
}

#[test]
fn projected_form_is_unbiased_and_uncompensated_is_not() {
    let m = bias_model();
    let oracle = bias_oracle(1.0);
    let c = DebtorSet::singleton(0);
    let run = |form| {
        survival_via_theorem_with(&m, c, 1.0, 100_000, 19, &SolverOptions::default().form(form)).unwrap()
    };
    let projected = run(DriftForm::Projected);
    assert!(within((projected.mean, projected.std_error), (oracle, 0.0), 3.0), "{projected:?} vs {oracle}");
    let plain = run(DriftForm::Uncompensated);
    assert!((plain.mean - oracle).abs() > 10.0 * plain.std_error, "{plain:?} vs {oracle}");
}

#[test]
fn joint_b_edge_cases() {
    let m = four_debtors();
    let c = DebtorSet::singleton(0);
    assert_eq!(
        joint_b_default_via_theorem(&m, c, DebtorSet::singleton(1), 1.0, 10, 1),
        Err(SolverError::InvalidD { debtor: 1 })
    );
    let a = survival_via_theorem(&m, c, 1.0, 2_000, 4).unwrap();
    let b = joint_b_default_via_theorem(&m, c, DebtorSet::EMPTY, 1.0, 2_000, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn joint_b_matches_direct_simulation() {
    let spec = ModelSpec::uniform(2, 1.0, 0.2, 0.8)
        .with_p0(0, 0.2)
        .with_p0(1, 0.3)
        .with_phi_a(0, 1, 0.4)
        .with_phi_b(0, 1, 0.6)
        .with_phi_b(1, 0, 0.3);
    let m = validate_spec(spec).unwrap();
    let (c, d) = (DebtorSet::singleton(0), DebtorSet::singleton(1));
    let th = joint_b_default_via_theorem(&m, c, d, 1.0, 100_000, 2).unwrap();
    let mc = estimate_probability(&m, Law::Contagion(m.all()), &JointB { c, d, t: 1.0 }, 100_000, 3);
    assert!(within((th.mean, th.std_error), (mc.mean, mc.std_error), 3.0), "{th:?} vs {mc:?}");
}

#[test]
fn shared_paths_agree_with_single_queries() {
    let m = four_debtors();
    let c = DebtorSet::singleton(1);
    let queries = [
        LadderQuery::survival(0.5),
        LadderQuery::survival(1.0),
        LadderQuery { d: DebtorSet::singleton(2), t: 1.0 },
    ];
    let opts = SolverOptions::default();
    let all = ladder_estimates(&m, c, &queries, 500, 8, &opts).unwrap();
    for (q, e) in queries.iter().zip(&all) {
        let one = ladder_estimates(&m, c, &[*q], 500, 8, &opts).unwrap()[0];
        // other grids change the adaptive steps, not the paths
        assert!((one.mean - e.mean).abs() < 1e-7);
    }
}

#[test]
fn halving_the_step_changes_values_below_tolerance() {
    let m = four_debtors();
    let tol = 1e-8;
    for c in [DebtorSet::singleton(0), DebtorSet::from_mask(0b1100)] {
        let l = build_ladder(&m, c);
        let top = l.top(DebtorSet::EMPTY).unwrap();
        for p in 0..20 {
            let f = simulate_fbar_path(&m, c, PathSeed::new(77, p));
            let run = |h: f64| {
                let opts = SolverOptions::with_tol(tol).max_step(h);
                integrate_ladder(&m, &l, &f, &[1.0], &opts).unwrap().at(0, top)
            };
            let (a, b) = (run(0.05), run(0.025));
            assert!((a - b).abs() < tol, "path {p}: {a} vs {b}");
        }
    }
}

#[test]
fn values_start_at_one_and_stay_nonnegative() {
    let m = four_debtors();
    let opts = SolverOptions::default();
    for c in [DebtorSet::singleton(3), DebtorSet::from_mask(0b0011)] {
        let l = build_ladder(&m, c);
        for p in 0..50 {
            let f = simulate_fbar_path(&m, c, PathSeed::new(5, p));
            let v = integrate_ladder(&m, &l, &f, &[0.0, 0.5, 1.0], &opts).unwrap();
            assert!(v.values[0].iter().all(|&x| x == 1.0));
            assert!(v.values.iter().flatten().all(|&x| x >= -opts.tol_neg));
        }
    }
}

#[test]
fn bad_grids_are_rejected() {
    let m = four_debtors();
    let l = build_ladder(&m, DebtorSet::singleton(0));
    let opts = SolverOptions::default();
    for grid in [vec![0.5, 0.2], vec![1.5], vec![-0.1]] {
        assert!(matches!(
            integrate_ladder(&m, &l, &no_events(4), &grid, &opts),
            Err(SolverError::BadGrid { .. })
        ));
    }
}

/// Reference drift of the deterministic subset system with
/// `p0 ≡ 0`: `−ℓ^S (λ(C) + φᴬ(C,S)) + Σ_j ℓ^{S−j} φᴬ(C,j)`.
fn subset_drift(m: &Model, s: DebtorSet, t: f64) -> (f64, Vec<(usize, f64)>) {
    let c = s.complement(m.n());
    let phi = |j: usize| -> f64 { c.iter().map(|i| m.phi_a(i, j).value_at(t)).sum() };
    let lambda: f64 = c.iter().map(|i| m.alpha(i).value_at(t)).sum();
    let diag = -(lambda + s.iter().map(phi).sum::<f64>());
    (diag, s.iter().map(|j| (j, phi(j))).filter(|&(_, v)| v != 0.0).collect())
}

#[test]
fn drift_reduces_to_subset_system_without_systemic_debtors() {
    let spec = ModelSpec::uniform(4, 1.0, 0.1, 0.5)
        .with_phi_a(0, 1, 0.3)
        .with_phi_a(2, 1, 0.2)
        .with_phi_a(1, 3, 0.25)
        .with_phi_a(0, 3, 0.1)
        .with_phi_b(2, 3, 0.7);
    let m = validate_spec(spec).unwrap();
    for c in m.all().subsets() {
        let l = build_ladder(&m, c);
        let terms = drift_terms(&m, &l, &no_events(4), 0.4, DriftForm::Projected);
        for (node, got) in l.nodes().iter().zip(terms) {
            let (diag, down) = subset_drift(&m, node.s, 0.4);
            assert_eq!(got.diag, diag, "{:?}", node);
            assert_eq!(got.down, down, "{:?}", node);
            assert!(got.up.is_empty());
        }
    }
}

#[test]
fn without_direct_contagion_only_decay_and_indirect_terms_remain() {
    let spec = ModelSpec::uniform(3, 1.0, 0.1, 0.5)
        .with_p0(1, 0.3)
        .with_p0(2, 0.2)
        .with_phi_b(0, 1, 0.6)
        .with_phi_b(0, 2, 0.4)
        .with_phi_b(1, 2, 0.5);
    let m = validate_spec(spec).unwrap();
    let c = DebtorSet::singleton(0);
    let l = build_ladder(&m, c);
    // T(2) has occurred, T(0) and T(1) pending
    let f = FPath::new(vec![f64::INFINITY, f64::INFINITY, 0.2]);
    let terms = drift_terms(&m, &l, &f, 0.5, DriftForm::Projected);
    for (node, got) in l.nodes().iter().zip(terms) {
        assert!(got.down.iter().all(|&(_, v)| v == 0.0) || got.down.is_empty());
        let decay: f64 = node
            .c
            .iter()
            .map(|i| {
                let pending = if i == 2 { 0.0 } else { 1.0 };
                m.alpha(i).value_at(0.5) + pending * m.g(i, 0.5) * m.gamma(i).value_at(0.5)
            })
            .sum();
        // φᴮ(i, 2) from pending i ∈ {0, 1} when 2 ∈ D
        let noise: f64 = if node.d.contains(2) { 0.4 + 0.5 } else { 0.0 };
        assert!((got.diag + decay + noise).abs() < 1e-14, "{node:?}: {}", got.diag);
        for &(j, v) in &got.up {
            assert_eq!(j, 2);
            assert!((v - (-0.2 * (0.4 + 0.5))).abs() < 1e-14);
        }
    }
}

/// `L` and `ℓ` along the same default-adjusted paths.
fn paired_samples(
    m: &Model,
    c: DebtorSet,
    j: usize,
    t: f64,
    paths: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let l = build_ladder(m, c);
    let s = c.complement(m.n());
    let top = l.top(DebtorSet::EMPTY).unwrap();
    let up = l.find(s, DebtorSet::singleton(j)).unwrap();
    let down = l.find(s.remove(j), DebtorSet::EMPTY).unwrap();
    let opts = SolverOptions::default();
    collect_paths(paths, |p| {
        let path = simulate_fbar_system_path(m, c, PathSeed::new(seed, p));
        let f = path.f_path();
        let v = integrate_ladder(m, &l, &f, &[t], &opts).unwrap();
        let big_l = l_pathwise(m, c, DebtorSet::EMPTY, &path, t);
        let t_j = f.t(j);
        let b_hit = if path.tau_b(j) < t { 1.0 } else { 0.0 };
        let a_hit = if path.tau_a(j) < t { 1.0 } else { 0.0 };
        let p_j = if t_j < t { m.p0(j) * v.at(0, up) } else { 0.0 };
        let nu = m.nu_exponential(j, t, t_j);
        vec![
            big_l - v.at(0, top),
            big_l * b_hit - p_j,
            big_l * a_hit - (v.at(0, top) - v.at(0, down) * nu - p_j),
        ]
    })
}

#[test]
fn pathwise_product_projects_onto_ladder_values() {
    let m = four_debtors();
    for (c, j) in [(DebtorSet::singleton(0), 2), (DebtorSet::from_mask(0b0011), 3)] {
        let rows = paired_samples(&m, c, j, 1.0, 100_000, 62);
        let names = ["L − ℓ", "B-channel", "A-channel"];
        for (e, name) in estimates_from_rows(&rows, 3).into_iter().zip(names) {
            assert!(e.mean.abs() <= 3.0 * e.std_error, "{c} j={j} {name}: {e:?}");
        }
    }
}

#[test]
fn pathwise_product_mean_matches_survival() {
    let m = four_debtors();
    let c = DebtorSet::from_mask(0b0101);
    let ls: Vec<f64> = collect_paths(100_000, |p| {
        l_pathwise(&m, c, DebtorSet::EMPTY, &simulate_fbar_system_path(&m, c, PathSeed::new(3, p)), 1.0)
    });
    let l = EstimateCI::from_samples(&ls);
    let th = survival_via_theorem(&m, c, 1.0, 100_000, 4).unwrap();
    assert!(within((l.mean, l.std_error), (th.mean, th.std_error), 3.0), "{l:?} vs {th:?}");
}

#[test]
fn pathwise_product_trivial_cases() {
    let m = four_debtors();
    let c = DebtorSet::singleton(1);
    let path = simulate_fbar_system_path(&m, c, PathSeed::new(1, 1));
    assert_eq!(l_pathwise(&m, c, DebtorSet::EMPTY, &path, 0.0), 1.0);

    let plain = validate_spec(ModelSpec::uniform(3, 1.0, 0.2, 0.6).with_p0(0, 0.3)).unwrap();
    let c = DebtorSet::from_mask(0b011);
    for p in 0..20 {
        let path = simulate_fbar_system_path(&plain, c, PathSeed::new(2, p));
        let expect: f64 = c
            .iter()
            .map(|i| (-(plain.alpha(i).integral(1.0) + plain.gamma_g_integral(i, path.t_time(i).min(1.0)))).exp())
            .product();
        let got = l_pathwise(&plain, c, DebtorSet::EMPTY, &path, 1.0);
        assert!((got - expect).abs() < 1e-12);
    }
}

#[test]
fn ladder_dump_lists_nodes_and_edges() {
    let m = validate_spec(ModelSpec::uniform(2, 1.0, 0.1, 0.5).with_p0(1, 0.2)).unwrap();
    let l = build_ladder(&m, DebtorSet::singleton(0));
    let v = integrate_ladder(&m, &l, &no_events(2), &[0.0, 1.0], &SolverOptions::default()).unwrap();
    let json = serde_json::to_value(ladder_dump(&l, &v)).unwrap();
    let nodes = json["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(nodes[2]["s"], 2);
    assert_eq!(nodes[2]["edges"][0], serde_json::json!([1, 0, 1]));
    assert_eq!(nodes[0]["values"].as_array().unwrap().len(), 2);
}

#[test]
fn equation_counts_exhaustive() {
    for n in 1..=6 {
        for sys in 0u32..1 << n {
            let mut spec = ModelSpec::uniform(n, 1.0, 0.1, 0.5);
            for k in 0..n {
                if sys >> k & 1 == 1 {
                    spec.p0[k] = 0.1;
                }
            }
            let m = validate_spec(spec).unwrap();
            for c in m.all().subsets() {
                let free = c.complement(n);
                let b = free.intersection(m.systemic()).len();
                let l = build_ladder(&m, c);
                assert_eq!(l.len() as u64, count_equations(free.len(), b));
                assert!(l.nodes().iter().all(|nd| nd.d.is_subset(m.systemic())));
            }
        }
    }
}

fn random_direct_model(n: usize, rates: Vec<f64>, phis: Vec<f64>) -> Model {
    let mut spec = ModelSpec::uniform(n, 2.0, 0.1, 0.5);
    for k in 0..n {
        spec = spec.with_alpha(k, overspill::PiecewiseConstant::constant(rates[k]));
        for j in 0..n {
            if j != k {
                spec = spec.with_phi_a(k, j, phis[k * n + j]);
            }
        }
    }
    validate_spec(spec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deterministic_ladder_matches_markov_chain(
        n in 1usize..=3,
        rates in prop::collection::vec(0.01f64..0.5, 3),
        phis in prop::collection::vec(0.0f64..0.5, 9),
        mask in 1u32..8,
        t in 0.1f64..2.0,
    ) {
        let m = random_direct_model(n, rates, phis);
        let c = DebtorSet::from_mask(mask).intersection(m.all());
        let e = survival_via_theorem(&m, c, t, 1, 0).unwrap();
        let chain = markov_joint_survival(&m, c, t).unwrap();
        prop_assert!((e.mean - chain).abs() < 1e-6, "{} vs {}", e.mean, chain);
    }

    #[test]
    fn ladder_values_are_bounded_probabilities(seed in 0u64..1000, mask in 1u32..16) {
        let m = four_debtors();
        let c = DebtorSet::from_mask(mask);
        let l = build_ladder(&m, c);
        let f = simulate_fbar_path(&m, c, PathSeed::new(seed, 0));
        let v = integrate_ladder(&m, &l, &f, &[0.25, 0.5, 1.0], &SolverOptions::default()).unwrap();
        for x in v.values.iter().flatten() {
            prop_assert!(*x >= -1e-7);
        }
    }
}
