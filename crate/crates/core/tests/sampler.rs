mod common;

use common::*;
use overspill::sim::*;
use overspill::{DebtorSet, EstimateCI};

const PATHS: usize = 100_000;

#[test]
fn quadrature_matches_closed_form() {
    let closed = (-0.1f64).exp() * (1.0 - 0.1 * ((-0.4f64).exp() - 1.0) / -0.4);
    let q = single_name_quadrature(STD_ALPHA, STD_GAMMA, STD_P0, 1.0);
    assert!((q - closed).abs() < 1e-10);
    assert!((q - 0.83026).abs() < 1e-5);
}

#[test]
fn baseline_single_name_survival() {
    let m = single_name();
    let oracle = single_name_quadrature(STD_ALPHA, STD_GAMMA, STD_P0, 1.0);
    let e = estimate_probability(&m, Law::P0, &Survival { c: m.all(), t: 1.0 }, PATHS, 11);
    assert!(within((e.mean, e.std_error), (oracle, 0.0), 3.0), "{e:?} vs {oracle}");
}

#[test]
fn thinned_environment_law() {
    let m = single_name();
    let oracle = thinned_no_event_quadrature(STD_ALPHA, STD_GAMMA, STD_P0, 1.0);
    assert!((oracle - 0.67379).abs() < 1e-5);
    let hits: Vec<f64> = collect_paths(PATHS, |p| {
        let f = simulate_fbar_path(&m, m.all(), PathSeed::new(5, p));
        if f.t(0) > 1.0 { 1.0 } else { 0.0 }
    });
    let e = EstimateCI::from_samples(&hits);
    assert!(within((e.mean, e.std_error), (oracle, 0.0), 3.0), "{e:?} vs {oracle}");
}

#[test]
fn baseline_martingales_have_zero_mean() {
    let m = four_debtors();
    let rows: Vec<Vec<f64>> = collect_paths(50_000, |p| {
        let path = simulate_p0_path(&m, PathSeed::new(3, p));
        let f = path.f_path();
        (0..4)
            .flat_map(|k| [a_martingale(&m, &path, k, 1.0), t_martingale(&m, &f, k, 1.0)])
            .collect()
    });
    for (i, e) in estimates_from_rows(&rows, 8).into_iter().enumerate() {
        assert!(e.mean.abs() <= 3.0 * e.std_error, "column {i}: {e:?}");
    }
}

#[test]
fn empty_contagious_set_reproduces_baseline_paths() {
    let m = four_debtors();
    for p in 0..2_000 {
        let seed = PathSeed::new(17, p);
        let a = simulate_p0_path(&m, seed);
        let b = simulate_contagion_path(&m, DebtorSet::EMPTY, seed);
        for k in 0..4 {
            for (x, y) in [(a.tau_a(k), b.tau_a(k)), (a.tau_b(k), b.tau_b(k)), (a.t_time(k), b.t_time(k))] {
                assert!(x == y || (x - y).abs() < 1e-9, "path {p}, debtor {k}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn default_mark_at_environment_event_is_untilted() {
    // a debtor alive at T(k) defaults there with probability g(T(k)) under
    // every contagion law
    let m = four_debtors();
    for contagious in [DebtorSet::EMPTY, m.all()] {
        let rows: Vec<Vec<f64>> = collect_paths(PATHS, |p| {
            let path = simulate_contagion_path(&m, contagious, PathSeed::new(23, p));
            [2, 3]
                .iter()
                .map(|&k| {
                    let t = path.t_time(k);
                    if t <= 1.0 && path.tau_a(k) > t {
                        let hit = if path.tau_b(k) == t { 1.0 } else { 0.0 };
                        hit - m.g(k, t)
                    } else {
                        0.0
                    }
                })
                .collect()
        });
        for e in estimates_from_rows(&rows, 2) {
            assert!(e.mean.abs() <= 3.0 * e.std_error, "{contagious}: {e:?}");
        }
    }
}

#[test]
fn densities_have_unit_mean() {
    let m = four_debtors();
    let rows: Vec<Vec<f64>> = collect_paths(PATHS, |p| {
        let path = simulate_p0_path(&m, PathSeed::new(29, p));
        vec![
            girsanov_weight(&m, m.all(), &path, 1.0),
            pbar_weight(&m, m.all(), &path.f_path(), 1.0),
        ]
    });
    for e in estimates_from_rows(&rows, 2) {
        assert!((e.mean - 1.0).abs() <= 3.0 * e.std_error, "{e:?}");
    }
}

#[test]
fn weighted_baseline_matches_direct_contagion() {
    let m = four_debtors();
    let c = DebtorSet::from_mask(0b0110);
    let events = [
        JointB { c: DebtorSet::singleton(0), d: DebtorSet::singleton(3), t: 1.0 },
        JointB { c: DebtorSet::from_mask(0b0011), d: DebtorSet::singleton(2), t: 0.5 },
    ];
    for e in &events {
        let w = estimate_probability(&m, Law::WeightedP0(c), e, PATHS, 31);
        let d = estimate_probability(&m, Law::Contagion(c), e, PATHS, 37);
        assert!(within((w.mean, w.std_error), (d.mean, d.std_error), 3.0), "{w:?} vs {d:?}");
    }
}

#[test]
fn path_dump_is_reproducible() {
    let m = four_debtors();
    let dump = |seed| {
        let paths: Vec<_> = (0..50).map(|p| simulate_contagion_path(&m, m.all(), PathSeed::new(seed, p))).collect();
        let mut out = Vec::new();
        write_paths_csv(&mut out, paths.iter().enumerate().map(|(i, p)| (i as u64, p))).unwrap();
        String::from_utf8(out).unwrap()
    };
    let a = dump(41);
    assert_eq!(a, dump(41));
    assert_ne!(a, dump(42));
    assert!(a.starts_with("path_id,time,event_kind,debtor,defaulted\n"));
}
