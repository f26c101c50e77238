mod common;

use gmdtsp::bnc::{solve, Config, Status};
use gmdtsp::instance::Instance;
use gmdtsp::oracle;

fn points(depots: &[(i64, i64)], targets: &[(i64, i64)], clusters: Vec<Vec<usize>>) -> Instance {
    let all: Vec<(i64, i64)> = depots.iter().chain(targets).copied().collect();
    let k = depots.len();
    Instance::new("pts", (1..=k).collect(), (k + 1..=all.len()).collect(), clusters, |u, v| {
        gmdtsp::instance::euc_2d(
            (all[u].0 as f64, all[u].1 as f64),
            (all[v].0 as f64, all[v].1 as f64),
        )
    })
    .unwrap()
}

#[test]
fn islands_force_subtour_cuts_and_raise_the_bound() {
    // two tight triangles far from both depots, one per cluster
    let inst = points(
        &[(0, 0), (0, 10)],
        &[(100, 0), (103, 0), (100, 3), (100, 50), (103, 50), (100, 53)],
        vec![vec![0, 1, 2], vec![3, 4, 5]],
    );
    let out = solve(&inst, &Config::default());
    let s = &out.stats;
    assert!(s.base_fractional);
    assert!(s.sec1 + s.sec2 >= 1);
    assert!(s.root_lb > s.base_lp + 1.0);
    assert_eq!(out.status, Status::Optimal);
    assert_eq!(out.solution.unwrap().cost, oracle::optimal_cost(&inst).unwrap());
}

#[test]
fn bound_sanity_on_oracle_instances() {
    for seed in 0..40 {
        let inst = common::random_instance(700 + seed, 4 + (seed % 5) as usize, 2 + (seed % 3) as usize, 2 + (seed % 2) as usize, common::Costs::Euclid);
        let opt = oracle::optimal_cost(&inst).unwrap() as f64;
        let out = solve(&inst, &Config::default());
        let s = &out.stats;
        assert!(s.nodes >= 1);
        assert!(s.base_lp <= s.root_lb + 1e-7);
        assert!(s.root_lb <= opt + 1e-6, "{}: root {} opt {opt}", inst.name(), s.root_lb);
        assert!(s.lower_bound <= opt + 1e-6);
        assert!(opt <= s.heuristic_ub.unwrap() as f64);
        assert_eq!(s.best_ub.map(|u| u as f64), Some(opt));
    }
}

#[test]
fn all_families_flag_keeps_optimality() {
    for seed in 0..15 {
        let inst = common::random_instance(800 + seed, 6 + (seed % 4) as usize, 3, 3, common::Costs::Matrix);
        let cfg = Config { all_families: true, ..Config::default() };
        let out = solve(&inst, &cfg);
        assert_eq!(out.status, Status::Optimal);
        assert_eq!(out.solution.unwrap().cost, oracle::optimal_cost(&inst).unwrap());
    }
}

#[test]
fn disabled_families_still_solve_exactly() {
    // lazy cuts alone keep the search exact
    let cfg = Config { sec: false, pec: false, comb: false, tcomb: false, ..Config::default() };
    for seed in 0..10 {
        let inst = common::random_instance(900 + seed, 5 + (seed % 3) as usize, 2, 2, common::Costs::Euclid);
        let out = solve(&inst, &cfg);
        assert_eq!(out.status, Status::Optimal);
        assert_eq!(out.solution.unwrap().cost, oracle::optimal_cost(&inst).unwrap());
    }
}

#[test]
fn time_limit_reports_a_valid_bound() {
    let inst = common::random_instance(31, 9, 3, 2, common::Costs::Matrix);
    let out = solve(&inst, &Config { time_limit: 0.0, ..Config::default() });
    let opt = oracle::optimal_cost(&inst).unwrap() as f64;
    assert_eq!(out.stats.nodes, 1);
    assert!(out.stats.lower_bound <= opt + 1e-6);
    if out.status == Status::TimeLimit {
        assert!(out.stats.root_lb <= opt + 1e-6);
    }
}
