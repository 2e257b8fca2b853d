mod common;

use common::*;
use rand::Rng;
use relaylp::lp::{solve_lp, solve_milp, LpProblem, RowSpec, SolveStatus, SolverOptions};

fn sized_instance(rng: &mut impl Rng) -> LpProblem {
    loop {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=12);
        if binomial(m + 2 * n, n) <= 400_000 {
            return random_boxed_lp(rng, n, m);
        }
    }
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = rng(11);
    let opts = SolverOptions::default();
    let (mut feasible, mut infeasible) = (0, 0);
    for case in 0..200 {
        let p = sized_instance(&mut rng);
        let oracle = vertex_enumeration_min(&p);
        let s = solve_lp(&p, &opts).unwrap();
        match oracle {
            Some(v) => {
                feasible += 1;
                assert_eq!(s.status, SolveStatus::Optimal, "case {case}");
                assert!((s.objective_value - v).abs() <= 1e-6, "case {case}: {} vs {v}", s.objective_value);
                assert!(p.max_violation(&s.x) <= 1e-7, "case {case}");
                let recomputed = p.objective_at(&s.x);
                assert!((recomputed - s.objective_value).abs() <= 1e-9 * (1.0 + recomputed.abs()));
            }
            None => {
                infeasible += 1;
                assert_eq!(s.status, SolveStatus::Infeasible, "case {case}");
            }
        }
    }
    assert!(feasible > 50 && infeasible > 5, "{feasible} feasible / {infeasible} infeasible");
}

#[test]
fn milp_matches_enumeration() {
    let mut rng = rng(12);
    let opts = SolverOptions::default();
    for case in 0..80 {
        let k = rng.random_range(1..=10);
        let c = rng.random_range(0..=2);
        let m = rng.random_range(1..=6);
        let mut p = random_boxed_lp(&mut rng, k + c, m);
        for j in 0..k {
            p.set_bounds(j, 0.0, 1.0);
            p.set_integer(j, true);
        }
        let oracle = milp_enumeration_min(&p);
        let s = solve_milp(&p, &opts).unwrap();
        match oracle {
            Some(v) => {
                assert_eq!(s.status(), SolveStatus::Optimal, "case {case}");
                assert!((s.objective_value() - v).abs() <= 1e-6, "case {case}");
                for j in 0..k {
                    let xj = s.x()[j];
                    assert!((xj - xj.round()).abs() <= 1e-6);
                }
                let relax = solve_lp(&p, &opts).unwrap();
                assert!(s.objective_value() >= relax.objective_value - 1e-9);
            }
            None => assert_eq!(s.status(), SolveStatus::Infeasible, "case {case}"),
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let p = random_boxed_lp(&mut rng, 6, 8);
        let a = solve_lp(&p, &SolverOptions::default()).unwrap();
        let b = solve_lp(&p.clone(), &SolverOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn appended_cut_never_lowers_optimum() {
    let mut rng = rng(14);
    let opts = SolverOptions::default();
    for _ in 0..50 {
        let p = random_boxed_lp(&mut rng, 5, 4);
        let base = solve_lp(&p, &opts).unwrap();
        if base.status != SolveStatus::Optimal {
            continue;
        }
        let cut: Vec<(usize, f64)> = (0..5).map(|j| (j, rng.random_range(-2..=2) as f64)).collect();
        let q = p.append_rows([RowSpec::le(cut, rng.random_range(-2..=4) as f64)]).unwrap();
        let after = solve_lp(&q, &opts).unwrap();
        if after.status == SolveStatus::Optimal {
            assert!(after.objective_value >= base.objective_value - 1e-9);
        } else {
            assert_eq!(after.status, SolveStatus::Infeasible);
        }
    }
}
