mod common;

use common::*;
use dnfrule::colgen::{enumerate_columns, price, train, ColgenError, ColumnPool, Duals, HumanInput, Mode, Params, PricingContext};
use dnfrule::par::Execution;
use dnfrule::ruledsl::{BoundConjunction, Provenance};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_duals(r: &mut ChaCha8Rng, n_pos: usize) -> Duals {
    let mu = (0..n_pos).map(|_| if r.random_bool(0.3) { 0.0 } else { r.random_range(0.0..3.0) }).collect();
    let lambda = if r.random_bool(0.3) { 0.0 } else { r.random_range(0.0..2.0) };
    Duals { mu, lambda }
}

fn random_templates(r: &mut ChaCha8Rng, cols: usize) -> Vec<Vec<usize>> {
    (0..r.random_range(1..=2))
        .map(|_| {
            let mut t: Vec<usize> = (0..r.random_range(1..=3.min(cols))).map(|_| r.random_range(0..cols)).collect();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect()
}

fn oracle_rc(d: &TinyData, k: &[usize], duals: &Duals, c_p: f64, templates: &[Vec<usize>]) -> f64 {
    let mut rc = reduced_cost(d, k, &duals.mu, duals.lambda);
    if !templates.is_empty() {
        rc += c_p * template_distance(k, templates);
    }
    rc
}

#[test]
fn pricing_minimum_matches_enumeration() {
    let mut r = rng(11);
    for case in 0..300 {
        let (ds, tiny) = tiny_instance(&mut r, 5, 25);
        let duals = random_duals(&mut r, ds.positives().len());
        let degree = r.random_range(1..=4);
        let (c_p, templates) =
            if r.random_bool(0.5) { (r.random_range(0.0..2.0), random_templates(&mut r, ds.n_columns())) } else { (0.0, vec![]) };
        let ctx = PricingContext::new(&ds, degree, c_p, &templates);
        let got = enumerate_columns(&ctx, &duals, None, f64::INFINITY, 1, Execution::Parallel);
        let want = all_conjunctions(ds.n_columns(), degree)
            .iter()
            .map(|k| oracle_rc(&tiny, k, &duals, c_p, &templates))
            .fold(f64::INFINITY, f64::min);
        assert!((got[0].reduced_cost - want).abs() <= 1e-9, "case {case}: {} vs {want}", got[0].reduced_cost);
    }
}

#[test]
fn pricing_returns_every_improving_column_outside_the_pool() {
    let mut r = rng(12);
    for case in 0..200 {
        let (ds, tiny) = tiny_instance(&mut r, 4, 20);
        let duals = random_duals(&mut r, ds.positives().len());
        let degree = r.random_range(1..=3);
        let ctx = PricingContext::new(&ds, degree, 0.0, &[]);
        let mut pool = ColumnPool::new();
        for j in 0..ds.n_columns() {
            if r.random_bool(0.5) {
                pool.insert(&ds, &[j], false, &[]).unwrap();
            }
        }
        let eps = 1e-9;
        let got = price(&ctx, &duals, &pool, eps, usize::MAX, Execution::Sequential);
        for c in &got {
            assert!(!pool.contains(&c.columns));
            assert!(oracle_rc(&tiny, &c.columns, &duals, 0.0, &[]) < -eps + 1e-9, "case {case}");
        }
        for k in all_conjunctions(ds.n_columns(), degree) {
            if !pool.contains(&k) && oracle_rc(&tiny, &k, &duals, 0.0, &[]) < -eps - 1e-9 {
                assert!(got.iter().any(|c| c.columns == k), "case {case}: missing {k:?}");
            }
        }
        let par = price(&ctx, &duals, &pool, eps, 5, Execution::Parallel);
        assert_eq!(par.as_slice(), &got[..got.len().min(5)]);
    }
}

#[test]
fn training_reaches_the_brute_force_optimum() {
    let mut r = rng(13);
    for case in 0..120 {
        let (ds, tiny) = tiny_instance(&mut r, 5, 30);
        let budget = r.random_range(1..=6);
        let params = Params { complexity: budget, max_degree: 3, ..Params::default() };
        let out = train(&ds, &HumanInput::default(), &params).unwrap();
        let best = brute_force_min_loss(&tiny, 3, budget);
        assert_eq!(out.report.objective, best as f64, "case {case}");
        assert!(out.report.proven_optimal, "case {case}");
        assert_eq!(hamming(&tiny, &out.rules.iter().map(|k| k.columns.clone()).collect::<Vec<_>>()), best);
        assert!(out.report.complexity <= budget);
        for w in out.report.iterations.windows(2) {
            assert!(w[1].lp_objective <= w[0].lp_objective + 1e-7, "case {case}");
        }
    }
}

fn random_human(r: &mut ChaCha8Rng, cols: usize) -> Vec<BoundConjunction> {
    (0..r.random_range(1..=3))
        .map(|_| {
            let cols: Vec<usize> = (0..r.random_range(1..=2)).map(|_| r.random_range(0..cols)).collect();
            BoundConjunction::new(cols, Provenance::Human)
        })
        .collect()
}

#[test]
fn soft_mode_objective_accounts_for_dropped_rules() {
    let mut r = rng(14);
    for case in 0..100 {
        let (ds, tiny) = tiny_instance(&mut r, 4, 25);
        let human = random_human(&mut r, ds.n_columns());
        let c_u = r.random_range(0.0..0.2);
        let params = Params { complexity: r.random_range(1..=6), max_degree: 3, c_u, mode: Mode::Soft, ..Params::default() };
        let out = train(&ds, &HumanInput::rules(human.clone()), &params).unwrap();
        let rules: Vec<Vec<usize>> = out.rules.iter().map(|k| k.columns.clone()).collect();
        let mut distinct: Vec<Vec<usize>> = human.iter().map(|k| k.columns.clone()).collect();
        distinct.sort();
        distinct.dedup();
        let dropped = distinct.iter().filter(|k| !rules.contains(k)).count();
        let expected = hamming(&tiny, &rules) as f64 + c_u * ds.n_samples() as f64 * dropped as f64;
        assert_eq!(out.report.objective, expected, "case {case}");
        assert!((out.report.mip_objective - expected).abs() < 1e-6, "case {case}");
    }
}

#[test]
fn hard_mode_keeps_every_rule_or_reports_the_budget() {
    let mut r = rng(15);
    for case in 0..100 {
        let (ds, _) = tiny_instance(&mut r, 4, 25);
        let human = random_human(&mut r, ds.n_columns());
        let params = Params { complexity: r.random_range(1..=6), max_degree: 2, mode: Mode::Hard, ..Params::default() };
        match train(&ds, &HumanInput::rules(human.clone()), &params) {
            Ok(out) => {
                for h in &human {
                    assert!(out.rules.iter().any(|k| k.columns == h.columns), "case {case}");
                }
            }
            Err(ColgenError::BudgetExceeded { required, budget }) => {
                assert!(required > budget, "case {case}");
                let mut distinct: Vec<&Vec<usize>> = human.iter().map(|k| &k.columns).collect();
                distinct.sort();
                distinct.dedup();
                assert_eq!(distinct.iter().map(|k| k.len()).sum::<usize>(), required);
            }
            Err(e) => panic!("case {case}: {e}"),
        }
    }
}

#[test]
fn sequential_and_parallel_training_agree() {
    let mut r = rng(16);
    for _ in 0..20 {
        let (ds, _) = tiny_instance(&mut r, 5, 30);
        let base = Params { complexity: 5, max_degree: 3, ..Params::default() };
        let a = train(&ds, &HumanInput::default(), &Params { execution: Execution::Sequential, ..base }).unwrap();
        let b = train(&ds, &HumanInput::default(), &Params { execution: Execution::Parallel, ..base }).unwrap();
        assert_eq!(a, b);
    }
}
