use super::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn min_x_with_x_at_least_one() {
    let mut lp = LinearProgram::new(1);
    lp.objective[0] = 1.0;
    lp.add_constraint(vec![(0, 1.0)], Sense::Ge, 1.0);
    let s = solve_lp(&lp, tol()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.primal[0] - 1.0).abs() < 1e-9);
    assert!((s.duals[0] - 1.0).abs() < 1e-9);
    assert!((s.objective - 1.0).abs() < 1e-9);
    assert!(s.duality_gap() < 1e-9);
}

#[test]
fn negative_upper_row_is_infeasible() {
    let mut lp = LinearProgram::new(1);
    lp.add_constraint(vec![(0, 1.0)], Sense::Le, -1.0);
    assert_eq!(solve_lp(&lp, tol()).unwrap().status, LpStatus::Infeasible);
}

#[test]
fn unbounded_ray() {
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![-1.0, 0.0];
    lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Sense::Le, 2.0);
    assert_eq!(solve_lp(&lp, tol()).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn rejects_malformed_programs() {
    let mut lp = LinearProgram::new(1);
    lp.lower[0] = 2.0;
    lp.upper[0] = 1.0;
    assert_eq!(solve_lp(&lp, tol()).unwrap_err(), LpError::InvertedBounds(0));
    let mut lp = LinearProgram::new(1);
    lp.add_constraint(vec![(3, 1.0)], Sense::Le, 1.0);
    assert!(matches!(solve_lp(&lp, tol()), Err(LpError::BadIndex { var: 3, .. })));
}

#[test]
fn bounded_variables_and_duals() {
    // max 3a + 2b s.t. a + b <= 4, a + 3b <= 7, 0 <= a <= 3
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![-3.0, -2.0];
    lp.upper[0] = 3.0;
    lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Le, 4.0);
    lp.add_constraint(vec![(0, 1.0), (1, 3.0)], Sense::Le, 7.0);
    let s = solve_lp(&lp, tol()).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    assert!((s.primal[0] - 3.0).abs() < 1e-9 && (s.primal[1] - 1.0).abs() < 1e-9);
    assert!((s.objective + 11.0).abs() < 1e-9);
    assert!((s.duals[0] + 2.0).abs() < 1e-9 && s.duals[1].abs() < 1e-9);
    assert!((s.reduced_costs[0] + 1.0).abs() < 1e-9);
    assert!(s.duality_gap() < 1e-9);
}

#[test]
fn warm_start_after_adding_a_column() {
    // cover two items; the cheap combined column arrives later
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![2.0, 2.0];
    lp.add_constraint(vec![(0, 1.0)], Sense::Ge, 1.0);
    lp.add_constraint(vec![(1, 1.0)], Sense::Ge, 1.0);
    let mut s = Simplex::new(&lp, tol()).unwrap();
    assert_eq!(s.solve(), LpStatus::Optimal);
    assert!((s.solution().objective - 4.0).abs() < 1e-9);
    s.add_column(1.5, &[(0, 1.0), (1, 1.0)], 0.0, f64::INFINITY);
    assert_eq!(s.solve(), LpStatus::Optimal);
    let sol = s.solution();
    assert!((sol.objective - 1.5).abs() < 1e-9);
    assert!((sol.primal[2] - 1.0).abs() < 1e-9);
}

#[test]
fn bound_change_reoptimizes_with_dual_simplex() {
    let mut lp = LinearProgram::new(3);
    lp.objective = vec![1.0, 2.0, 3.0];
    lp.upper = vec![1.0; 3];
    lp.add_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Ge, 1.5);
    let mut s = Simplex::new(&lp, tol()).unwrap();
    assert_eq!(s.solve(), LpStatus::Optimal);
    assert!((s.solution().objective - 2.0).abs() < 1e-9);
    s.set_bounds(0, 0.0, 0.0);
    assert_eq!(s.solve(), LpStatus::Optimal);
    assert!((s.solution().objective - 3.5).abs() < 1e-9);
    s.set_bounds(1, 0.0, 0.0);
    assert_eq!(s.solve(), LpStatus::Infeasible);
}

#[test]
fn integral_relaxation_needs_no_branching() {
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![1.0, 1.0];
    lp.upper = vec![1.0, 1.0];
    lp.add_constraint(vec![(0, 1.0)], Sense::Ge, 1.0);
    let relax = solve_lp(&lp, tol()).unwrap();
    let mip = solve_binary_mip(&lp, &[0, 1], MipOptions::default()).unwrap();
    assert_eq!(mip.status, LpStatus::Optimal);
    assert_eq!(mip.nodes, 1);
    assert!((mip.objective - relax.objective).abs() < 1e-12);
}

#[test]
fn knapsack_matches_brute_force() {
    // max 5a + 4b + 3c + 7d  s.t. 2a + 3b + c + 4d <= 6
    let value = [5.0, 4.0, 3.0, 7.0];
    let weight = [2.0, 3.0, 1.0, 4.0];
    let mut lp = LinearProgram::new(4);
    lp.objective = value.iter().map(|v| -v).collect();
    lp.add_constraint((0..4).map(|j| (j, weight[j])).collect(), Sense::Le, 6.0);
    let mip = solve_binary_mip(&lp, &[0, 1, 2, 3], MipOptions::default()).unwrap();
    let mut best = f64::INFINITY;
    for mask in 0u32..16 {
        let x: Vec<f64> = (0..4).map(|j| f64::from((mask >> j) & 1)).collect();
        if (0..4).map(|j| weight[j] * x[j]).sum::<f64>() <= 6.0 {
            best = best.min(lp.evaluate(&x));
        }
    }
    assert_eq!(best, -12.0);
    assert_eq!(mip.status, LpStatus::Optimal);
    assert!((mip.objective - best).abs() < 1e-9);
    assert!(mip.objective >= mip.lp_bound - 1e-9);
}

#[test]
fn infeasible_binary_system() {
    let mut lp = LinearProgram::new(2);
    lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Sense::Ge, 1.0);
    lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Sense::Le, 1.0);
    let mip = solve_binary_mip(&lp, &[0, 1], MipOptions::default()).unwrap();
    assert_eq!(mip.status, LpStatus::Infeasible);
}

#[test]
fn node_budget_reports_limit() {
    // parity-style instance whose relaxation stays fractional for a while
    let n = 8;
    let mut lp = LinearProgram::new(n);
    lp.objective = vec![1.0; n];
    for j in 0..n {
        lp.add_constraint(vec![(j, 1.0), ((j + 1) % n, 1.0), ((j + 3) % n, 1.0)], Sense::Ge, 1.5);
    }
    let opts = MipOptions { node_limit: 1, ..MipOptions::default() };
    let mip = solve_binary_mip(&lp, &(0..n).collect::<Vec<_>>(), opts).unwrap();
    assert_eq!(mip.status, LpStatus::IterationLimit);
    let full = solve_binary_mip(&lp, &(0..n).collect::<Vec<_>>(), MipOptions::default()).unwrap();
    assert_eq!(full.status, LpStatus::Optimal);
}
