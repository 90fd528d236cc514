use proptest::prelude::*;

use super::*;

fn assert_certified(lp: &LinearProgram, sol: &LpSolution) {
    assert_eq!(sol.status, LpStatus::Optimal);
    let res = lp.residuals(sol);
    assert!(res.primal_infeasibility <= 1e-8, "{res:?}");
    assert!(res.dual_infeasibility <= 1e-8, "{res:?}");
    assert!(res.complementarity <= 1e-8, "{res:?}");
    assert!(res.duality_gap <= 1e-8, "{res:?}");
}

#[test]
fn single_bound_row() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0], Relation::Le, 3.0).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.objective, 3.0);
    assert_eq!(sol.primal, vec![3.0]);
    assert_eq!(sol.duals, vec![1.0]);
    assert_certified(&lp, &sol);
}

#[test]
fn vertex_under_lowest_index_pivoting() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0, 1.0], Relation::Le, 1.0).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.objective, 1.0);
    assert_eq!(sol.primal, vec![1.0, 0.0]);
}

/// Maximin LP for two targets, one resource, r = (1, 1), c = (0, 0), over
/// the explicit columns {00, 10, 01}.
#[test]
fn maximin_lp_for_symmetric_game() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let u = lp.add_variable(1.0, Bounds::FREE);
    let x: Vec<usize> = (0..2).map(|_| lp.add_variable(0.0, Bounds::FREE)).collect();
    let cols: [[f64; 2]; 3] = [[0., 0.], [1., 0.], [0., 1.]];
    let p: Vec<usize> = cols.iter().map(|_| lp.add_variable(0.0, Bounds::NONNEGATIVE)).collect();
    for i in 0..2 {
        lp.add_row_sparse(&[(u, 1.0), (x[i], -1.0)], Relation::Le, 0.0).unwrap();
    }
    for i in 0..2 {
        let mut entries = vec![(x[i], 1.0)];
        entries.extend(cols.iter().zip(&p).map(|(e, &pj)| (pj, -e[i])));
        lp.add_row_sparse(&entries, Relation::Eq, 0.0).unwrap();
    }
    lp.add_row_sparse(&p.iter().map(|&j| (j, 1.0)).collect::<Vec<_>>(), Relation::Eq, 1.0).unwrap();
    let sol = lp.solve().unwrap();
    assert!((sol.objective - 0.5).abs() < 1e-12);
    assert!((sol.duals[0] - 0.5).abs() < 1e-12 && (sol.duals[1] - 0.5).abs() < 1e-12);
    assert_certified(&lp, &sol);
}

#[test]
fn infeasible_and_unbounded_statuses() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0], Relation::Le, 1.0).unwrap();
    lp.add_row(&[1.0], Relation::Ge, 2.0).unwrap();
    assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_variable(0.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0, -1.0], Relation::Le, 1.0).unwrap();
    assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);

    let mut lp = LinearProgram::new(Sense::Minimize);
    lp.add_variable(1.0, Bounds::boxed(2.0, 1.0));
    assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
}

#[test]
fn bounds_and_free_variables() {
    // min x - y with x in [-2, 5], y <= 3 (free below), x + y >= -4
    let mut lp = LinearProgram::new(Sense::Minimize);
    lp.add_variable(1.0, Bounds::boxed(-2.0, 5.0));
    lp.add_variable(-1.0, Bounds { lower: f64::NEG_INFINITY, upper: 3.0 });
    lp.add_row(&[1.0, 1.0], Relation::Ge, -4.0).unwrap();
    let sol = lp.solve().unwrap();
    assert!((sol.objective - (-5.0)).abs() < 1e-12);
    assert_eq!(sol.primal, vec![-2.0, 3.0]);
    assert_certified(&lp, &sol);
}

#[test]
fn shadow_price_signs() {
    // max x + y, x + y >= 1 (slack), x <= 2, y <= 1 via rows
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0, 1.0], Relation::Ge, 1.0).unwrap();
    lp.add_row(&[1.0, 0.0], Relation::Le, 2.0).unwrap();
    lp.add_row(&[0.0, 1.0], Relation::Le, 1.0).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.objective, 3.0);
    assert_eq!(sol.duals, vec![0.0, 1.0, 1.0]);

    // min x, x >= 2: increasing the rhs raises the optimum
    let mut lp = LinearProgram::new(Sense::Minimize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0], Relation::Ge, 2.0).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.duals, vec![1.0]);

    // max x, -x >= -3 is flipped internally; shadow price is still -1
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::NONNEGATIVE);
    lp.add_row(&[-1.0], Relation::Ge, -3.0).unwrap();
    let sol = lp.solve().unwrap();
    assert_eq!(sol.objective, 3.0);
    assert_eq!(sol.duals, vec![-1.0]);
}

fn small_max_lp() -> LinearProgram {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(3.0, Bounds::NONNEGATIVE);
    lp.add_variable(2.0, Bounds::NONNEGATIVE);
    lp.add_row(&[1.0, 1.0], Relation::Le, 4.0).unwrap();
    lp.add_row(&[1.0, 3.0], Relation::Le, 6.0).unwrap();
    lp.add_row(&[1.0, 0.0], Relation::Le, 3.0).unwrap();
    lp
}

#[test]
fn redundant_row_keeps_objective() {
    let mut lp = small_max_lp();
    let before = lp.solve().unwrap().objective;
    lp.add_row(&[1.0, 1.0], Relation::Le, 10.0).unwrap();
    let after = lp.solve().unwrap();
    assert!(after.warm_started);
    assert_eq!(before, after.objective);
    assert_certified(&lp, &after);
}

#[test]
fn improving_column_never_lowers_max() {
    let mut lp = small_max_lp();
    let before = lp.solve().unwrap().objective;
    lp.add_column(5.0, &[1.0, 1.0, 0.0], Bounds::NONNEGATIVE).unwrap();
    let after = lp.solve().unwrap();
    assert!(after.warm_started);
    assert!(after.objective >= before);
    assert!((after.objective - 20.0).abs() < 1e-12);
    assert_certified(&lp, &after);
}

#[test]
fn violated_row_never_raises_max() {
    let mut lp = small_max_lp();
    let before = lp.solve().unwrap();
    lp.add_row(&[1.0, 1.0], Relation::Le, 2.0).unwrap();
    let after = lp.solve().unwrap();
    assert!(after.objective <= before.objective);
    assert!((after.objective - 6.0).abs() < 1e-12);
    // a violated >= cut warm-starts through phase one
    lp.add_row(&[0.0, 1.0], Relation::Ge, 1.0).unwrap();
    let cut = lp.solve().unwrap();
    assert!(cut.warm_started);
    assert!((cut.objective - 5.0).abs() < 1e-12);
    assert_certified(&lp, &cut);
}

#[test]
fn dimension_checks() {
    let mut lp = small_max_lp();
    assert!(matches!(lp.add_row(&[1.0], Relation::Le, 1.0), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(lp.add_column(1.0, &[1.0], Bounds::NONNEGATIVE), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn lp_text_dump() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_variable(1.0, Bounds::FREE);
    lp.add_variable(-2.0, Bounds::boxed(0.0, 1.0));
    lp.add_row(&[1.0, 1.0], Relation::Le, 3.0).unwrap();
    let text = lp.to_lp_text();
    assert_eq!(
        text,
        "Maximize\n obj: 1 v0 - 2 v1\nSubject To\n r0: 1 v0 + 1 v1 <= 3\nBounds\n v0 free\n 0 <= v1 <= 1\nEnd\n"
    );
}

#[test]
fn degenerate_problem_terminates() {
    // Beale's cycling example for textbook Dantzig pricing
    let mut lp = LinearProgram::new(Sense::Minimize);
    for c in [-0.75, 150.0, -0.02, 6.0] {
        lp.add_variable(c, Bounds::NONNEGATIVE);
    }
    lp.add_row(&[0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0).unwrap();
    lp.add_row(&[0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0).unwrap();
    lp.add_row(&[0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0).unwrap();
    let sol = lp.solve().unwrap();
    assert!((sol.objective + 0.05).abs() < 1e-12);
    assert_certified(&lp, &sol);
}

#[test]
fn identical_inputs_give_identical_outputs() {
    let a = solve_lp(&small_max_lp()).unwrap();
    let b = solve_lp(&small_max_lp()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Random bounded-feasible programs: x = 0 is feasible for the <= rows and
    /// a box keeps the optimum finite.
    #[test]
    fn strong_duality_and_vertex_property(
        n in 1usize..6,
        m in 1usize..6,
        seed in proptest::collection::vec(-5i32..6, 72),
        maximize in any::<bool>(),
    ) {
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        let mut lp = LinearProgram::new(sense);
        for j in 0..n {
            lp.add_variable(seed[j] as f64, Bounds::NONNEGATIVE);
        }
        for i in 0..m {
            let coeffs: Vec<f64> = (0..n).map(|j| seed[12 + i * n + j] as f64 / 2.0).collect();
            let rel = if i % 3 == 2 { Relation::Ge } else { Relation::Le };
            let rhs = if rel == Relation::Ge { -(seed[6 + i].abs() as f64) } else { seed[6 + i].abs() as f64 + 1.0 };
            lp.add_row(&coeffs, rel, rhs).unwrap();
        }
        lp.add_row(&vec![1.0; n], Relation::Le, 10.0).unwrap();
        let sol = lp.solve().unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let res = lp.residuals(&sol);
        prop_assert!(res.duality_gap <= 1e-8, "{:?}", res);
        prop_assert!(res.primal_infeasibility <= 1e-8, "{:?}", res);
        prop_assert!(res.dual_infeasibility <= 1e-8, "{:?}", res);
        let positive = sol.primal.iter().filter(|v| **v > 1e-9).count();
        prop_assert!(positive <= lp.num_rows());
    }
}
