//! Explicit-column reference solvers.
//!
//! Each equilibrium LP is written directly over the probabilities `p_e` of
//! an enumerated strategy list, with no coupling variables and no column or
//! cut generation. They exist to cross-check the oracle-driven solvers on
//! instances small enough to enumerate.

use crate::equilibria::{Extremum, TIE_TOL};
use crate::error::{Error, Result};
use crate::game::{PureStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, LpSolution, Relation, Sense};

/// Lists E through the oracle, failing when it has more than `limit` members.
pub fn explicit_strategies(game: &SecurityGame, limit: usize) -> Result<Vec<PureStrategy>> {
    let oracle = game.oracle();
    if !oracle.capabilities().enumerable {
        return Err(Error::Invalid(format!("{} set system cannot be enumerated", oracle.kind())));
    }
    oracle.enumerate(limit)
}

fn solve_optimal(lp: &mut LinearProgram) -> Result<Option<LpSolution>> {
    let sol = lp.solve()?;
    Ok(sol.is_optimal().then_some(sol))
}

fn marginal(strategies: &[PureStrategy], p: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (e, &pe) in strategies.iter().zip(p) {
        e.covered().for_each(|i| x[i] += pe);
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMinimax {
    pub value: f64,
    pub marginal: Vec<f64>,
}

/// `max u` s.t. `u <= c_i + (r_i - c_i) sum_e p_e e_i` for every target.
pub fn reference_minimax(game: &SecurityGame, strategies: &[PureStrategy]) -> Result<ReferenceMinimax> {
    let n = game.n();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let u = lp.add_variable(1.0, Bounds::FREE);
    for _ in strategies {
        lp.add_variable(0.0, Bounds::NONNEGATIVE);
    }
    for i in 0..n {
        let mut row = vec![0.0; strategies.len() + 1];
        row[u] = 1.0;
        for (j, e) in strategies.iter().enumerate() {
            if e.covers(i) {
                row[j + 1] = -(game.reward()[i] - game.cost()[i]);
            }
        }
        lp.add_row(&row, Relation::Le, game.cost()[i])?;
    }
    let mut simplex = vec![1.0; strategies.len() + 1];
    simplex[u] = 0.0;
    lp.add_row(&simplex, Relation::Eq, 1.0)?;
    let sol = solve_optimal(&mut lp)?.ok_or(Error::LpStatus("infeasible"))?;
    Ok(ReferenceMinimax { value: sol.objective, marginal: marginal(strategies, &sol.primal[1..], n) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSse {
    pub defender_utility: f64,
    pub target: usize,
}

/// Every LP_k written over `p`; the best feasible k, ties to the lowest.
pub fn reference_sse(game: &SecurityGame, strategies: &[PureStrategy]) -> Result<ReferenceSse> {
    let n = game.n();
    let m = strategies.len();
    let (rho, zeta) = (game.att_reward(), game.att_cost());
    // coverage[i][j] = e_j[i]
    let coverage: Vec<Vec<f64>> =
        (0..n).map(|i| strategies.iter().map(|e| if e.covers(i) { 1.0 } else { 0.0 }).collect()).collect();
    let mut best: Option<ReferenceSse> = None;
    for k in 0..n {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for j in 0..m {
            lp.add_variable((game.reward()[k] - game.cost()[k]) * coverage[k][j], Bounds::NONNEGATIVE);
        }
        for i in (0..n).filter(|&i| i != k) {
            let row: Vec<f64> =
                (0..m).map(|j| -(rho[k] - zeta[k]) * coverage[k][j] + (rho[i] - zeta[i]) * coverage[i][j]).collect();
            lp.add_row(&row, Relation::Ge, rho[i] - rho[k])?;
        }
        lp.add_row(&vec![1.0; m], Relation::Eq, 1.0)?;
        let Some(sol) = solve_optimal(&mut lp)? else { continue };
        let utility = sol.objective + game.cost()[k];
        if best.as_ref().is_none_or(|b| utility > b.defender_utility + 1e-10) {
            best = Some(ReferenceSse { defender_utility: utility, target: k });
        }
    }
    best.ok_or(Error::LpStatus("infeasible"))
}

/// Best or worst Nash-equilibrium utility for the defender, with every
/// defender-best-response row written out explicitly.
pub fn reference_ne(game: &SecurityGame, strategies: &[PureStrategy], which: Extremum) -> Result<f64> {
    let n = game.n();
    let companion = game.zero_sum_companion();
    let minimax = reference_minimax(&companion, strategies)?;
    let x: Vec<f64> = minimax.marginal.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let gamma = crate::equilibria::ne_utility_coefficients(game, minimax.value).gamma;

    let sense = match which {
        Extremum::Best => Sense::Maximize,
        Extremum::Worst => Sense::Minimize,
    };
    let mut lp = LinearProgram::new(sense);
    for &g in &gamma {
        lp.add_variable(g, Bounds::NONNEGATIVE);
    }
    let a: Vec<f64> = (0..n).map(|i| game.attacker_payoff_at(i, x[i])).collect();
    let top = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let a: Vec<f64> = a.into_iter().map(|v| if v >= top - TIE_TOL * (1.0 + top.abs()) { top } else { v }).collect();
    for &ak in &a {
        lp.add_row(&a, Relation::Ge, ak)?;
    }
    for e in strategies {
        let row: Vec<f64> = (0..n)
            .map(|i| (game.reward()[i] - game.cost()[i]) * (x[i] - if e.covers(i) { 1.0 } else { 0.0 }))
            .collect();
        lp.add_row(&row, Relation::Ge, -1e-9)?;
    }
    lp.add_row(&vec![1.0; n], Relation::Eq, 1.0)?;
    let sol = solve_optimal(&mut lp)?.ok_or(Error::LpStatus("infeasible"))?;
    Ok(sol.objective)
}
