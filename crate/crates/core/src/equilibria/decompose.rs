use crate::colgen::{run_column_generation, ColGenConfig, CouplingMaster};
use crate::error::{Error, Result};
use crate::game::{marginal_of, MixedStrategy};
use crate::lp::{Bounds, LinearProgram, Relation, Sense};
use crate::setsystems::DbrOracle;

/// Largest total deviation accepted as "in the hull".
const HULL_TOL: f64 = 1e-8;
/// Pricing must be tight enough that a zero phase-1 optimum is not missed.
const PRICING_TOL: f64 = 1e-11;

/// Writes `x` as a convex combination of at most `n + 1` members of E.
///
/// Phase-1 column generation: minimise `sum_i (s+_i + s-_i)` subject to
/// `sum_e p_e e + s+ - s- = x` and `sum_e p_e = 1`. The master optimum is
/// a vertex, so its support is bounded by the row count.
pub fn decompose_marginal(x: &[f64], oracle: &dyn DbrOracle) -> Result<MixedStrategy> {
    let n = oracle.dim();
    if x.len() != n {
        return Err(Error::dims(n, x.len()));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("coverage {v} is not finite")));
    }
    let mut lp = LinearProgram::new(Sense::Minimize);
    let mut rows = Vec::with_capacity(n);
    for &xi in x {
        let plus = lp.add_variable(1.0, Bounds::NONNEGATIVE);
        let minus = lp.add_variable(1.0, Bounds::NONNEGATIVE);
        rows.push(lp.add_row_sparse(&[(plus, 1.0), (minus, -1.0)], Relation::Eq, xi)?);
    }
    let mut master = CouplingMaster::new(lp, rows, 1.0)?;
    master.seed(oracle)?;
    let config = ColGenConfig { reduced_cost_tol: PRICING_TOL, ..Default::default() };
    let (sol, _) = run_column_generation(&mut master, |m, sol| m.price(oracle, sol), &config, n)?;
    if sol.objective > HULL_TOL {
        let residual = (0..n).map(|i| sol.primal[2 * i] - sol.primal[2 * i + 1]).collect();
        return Err(Error::NotInHull { total: sol.objective, residual });
    }
    let mixed = master.mixed_strategy(&sol)?;
    debug_assert!(marginal_of(&mixed).as_slice().iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-6));
    Ok(mixed)
}
