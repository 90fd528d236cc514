//! Reductions from polytope questions to security games, as runnable
//! constructions with brute-force counterparts.

use std::collections::HashSet;
use std::sync::Arc;

use crate::colgen::ColGenConfig;
use crate::equilibria::minimax_value;
use crate::error::{Error, Result};
use crate::game::{Payoffs, PureStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, Relation, Sense};
use crate::setsystems::{DbrOracle, Explicit};

/// Game values at or above `1 - MEMBER_TOL` classify the point as a member.
pub const MEMBER_TOL: f64 = 1e-7;
/// Coordinates below this take the `x_i = 0` branch of the construction.
pub const ZERO_GUARD: f64 = 1e-12;
/// Largest downward closure built before giving up.
pub const CLOSURE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    pub is_member: bool,
    /// Minimax value of the constructed game; `-inf` when `x` was rejected
    /// before any game was built.
    pub game_value: f64,
    pub reward: Vec<f64>,
    pub cost: Vec<f64>,
}

/// Decides whether `x` lies in the convex hull of the downward closure of E
/// by solving one zero-sum game: target `i` pays `(c_i, r_i) = (0, 1/x_i)`,
/// or `(1, 2)` when `x_i = 0`. The value is at least 1 exactly for members.
pub fn membership_check(x: &[f64], oracle: Arc<dyn DbrOracle>) -> Result<MembershipVerdict> {
    let n = oracle.dim();
    if x.len() != n {
        return Err(Error::dims(n, x.len()));
    }
    if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Ok(MembershipVerdict { is_member: false, game_value: f64::NEG_INFINITY, reward: vec![], cost: vec![] });
    }
    let (reward, cost): (Vec<f64>, Vec<f64>) =
        x.iter().map(|&v| if v < ZERO_GUARD { (2.0, 1.0) } else { (1.0 / v, 0.0) }).unzip();
    let payoffs = Payoffs::new(
        reward.clone(),
        cost.clone(),
        cost.iter().map(|v| -v).collect(),
        reward.iter().map(|v| -v).collect(),
    );
    let game = SecurityGame::new(payoffs, oracle)?;
    let game_value = minimax_value(&game, &ColGenConfig::default())?;
    Ok(MembershipVerdict { is_member: game_value >= 1.0 - MEMBER_TOL, game_value, reward, cost })
}

/// All members of E together with every vector they dominate, deduplicated
/// in first-seen order. Vectors outside E are flagged sub-pure.
pub fn downward_closure(strategies: &[PureStrategy]) -> Result<Vec<PureStrategy>> {
    let members: HashSet<&PureStrategy> = strategies.iter().collect();
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut out = Vec::new();
    for e in strategies {
        let covered: Vec<usize> = e.covered().collect();
        if covered.len() >= 63 || 1u64 << covered.len() > CLOSURE_LIMIT as u64 {
            return Err(Error::ScaleExceeded { budget: CLOSURE_LIMIT as u64 });
        }
        for mask in 0u64..1u64 << covered.len() {
            let mut bits = vec![false; e.len()];
            for (b, &i) in covered.iter().enumerate() {
                bits[i] = mask >> b & 1 == 1;
            }
            if seen.insert(bits.clone()) {
                if out.len() == CLOSURE_LIMIT {
                    return Err(Error::ScaleExceeded { budget: CLOSURE_LIMIT as u64 });
                }
                let v = PureStrategy::new(bits);
                let subpure = !members.contains(&v);
                out.push(v.with_subpure(subpure));
            }
        }
    }
    Ok(out)
}

/// Exact membership in the hull of the downward closure: a feasibility LP
/// over every vector of the closure.
pub fn brute_membership(x: &[f64], strategies: &[PureStrategy]) -> Result<bool> {
    let closure = downward_closure(strategies)?;
    let n = x.len();
    if let Some(e) = closure.first() {
        if e.len() != n {
            return Err(Error::dims(e.len(), n));
        }
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    for _ in &closure {
        lp.add_variable(0.0, Bounds::NONNEGATIVE);
    }
    for (i, &xi) in x.iter().enumerate() {
        let row: Vec<f64> = closure.iter().map(|e| if e.covers(i) { 1.0 } else { 0.0 }).collect();
        lp.add_row(&row, Relation::Eq, xi)?;
    }
    lp.add_row(&vec![1.0; closure.len()], Relation::Eq, 1.0)?;
    Ok(lp.solve()?.is_optimal())
}

/// Largest `t` with `t x` in the hull of the downward closure, by LP over
/// E: `max t` s.t. `sum_e p_e e >= t x`, `sum_e p_e = 1`. Infinite when `x`
/// is zero.
pub fn boundary_scale(x: &[f64], strategies: &[PureStrategy]) -> Result<f64> {
    if x.iter().all(|&v| v == 0.0) {
        return Ok(f64::INFINITY);
    }
    if x.iter().any(|&v| v < 0.0) {
        return Err(Error::Invalid("boundary scale needs a nonnegative direction".into()));
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    let t = lp.add_variable(1.0, Bounds::NONNEGATIVE);
    for _ in strategies {
        lp.add_variable(0.0, Bounds::NONNEGATIVE);
    }
    for (i, &xi) in x.iter().enumerate() {
        let mut row = vec![0.0; strategies.len() + 1];
        row[t] = -xi;
        for (j, e) in strategies.iter().enumerate() {
            if e.covers(i) {
                row[j + 1] = 1.0;
            }
        }
        lp.add_row(&row, Relation::Ge, 0.0)?;
    }
    let mut simplex = vec![1.0; strategies.len() + 1];
    simplex[t] = 0.0;
    lp.add_row(&simplex, Relation::Eq, 1.0)?;
    let sol = lp.solve()?;
    if !sol.is_optimal() {
        return Err(Error::LpStatus("infeasible"));
    }
    Ok(sol.objective)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `1 - C(n-2, k) / C(n, k)`: the chance that a uniformly random k-subset of
/// vertices touches a fixed edge.
pub fn kn_edge_value(n: usize, k: usize) -> f64 {
    1.0 - binomial(n - 2, k) / binomial(n, k)
}

/// Edges of K_n in lexicographic order.
pub fn kn_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Zero-sum game on the edges of K_n: the defender patrols k vertices and
/// protects every incident edge, earning 1 on a protected edge and 0
/// otherwise. Returns the game and its closed-form value.
pub fn build_kn_edge_game(n: usize, k: usize) -> Result<(SecurityGame, f64)> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Invalid(format!("K_n edge game needs 1 <= k < n, got n = {n}, k = {k}")));
    }
    let edges = kn_edges(n);
    let mut seen = HashSet::new();
    let mut strategies = Vec::new();
    let mut chosen: Vec<usize> = (0..k).collect();
    loop {
        let mut on = vec![false; n];
        chosen.iter().for_each(|&v| on[v] = true);
        let e = PureStrategy::new(edges.iter().map(|&(a, b)| on[a] || on[b]).collect());
        if seen.insert(e.clone()) {
            strategies.push(e);
        }
        // next k-combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| chosen[i] < n - k + i) else { break };
        chosen[pos] += 1;
        for i in pos + 1..k {
            chosen[i] = chosen[i - 1] + 1;
        }
    }
    let m = edges.len();
    let payoffs = Payoffs::new(vec![1.0; m], vec![0.0; m], vec![0.0; m], vec![-1.0; m]);
    let game = SecurityGame::new(payoffs, Arc::new(Explicit::new(strategies)?))?;
    Ok((game, kn_edge_value(n, k)))
}
