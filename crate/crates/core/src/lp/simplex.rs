//! Standard-form conversion and the tableau simplex itself.
//!
//! Variables are shifted to `x' >= 0` (free variables split in two, finite
//! upper bounds become rows), rows are flipped to nonnegative right-hand
//! sides, and each row gets an initial unit column: a slack for `<=` rows and
//! an artificial for `>=` and `=` rows. Dantzig pricing is used until the
//! number of degenerate pivots reaches `5 (rows + cols)`, after which Bland's
//! rule takes over for the rest of the solve.

use std::collections::{HashMap, HashSet};

use super::{duality_monitor, LinearProgram, LpSolution, LpStatus, Relation, Sense, SimplexOptions};
use crate::error::{Error, Result};

const RATIO_TIE: f64 = 1e-12;
const MIN_PIVOT: f64 = 1e-11;
const MAX_REFACTORS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RowKey {
    Orig(usize),
    Upper(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum ColKey {
    Pos(usize),
    Neg(usize),
    Slack(RowKey),
    Surplus(RowKey),
    Art(RowKey),
}

/// Basis of a previous optimal solve, by column identity.
#[derive(Debug, Clone)]
pub(super) struct WarmBasis {
    keys: Vec<ColKey>,
    rows: HashSet<RowKey>,
}

#[derive(Debug, Clone, Copy)]
struct VarMap {
    shift: f64,
    pos: usize,
    pos_sign: f64,
    neg: Option<usize>,
}

struct Standard {
    m: usize,
    ncols: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    keys: Vec<ColKey>,
    is_art: Vec<bool>,
    identity: Vec<usize>,
    row_keys: Vec<RowKey>,
    row_sign: Vec<f64>,
    row_rel: Vec<Relation>,
    vars: Vec<VarMap>,
}

impl Standard {
    fn build(lp: &LinearProgram) -> Option<Standard> {
        let sense_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut keys = Vec::new();
        let mut cost = Vec::new();
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut upper_rows = Vec::new();
        for (j, bnd) in lp.bounds.iter().enumerate() {
            if bnd.lower > bnd.upper {
                return None;
            }
            let c = lp.objective[j];
            let pos = keys.len();
            keys.push(ColKey::Pos(j));
            let map = if bnd.lower.is_finite() {
                cost.push(sense_sign * c);
                if bnd.upper.is_finite() {
                    upper_rows.push((j, bnd.upper - bnd.lower));
                }
                VarMap { shift: bnd.lower, pos, pos_sign: 1.0, neg: None }
            } else if bnd.upper.is_finite() {
                cost.push(-sense_sign * c);
                VarMap { shift: bnd.upper, pos, pos_sign: -1.0, neg: None }
            } else {
                cost.push(sense_sign * c);
                keys.push(ColKey::Neg(j));
                cost.push(-sense_sign * c);
                VarMap { shift: 0.0, pos, pos_sign: 1.0, neg: Some(pos + 1) }
            };
            vars.push(map);
        }
        let structural = keys.len();

        let mut rows: Vec<(RowKey, Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.rows.len() + upper_rows.len());
        for (i, row) in lp.rows.iter().enumerate() {
            let mut coeffs = vec![0.0; structural];
            let mut rhs = row.rhs;
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let v = vars[j];
                rhs -= a * v.shift;
                coeffs[v.pos] += a * v.pos_sign;
                if let Some(neg) = v.neg {
                    coeffs[neg] -= a;
                }
            }
            rows.push((RowKey::Orig(i), coeffs, row.relation, rhs));
        }
        for (j, width) in upper_rows {
            let mut coeffs = vec![0.0; structural];
            coeffs[vars[j].pos] = 1.0;
            rows.push((RowKey::Upper(j), coeffs, Relation::Le, width));
        }

        let m = rows.len();
        let mut row_sign = Vec::with_capacity(m);
        let mut row_rel = Vec::with_capacity(m);
        let mut row_keys = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut a = Vec::with_capacity(m);
        for (key, mut coeffs, rel, rhs) in rows {
            let (sign, rel) = if rhs < 0.0 {
                coeffs.iter_mut().for_each(|v| *v = -*v);
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (-1.0, flipped)
            } else {
                (1.0, rel)
            };
            row_sign.push(sign);
            row_rel.push(rel);
            row_keys.push(key);
            b.push(rhs * sign);
            a.push(coeffs);
        }

        let mut identity = vec![0; m];
        let mut extra: Vec<(usize, ColKey, f64)> = Vec::new();
        let mut col = structural;
        for r in 0..m {
            let key = row_keys[r];
            match row_rel[r] {
                Relation::Le => {
                    extra.push((r, ColKey::Slack(key), 1.0));
                    identity[r] = col;
                    col += 1;
                }
                Relation::Ge => {
                    extra.push((r, ColKey::Surplus(key), -1.0));
                    extra.push((r, ColKey::Art(key), 1.0));
                    identity[r] = col + 1;
                    col += 2;
                }
                Relation::Eq => {
                    extra.push((r, ColKey::Art(key), 1.0));
                    identity[r] = col;
                    col += 1;
                }
            }
        }
        let ncols = col;
        for row in &mut a {
            row.resize(ncols, 0.0);
        }
        let mut is_art = vec![false; structural];
        for (offset, &(r, key, value)) in extra.iter().enumerate() {
            a[r][structural + offset] = value;
            keys.push(key);
            cost.push(0.0);
            is_art.push(matches!(key, ColKey::Art(_)));
        }
        Some(Standard { m, ncols, a, b, cost, keys, is_art, identity, row_keys, row_sign, row_rel, vars })
    }
}

struct Tableau {
    m: usize,
    ncols: usize,
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Reduced costs; the last entry is minus the objective.
    d: Vec<f64>,
}

impl Tableau {
    fn initial(std: &Standard) -> Tableau {
        let rows = std.a.iter().zip(&std.b).map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        });
        let mut is_basic = vec![false; std.ncols];
        std.identity.iter().for_each(|&c| is_basic[c] = true);
        Tableau {
            m: std.m,
            ncols: std.ncols,
            rows: rows.collect(),
            basis: std.identity.clone(),
            is_basic,
            d: vec![0.0; std.ncols + 1],
        }
    }

    /// Tableau for the given basic columns, by partial-pivoting elimination
    /// from the initial unit basis. `None` if the columns are singular.
    fn install(std: &Standard, target: &[usize]) -> Option<Tableau> {
        let mut tab = Tableau::initial(std);
        if target.len() != std.m {
            return None;
        }
        let wanted: HashSet<usize> = target.iter().copied().collect();
        if wanted.len() != std.m {
            return None;
        }
        for &c in target {
            if tab.is_basic[c] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for r in 0..tab.m {
                if wanted.contains(&tab.basis[r]) {
                    continue;
                }
                let v = tab.rows[r][c].abs();
                if v > 1e-9 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((r, v));
                }
            }
            let (r, _) = best?;
            tab.pivot(r, c);
        }
        Some(tab)
    }

    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.ncols]
    }

    fn set_costs(&mut self, cost: &[f64]) {
        self.d = cost.to_vec();
        self.d.push(0.0);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (dj, a) in self.d.iter_mut().zip(&self.rows[r]) {
                    *dj -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, a) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * a;
                }
                row[c] = 0.0;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for (v, a) in self.d.iter_mut().zip(&pivot_row) {
                *v -= f * a;
            }
            self.d[c] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[c] = true;
        self.basis[r] = c;
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Driver {
    opts: SimplexOptions,
    iterations: usize,
    max_iterations: usize,
    degenerate: usize,
    bland_after: usize,
}

impl Driver {
    fn bland(&self) -> bool {
        self.degenerate >= self.bland_after
    }

    fn run(&mut self, tab: &mut Tableau, barred: &mut [bool], is_art: &[bool]) -> Result<PhaseEnd> {
        loop {
            let mut entering: Option<usize> = None;
            for j in 0..tab.ncols {
                if barred[j] || tab.is_basic[j] || tab.d[j] >= -self.opts.opt_tol {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(e) if !self.bland() && tab.d[j] < tab.d[e] => entering = Some(j),
                    _ => {}
                }
                if self.bland() {
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..tab.m {
                let a = tab.rows[r][c];
                if a <= self.opts.pivot_tol {
                    continue;
                }
                let ratio = tab.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= RATIO_TIE * best_ratio.max(1.0);
                        let better = if tie {
                            if self.bland() {
                                tab.basis[r] < tab.basis[best]
                            } else {
                                a > tab.rows[best][c]
                            }
                        } else {
                            ratio < best_ratio
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(PhaseEnd::Unbounded);
            };
            if tab.rows[r][c].abs() < MIN_PIVOT {
                return Err(Error::NumericalBreakdown(format!("pivot magnitude {:.3e}", tab.rows[r][c])));
            }
            if ratio <= RATIO_TIE {
                self.degenerate += 1;
            }
            let leaving = tab.basis[r];
            tab.pivot(r, c);
            if is_art[leaving] {
                barred[leaving] = true;
            }
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(Error::NumericalBreakdown(format!("simplex exceeded {} iterations", self.max_iterations)));
            }
        }
    }
}

pub(super) fn solve(lp: &LinearProgram, warm: Option<&WarmBasis>) -> Result<(LpSolution, Option<WarmBasis>)> {
    let result = solve_inner(lp, warm);
    match &result {
        Ok((sol, _)) if sol.is_optimal() => {
            let res = lp.residuals(sol);
            duality_monitor().record(res.duality_gap, res.dual_infeasibility);
        }
        Err(Error::NumericalBreakdown(_)) => duality_monitor().record_breakdown(),
        _ => {}
    }
    result
}

fn non_optimal(lp: &LinearProgram, status: LpStatus, iterations: usize) -> (LpSolution, Option<WarmBasis>) {
    let sol = LpSolution {
        status,
        objective: match (status, lp.sense) {
            (LpStatus::Unbounded, Sense::Maximize) => f64::INFINITY,
            (LpStatus::Unbounded, Sense::Minimize) => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        primal: vec![0.0; lp.num_vars()],
        duals: vec![0.0; lp.num_rows()],
        reduced_costs: vec![0.0; lp.num_vars()],
        iterations,
        warm_started: false,
    };
    (sol, None)
}

fn warm_tableau(std: &Standard, warm: &WarmBasis, feas_tol: f64) -> Option<Tableau> {
    let index: HashMap<ColKey, usize> = std.keys.iter().enumerate().map(|(j, k)| (*k, j)).collect();
    let mut base = Vec::with_capacity(std.m);
    for key in &warm.keys {
        base.push(*index.get(key)?);
    }
    let new_rows: Vec<usize> = (0..std.m).filter(|r| !warm.rows.contains(&std.row_keys[*r])).collect();
    let tolerance = feas_tol * (1.0 + std.b.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    // first try slacks/surpluses for new rows, then artificials
    for use_art in [false, true] {
        let mut target = base.clone();
        for &r in &new_rows {
            let key = std.row_keys[r];
            let col = match (std.row_rel[r], use_art) {
                (Relation::Le, _) => ColKey::Slack(key),
                (Relation::Ge, false) => ColKey::Surplus(key),
                (Relation::Ge, true) | (Relation::Eq, _) => ColKey::Art(key),
            };
            target.push(index[&col]);
        }
        if let Some(tab) = Tableau::install(std, &target) {
            if (0..tab.m).all(|r| tab.rhs(r) >= -tolerance) {
                return Some(tab);
            }
        }
    }
    None
}

fn solve_inner(lp: &LinearProgram, warm: Option<&WarmBasis>) -> Result<(LpSolution, Option<WarmBasis>)> {
    let Some(std) = Standard::build(lp) else {
        return Ok(non_optimal(lp, LpStatus::Infeasible, 0));
    };
    let opts = lp.options;
    let size = std.m + std.ncols;
    let mut driver = Driver {
        opts,
        iterations: 0,
        max_iterations: opts.max_iterations.unwrap_or(50 * size + 1000),
        degenerate: 0,
        bland_after: 5 * size,
    };
    let bmax = std.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tolerance = opts.feas_tol * (1.0 + bmax);

    let warm_tab = warm.and_then(|w| warm_tableau(&std, w, opts.feas_tol));
    let warm_started = warm_tab.is_some();
    let mut tab = warm_tab.unwrap_or_else(|| Tableau::initial(&std));
    let mut barred: Vec<bool> = (0..std.ncols).map(|j| std.is_art[j] && !tab.is_basic[j]).collect();

    let art_load =
        |tab: &Tableau| -> f64 { (0..tab.m).filter(|&r| std.is_art[tab.basis[r]]).map(|r| tab.rhs(r).max(0.0)).sum() };
    if art_load(&tab) > tolerance {
        let phase_one: Vec<f64> = std.is_art.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.set_costs(&phase_one);
        driver.run(&mut tab, &mut barred, &std.is_art)?;
        if art_load(&tab) > tolerance {
            return Ok(non_optimal(lp, LpStatus::Infeasible, driver.iterations));
        }
    }
    // drive zero-level artificials out of the basis where possible
    for r in 0..tab.m {
        if !std.is_art[tab.basis[r]] {
            continue;
        }
        let pick = (0..std.ncols)
            .filter(|&j| !std.is_art[j] && !tab.is_basic[j])
            .max_by(|&a, &b| tab.rows[r][a].abs().total_cmp(&tab.rows[r][b].abs()));
        if let Some(j) = pick.filter(|&j| tab.rows[r][j].abs() > opts.pivot_tol) {
            tab.pivot(r, j);
            driver.iterations += 1;
        }
    }
    barred.iter_mut().zip(&std.is_art).for_each(|(b, &a)| *b = a);

    tab.set_costs(&std.cost);
    let mut refactors = 0;
    loop {
        if let PhaseEnd::Unbounded = driver.run(&mut tab, &mut barred, &std.is_art)? {
            return Ok(non_optimal(lp, LpStatus::Unbounded, driver.iterations));
        }
        // rebuild from the original data to shed accumulated rounding
        tab = Tableau::install(&std, &tab.basis.clone())
            .ok_or_else(|| Error::NumericalBreakdown("final basis is singular".into()))?;
        tab.set_costs(&std.cost);
        let clean = (0..std.ncols).all(|j| barred[j] || tab.is_basic[j] || tab.d[j] >= -opts.opt_tol);
        refactors += 1;
        if clean || refactors >= MAX_REFACTORS {
            break;
        }
    }
    if let Some(r) = (0..tab.m).find(|&r| tab.rhs(r) < -tolerance) {
        return Err(Error::NumericalBreakdown(format!("basic variable {r} is negative after refactoring")));
    }

    let mut xs = vec![0.0; std.ncols];
    for r in 0..tab.m {
        xs[tab.basis[r]] = tab.rhs(r);
    }
    let primal: Vec<f64> =
        std.vars.iter().map(|v| v.shift + v.pos_sign * xs[v.pos] - v.neg.map_or(0.0, |c| xs[c])).collect();
    let objective = lp.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();

    let out_sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut duals = vec![0.0; lp.num_rows()];
    for r in 0..std.m {
        if let RowKey::Orig(i) = std.row_keys[r] {
            let col = std.identity[r];
            let y: f64 = (0..tab.m).map(|k| std.cost[tab.basis[k]] * tab.rows[k][col]).sum();
            duals[i] = out_sign * std.row_sign[r] * y;
        }
    }
    let reduced_costs = (0..lp.num_vars())
        .map(|j| lp.objective[j] - lp.rows.iter().zip(&duals).map(|(row, y)| y * row.coeffs[j]).sum::<f64>())
        .collect();

    let basis = WarmBasis {
        keys: tab.basis.iter().map(|&c| std.keys[c]).collect(),
        rows: std.row_keys.iter().copied().collect(),
    };
    let sol = LpSolution {
        status: LpStatus::Optimal,
        objective,
        primal,
        duals,
        reduced_costs,
        iterations: driver.iterations,
        warm_started,
    };
    Ok((sol, Some(basis)))
}
