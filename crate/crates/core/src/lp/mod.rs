//! Dense two-phase simplex with dual extraction and warm starts.
//!
//! Duals are reported as shadow prices: `duals[i]` is the rate of change of
//! the optimal objective per unit increase of row `i`'s right-hand side. In
//! a maximisation that makes `<=` rows nonnegative and `>=` rows
//! nonpositive; in a minimisation the signs flip.

mod format;
mod monitor;
mod simplex;

use crate::error::{Error, Result};

pub use monitor::{duality_monitor, DualityMonitor, MonitorSnapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NONNEGATIVE: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn boxed(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::NONNEGATIVE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Smallest tableau entry accepted as a pivot.
    pub pivot_tol: f64,
    /// Primal feasibility tolerance.
    pub feas_tol: f64,
    /// Reduced-cost optimality tolerance.
    pub opt_tol: f64,
    /// Iteration cap; `None` picks one from the problem size.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { pivot_tol: 1e-9, feas_tol: 1e-8, opt_tol: 1e-9, max_iterations: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the problem's own sense; meaningless unless
    /// `status == Optimal`.
    pub objective: f64,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    /// `c_j - sum_i duals_i a_ij`.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// Whether the solve started from the previous optimal basis.
    pub warm_started: bool,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Optimality residuals of a solution against its program.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
    /// `|primal objective - dual objective|`.
    pub duality_gap: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    bounds: Vec<Bounds>,
    rows: Vec<Constraint>,
    options: SimplexOptions,
    warm: Option<simplex::WarmBasis>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            bounds: Vec::new(),
            rows: Vec::new(),
            options: SimplexOptions::default(),
            warm: None,
        }
    }

    pub fn with_options(mut self, options: SimplexOptions) -> Self {
        self.options = options;
        self
    }

    pub fn options(&self) -> SimplexOptions {
        self.options
    }

    pub fn set_options(&mut self, options: SimplexOptions) {
        self.options = options;
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    /// Adds a variable with zero coefficients in all existing rows.
    pub fn add_variable(&mut self, cost: f64, bounds: Bounds) -> usize {
        for row in &mut self.rows {
            row.coeffs.push(0.0);
        }
        self.objective.push(cost);
        self.bounds.push(bounds);
        self.objective.len() - 1
    }

    /// Adds a variable with the given coefficient in each existing row.
    pub fn add_column(&mut self, cost: f64, column: &[f64], bounds: Bounds) -> Result<usize> {
        if column.len() != self.rows.len() {
            return Err(Error::dims(self.rows.len(), column.len()));
        }
        check_finite(column.iter().copied().chain([cost]))?;
        for (row, &a) in self.rows.iter_mut().zip(column) {
            row.coeffs.push(a);
        }
        self.objective.push(cost);
        self.bounds.push(bounds);
        Ok(self.objective.len() - 1)
    }

    pub fn add_row(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) -> Result<usize> {
        if coeffs.len() != self.objective.len() {
            return Err(Error::dims(self.objective.len(), coeffs.len()));
        }
        check_finite(coeffs.iter().copied().chain([rhs]))?;
        self.rows.push(Constraint { coeffs: coeffs.to_vec(), relation, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Sparse form of [`add_row`](Self::add_row).
    pub fn add_row_sparse(&mut self, entries: &[(usize, f64)], relation: Relation, rhs: f64) -> Result<usize> {
        let mut coeffs = vec![0.0; self.objective.len()];
        for &(j, a) in entries {
            if j >= coeffs.len() {
                return Err(Error::dims(coeffs.len(), j + 1));
            }
            coeffs[j] += a;
        }
        self.add_row(&coeffs, relation, rhs)
    }

    pub fn set_objective(&mut self, costs: &[f64]) -> Result<()> {
        if costs.len() != self.objective.len() {
            return Err(Error::dims(self.objective.len(), costs.len()));
        }
        check_finite(costs.iter().copied())?;
        self.objective = costs.to_vec();
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) {
        self.bounds[var] = bounds;
    }

    /// Forgets the stored basis so the next solve starts cold.
    pub fn clear_warm_start(&mut self) {
        self.warm = None;
    }

    /// Solves from the previous optimal basis when one is stored and still
    /// usable, else from scratch. Stores the final basis on success.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let (solution, basis) = simplex::solve(self, self.warm.as_ref())?;
        self.warm = basis;
        Ok(solution)
    }

    /// Checks a solution's optimality conditions against this program.
    pub fn residuals(&self, sol: &LpSolution) -> Residuals {
        let mut res = Residuals::default();
        let x = &sol.primal;
        let ax = |row: &Constraint| row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        let mut dual_obj = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let lhs = ax(row);
            let violation = match row.relation {
                Relation::Le => (lhs - row.rhs).max(0.0),
                Relation::Ge => (row.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            res.primal_infeasibility = res.primal_infeasibility.max(violation);
            let y = sol.duals[i];
            // shadow-price sign conventions
            let wrong_sign = match (self.sense, row.relation) {
                (_, Relation::Eq) => 0.0,
                (Sense::Maximize, Relation::Le) | (Sense::Minimize, Relation::Ge) => (-y).max(0.0),
                (Sense::Maximize, Relation::Ge) | (Sense::Minimize, Relation::Le) => y.max(0.0),
            };
            res.dual_infeasibility = res.dual_infeasibility.max(wrong_sign);
            res.complementarity = res.complementarity.max((y * (row.rhs - lhs)).abs());
            dual_obj += y * row.rhs;
        }
        for (j, b) in self.bounds.iter().enumerate() {
            let d = sol.reduced_costs[j];
            res.primal_infeasibility =
                res.primal_infeasibility.max((b.lower - x[j]).max(0.0)).max((x[j] - b.upper).max(0.0));
            if d.abs() <= 1e-12 {
                continue;
            }
            let wants_upper = (d > 0.0) == (self.sense == Sense::Maximize);
            let bound = if wants_upper { b.upper } else { b.lower };
            if bound.is_finite() {
                dual_obj += d * bound;
                res.complementarity = res.complementarity.max((d * (x[j] - bound)).abs());
            } else {
                res.dual_infeasibility = res.dual_infeasibility.max(d.abs());
                dual_obj += d * x[j];
            }
        }
        res.duality_gap = (sol.objective - dual_obj).abs();
        res
    }

    /// Text dump in CPLEX LP syntax with variables `v0..` and rows `r0..`.
    pub fn to_lp_text(&self) -> String {
        format::write_lp(self)
    }
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("linear program coefficients must be finite".into()));
    }
    Ok(())
}

/// Cold solve of a program that is not kept for re-solving.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    simplex::solve(lp, None).map(|(sol, _)| sol)
}

#[cfg(test)]
mod tests;
