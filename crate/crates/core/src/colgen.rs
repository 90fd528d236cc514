//! Column-generation and cutting-plane drivers.
//!
//! Both drivers alternate between solving a restricted LP and asking an
//! oracle for the most improving column (or most violated row). Masters that
//! mix over pure strategies share [`CouplingMaster`]: one variable per known
//! strategy, tied to the rest of the model through per-target coupling rows
//! and a convexity row.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PureStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, LpSolution, LpStatus, Relation, Sense, SimplexOptions};
use crate::setsystems::DbrOracle;

/// Duals in `(-NEG_DUAL_NOISE, 0)` are treated as float noise.
pub const NEG_DUAL_NOISE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColGenConfig {
    /// Columns (or cuts) must improve by more than this to be added.
    pub reduced_cost_tol: f64,
    /// Round limit; `None` means `10 n + 1000`.
    pub max_iterations: Option<usize>,
}

impl Default for ColGenConfig {
    fn default() -> Self {
        ColGenConfig { reduced_cost_tol: 1e-7, max_iterations: None }
    }
}

impl ColGenConfig {
    pub fn with_tolerance(tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
        }
        Ok(ColGenConfig { reduced_cost_tol: tol, ..Default::default() })
    }

    pub fn iteration_limit(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n + 1000)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    /// Reduced cost of the priced column, or violation of the separated row.
    pub pricing_value: f64,
    pub added: Option<PureStrategy>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColGenTrace {
    pub records: Vec<TraceRecord>,
}

impl ColGenTrace {
    pub fn rounds(&self) -> usize {
        self.records.len()
    }

    pub fn columns_added(&self) -> usize {
        self.records.iter().filter(|r| r.added.is_some()).count()
    }

    pub fn extend(&mut self, other: ColGenTrace) {
        let offset = self.records.len();
        self.records.extend(other.records.into_iter().map(|mut r| {
            r.iteration += offset;
            r
        }));
    }

    /// One JSON object per line: iteration, objective, pricing value.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{{\"iteration\":{},\"objective\":{},\"pricing_value\":{}}}",
                r.iteration,
                json_number(r.objective),
                json_number(r.pricing_value)
            );
        }
        out
    }
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "null".into()
    }
}

/// A column priced by the oracle together with its reduced-cost gain
/// (positive means the column improves the master).
#[derive(Debug, Clone, PartialEq)]
pub struct Priced {
    pub strategy: PureStrategy,
    pub gain: f64,
}

pub trait ColumnMaster {
    fn lp_mut(&mut self) -> &mut LinearProgram;
    fn contains(&self, e: &PureStrategy) -> bool;
    fn add_strategy(&mut self, e: &PureStrategy) -> Result<()>;
}

fn status_error(status: LpStatus) -> Error {
    Error::LpStatus(match status {
        LpStatus::Infeasible => "infeasible",
        LpStatus::Unbounded => "unbounded",
        LpStatus::Optimal => "optimal",
    })
}

/// Solves the restricted master, prices a column, and adds it while its gain
/// exceeds the tolerance. A priced column that is already present signals
/// numerical trouble: the master is re-solved once from scratch with a
/// tighter pivot tolerance before giving up.
pub fn run_column_generation<M: ColumnMaster>(
    master: &mut M,
    mut pricer: impl FnMut(&M, &LpSolution) -> Result<Priced>,
    config: &ColGenConfig,
    n: usize,
) -> Result<(LpSolution, ColGenTrace)> {
    let limit = config.iteration_limit(n);
    let mut trace = ColGenTrace::default();
    let mut retried = false;
    for iteration in 0..limit {
        let sol = master.lp_mut().solve()?;
        if !sol.is_optimal() {
            return Err(status_error(sol.status));
        }
        let priced = pricer(master, &sol)?;
        let improving = priced.gain > config.reduced_cost_tol;
        let mut record = TraceRecord { iteration, objective: sol.objective, pricing_value: priced.gain, added: None };
        if !improving {
            trace.records.push(record);
            return Ok((sol, trace));
        }
        if master.contains(&priced.strategy) {
            trace.records.push(record);
            if retried {
                return Err(Error::NumericalBreakdown(format!(
                    "pricing returned known column {} with gain {:.3e}",
                    priced.strategy.bit_string(),
                    priced.gain
                )));
            }
            retried = true;
            let lp = master.lp_mut();
            lp.clear_warm_start();
            lp.set_options(SimplexOptions { pivot_tol: 1e-11, ..lp.options() });
            continue;
        }
        master.add_strategy(&priced.strategy)?;
        record.added = Some(priced.strategy);
        trace.records.push(record);
    }
    let best = master.lp_mut().solve().ok().map(Box::new);
    Err(Error::IterationLimit { iterations: limit, best })
}

/// A row found violated by a separation oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
    pub violation: f64,
}

/// Solves, asks the separator for a violated row, adds it, and repeats until
/// no row is violated by more than the tolerance. A cut that leaves the
/// solution unchanged is one the LP already counts as satisfied within its
/// feasibility tolerance; separation stops there instead of re-finding it.
pub fn run_cut_generation(
    lp: &mut LinearProgram,
    mut separator: impl FnMut(&LpSolution) -> Result<Option<Cut>>,
    config: &ColGenConfig,
    n: usize,
) -> Result<(LpSolution, ColGenTrace)> {
    let limit = config.iteration_limit(n);
    let mut trace = ColGenTrace::default();
    let mut previous: Option<Vec<f64>> = None;
    for iteration in 0..limit {
        let sol = lp.solve()?;
        if !sol.is_optimal() {
            return Err(status_error(sol.status));
        }
        if previous.as_ref().is_some_and(|p| same_point(p, &sol.primal)) {
            log::debug!("cut at iteration {iteration} did not move the solution; stopping");
            return Ok((sol, trace));
        }
        previous = Some(sol.primal.clone());
        let cut = separator(&sol)?.filter(|c| c.violation > config.reduced_cost_tol);
        let violation = cut.as_ref().map_or(0.0, |c| c.violation);
        trace.records.push(TraceRecord { iteration, objective: sol.objective, pricing_value: violation, added: None });
        match cut {
            None => return Ok((sol, trace)),
            Some(cut) => {
                lp.add_row(&cut.coeffs, cut.relation, cut.rhs)?;
            }
        }
    }
    let best = lp.solve().ok().map(Box::new);
    Err(Error::IterationLimit { iterations: limit, best })
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()))
}

/// Restricted master over strategy columns `p_e >= 0`. Each target `i` owns
/// a coupling row whose `p` coefficients are `sign * e_i`; the convexity row
/// is `sum_e p_e = 1`.
#[derive(Debug, Clone)]
pub struct CouplingMaster {
    pub lp: LinearProgram,
    coupling_rows: Vec<usize>,
    coupling_sign: f64,
    convexity_row: usize,
    columns: Vec<(PureStrategy, usize)>,
    known: HashSet<PureStrategy>,
}

impl CouplingMaster {
    /// `coupling_rows` must already exist in `lp`; the convexity row is
    /// appended here.
    pub fn new(mut lp: LinearProgram, coupling_rows: Vec<usize>, coupling_sign: f64) -> Result<Self> {
        let convexity_row = lp.add_row(&vec![0.0; lp.num_vars()], Relation::Eq, 1.0)?;
        Ok(CouplingMaster {
            lp,
            coupling_rows,
            coupling_sign,
            convexity_row,
            columns: Vec::new(),
            known: HashSet::new(),
        })
    }

    pub fn coupling_rows(&self) -> &[usize] {
        &self.coupling_rows
    }

    pub fn convexity_row(&self) -> usize {
        self.convexity_row
    }

    pub fn strategies(&self) -> impl Iterator<Item = &PureStrategy> {
        self.columns.iter().map(|(e, _)| e)
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Duals of the coupling rows.
    pub fn coupling_duals(&self, sol: &LpSolution) -> Vec<f64> {
        self.coupling_rows.iter().map(|&r| sol.duals[r]).collect()
    }

    /// Prices by the oracle on the coupling duals. The reduced cost of
    /// `p_e` is `-(sign sigma . e + pi)`; improving means positive in a
    /// maximisation and negative in a minimisation.
    pub fn price(&self, oracle: &dyn DbrOracle, sol: &LpSolution) -> Result<Priced> {
        let sigma = self.coupling_duals(sol);
        let pi = sol.duals[self.convexity_row];
        let (w, offset): (Vec<f64>, f64) = match self.lp.sense() {
            Sense::Maximize => (sigma.iter().map(|s| -self.coupling_sign * s).collect(), -pi),
            Sense::Minimize => (sigma.iter().map(|s| self.coupling_sign * s).collect(), pi),
        };
        let answer = oracle.best_response(&w)?;
        Ok(Priced { gain: answer.value + offset, strategy: answer.strategy })
    }

    /// The mixed strategy carried by the `p` variables of a solution.
    pub fn mixed_strategy(&self, sol: &LpSolution) -> Result<MixedStrategy> {
        let mut support: Vec<(PureStrategy, f64)> = self
            .columns
            .iter()
            .filter_map(|(e, j)| {
                let p = sol.primal[*j];
                (p > 1e-12).then(|| (e.clone(), p))
            })
            .collect();
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if !(total > 0.5) {
            return Err(Error::NumericalBreakdown(format!("master probabilities sum to {total}")));
        }
        support.iter_mut().for_each(|(_, p)| *p /= total);
        MixedStrategy::new(support)
    }

    /// Initial column: the empty strategy if the system has it, else a best
    /// response to all-ones weights.
    pub fn seed(&mut self, oracle: &dyn DbrOracle) -> Result<()> {
        let first = if oracle.admits_empty() {
            PureStrategy::empty(oracle.dim())
        } else {
            oracle.best_response(&vec![1.0; oracle.dim()])?.strategy
        };
        self.add_strategy(&first)
    }
}

impl ColumnMaster for CouplingMaster {
    fn lp_mut(&mut self) -> &mut LinearProgram {
        &mut self.lp
    }

    fn contains(&self, e: &PureStrategy) -> bool {
        self.known.contains(&e.clone().with_subpure(false))
    }

    fn add_strategy(&mut self, e: &PureStrategy) -> Result<()> {
        let e = e.clone().with_subpure(false);
        if !self.known.insert(e.clone()) {
            return Ok(());
        }
        let mut column = vec![0.0; self.lp.num_rows()];
        for i in e.covered() {
            column[self.coupling_rows[i]] = self.coupling_sign;
        }
        column[self.convexity_row] = 1.0;
        let j = self.lp.add_column(0.0, &column, Bounds::NONNEGATIVE)?;
        self.columns.push((e, j));
        Ok(())
    }
}

/// Clamps float-noise negatives to zero; larger negatives are logged and
/// clamped as well so the caller can still proceed.
pub fn clean_duals(y: &[f64]) -> Vec<f64> {
    y.iter()
        .map(|&v| {
            if v < -NEG_DUAL_NOISE {
                log::warn!("attacker dual {v:.3e} is structurally negative; clamping");
            }
            v.max(0.0)
        })
        .collect()
}

/// Pricing step of the maximin master: weights `w_i = y_i (r_i - c_i)` from
/// the attacker-row duals `y`, compared with the convexity dual. Returns the
/// best response when its reduced cost exceeds `tol`.
pub fn price_minimax_column(
    game: &SecurityGame,
    y: &[f64],
    convexity_dual: f64,
    tol: f64,
) -> Result<Option<PureStrategy>> {
    let priced = price_minimax(game, y, convexity_dual)?;
    Ok((priced.gain > tol).then_some(priced.strategy))
}

pub(crate) fn price_minimax(game: &SecurityGame, y: &[f64], convexity_dual: f64) -> Result<Priced> {
    if y.len() != game.n() {
        return Err(Error::dims(game.n(), y.len()));
    }
    let y = clean_duals(y);
    let w: Vec<f64> = (0..game.n()).map(|i| y[i] * (game.reward()[i] - game.cost()[i])).collect();
    let answer = game.oracle().best_response(&w)?;
    Ok(Priced { gain: answer.value - convexity_dual, strategy: answer.strategy })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::game::Payoffs;
    use crate::setsystems::{Explicit, UniformMatroid};

    fn g2() -> SecurityGame {
        let payoffs = Payoffs::new(vec![1., 1.], vec![0., 0.], vec![0., 0.], vec![-1., -1.]);
        SecurityGame::new(payoffs, Arc::new(UniformMatroid::new(2, 1).unwrap())).unwrap()
    }

    #[test]
    fn symmetric_pricing_breaks_ties_low() {
        let col = price_minimax_column(&g2(), &[0.5, 0.5], 0.0, 1e-7).unwrap();
        assert_eq!(col.unwrap().bit_string(), "10");
        assert_eq!(price_minimax_column(&g2(), &[0.0, 0.0], 0.0, 1e-7).unwrap(), None);
    }

    #[test]
    fn noise_duals_are_clamped() {
        assert_eq!(clean_duals(&[-1e-12, 0.5]), vec![0.0, 0.5]);
    }

    /// Max sum_e p_e (v . e) over an explicit system: the best column wins.
    struct ValueMaster {
        inner: CouplingMaster,
    }

    impl ColumnMaster for ValueMaster {
        fn lp_mut(&mut self) -> &mut LinearProgram {
            &mut self.inner.lp
        }
        fn contains(&self, e: &PureStrategy) -> bool {
            self.inner.contains(e)
        }
        fn add_strategy(&mut self, e: &PureStrategy) -> Result<()> {
            self.inner.add_strategy(e)
        }
    }

    fn explicit(rows: &[&[u8]]) -> Explicit {
        Explicit::new(rows.iter().map(|r| PureStrategy::from_01(r).unwrap()).collect()).unwrap()
    }

    fn value_master(values: &[f64]) -> ValueMaster {
        // x_i free with objective v_i, coupling rows x_i - sum p e_i = 0
        let mut lp = LinearProgram::new(Sense::Maximize);
        for &v in values {
            lp.add_variable(v, Bounds::FREE);
        }
        let rows = (0..values.len()).map(|i| lp.add_row_sparse(&[(i, 1.0)], Relation::Eq, 0.0).unwrap()).collect();
        ValueMaster { inner: CouplingMaster::new(lp, rows, -1.0).unwrap() }
    }

    #[test]
    fn converges_within_system_size() {
        let system = explicit(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let mut master = value_master(&[1.0, 2.0, 2.5]);
        master.inner.add_strategy(&PureStrategy::from_01(&[1, 0, 0]).unwrap()).unwrap();
        let (sol, trace) =
            run_column_generation(&mut master, |m, s| m.inner.price(&system, s), &ColGenConfig::default(), 3).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!(trace.rounds() <= 4);
        assert!(trace.records.windows(2).all(|w| w[1].objective >= w[0].objective - 1e-12));
        assert!(trace.to_lines().lines().count() == trace.rounds());
    }

    #[test]
    fn optimal_seed_needs_one_round() {
        let system = explicit(&[&[1, 0], &[0, 1]]);
        let mut master = value_master(&[1.0, 2.0]);
        master.inner.add_strategy(&PureStrategy::from_01(&[0, 1]).unwrap()).unwrap();
        let (_, trace) =
            run_column_generation(&mut master, |m, s| m.inner.price(&system, s), &ColGenConfig::default(), 2).unwrap();
        assert_eq!(trace.rounds(), 1);
        assert_eq!(trace.columns_added(), 0);
    }

    #[test]
    fn iteration_limit_reports_best_so_far() {
        let system = explicit(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let mut master = value_master(&[1.0, 2.0, 3.0]);
        master.inner.add_strategy(&PureStrategy::from_01(&[1, 0, 0]).unwrap()).unwrap();
        let config = ColGenConfig { max_iterations: Some(1), ..Default::default() };
        match run_column_generation(&mut master, |m, s| m.inner.price(&system, s), &config, 3) {
            Err(Error::IterationLimit { iterations: 1, best: Some(best) }) => assert!(best.objective >= 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn implied_rows_need_no_cuts() {
        // max y s.t. y <= 1; separator offers y <= 5, never violated
        let mut lp = LinearProgram::new(Sense::Maximize);
        lp.add_variable(1.0, Bounds::NONNEGATIVE);
        lp.add_row(&[1.0], Relation::Le, 1.0).unwrap();
        let (sol, trace) = run_cut_generation(
            &mut lp,
            |s| Ok(Some(Cut { coeffs: vec![1.0], relation: Relation::Le, rhs: 5.0, violation: s.primal[0] - 5.0 })),
            &ColGenConfig::default(),
            1,
        )
        .unwrap();
        assert_eq!(sol.objective, 1.0);
        assert_eq!(trace.rounds(), 1);
    }

    #[test]
    fn finite_row_family_bounds_cut_count() {
        // max y1 + y2 s.t. y1 + y2 <= 10 plus implicit rows y_i <= i + 1
        let mut lp = LinearProgram::new(Sense::Maximize);
        lp.add_variable(1.0, Bounds::NONNEGATIVE);
        lp.add_variable(1.0, Bounds::NONNEGATIVE);
        lp.add_row(&[1.0, 1.0], Relation::Le, 10.0).unwrap();
        let (sol, trace) = run_cut_generation(
            &mut lp,
            |s| {
                Ok((0..2).find(|&i| s.primal[i] > i as f64 + 1.0 + 1e-9).map(|i| {
                    let mut coeffs = vec![0.0; 2];
                    coeffs[i] = 1.0;
                    Cut { coeffs, relation: Relation::Le, rhs: i as f64 + 1.0, violation: s.primal[i] - i as f64 - 1.0 }
                }))
            },
            &ColGenConfig::default(),
            2,
        )
        .unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!(trace.rounds() - 1 <= 2);
    }
}
