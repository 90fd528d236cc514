//! Nash equilibria through the zero-sum companion game.
//!
//! A minimax equilibrium `(x, y_hat)` of the companion maps to a Nash
//! equilibrium `(x, y)` of the original game by inverting the attacker
//! transform `f`. Nash equilibria are interchangeable, so `x` pairs with
//! every attacker equilibrium strategy; those form a polytope over which
//! the defender's utility is linear, giving best and worst equilibria by LP.

use super::minimax::minimax_core;
use super::{Diagnostics, EquilibriumKind, EquilibriumResult, Extremum, TIE_TOL};
use crate::colgen::{run_cut_generation, ColGenConfig, ColGenTrace, Cut};
use crate::error::{Error, Result};
use crate::game::{AttackerMixed, Marginal, MixedStrategy, PureStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, LpSolution, Relation, Sense};

/// Defender-best-response rows are relaxed by this much so that float noise
/// in `x` cannot empty a singleton equilibrium set.
const DEFBEST_SLACK: f64 = 1e-9;
/// Separation stops once no row is violated by more than this.
const SEPARATION_TOL: f64 = 1e-9;
/// Requested utilities may overshoot the equilibrium range by this much.
const UTILITY_RANGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedAttacker {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub lambda: f64,
}

/// `f_i(y) = ratio_i y_i / lambda` with `ratio_i = (r_i - c_i) / (rho_i - zeta_i)`
/// and `lambda = sum_i ratio_i y_i`.
pub fn apply_transform(game: &SecurityGame, y: &AttackerMixed) -> Result<TransformedAttacker> {
    if y.len() != game.n() {
        return Err(Error::dims(game.n(), y.len()));
    }
    let scaled: Vec<f64> = y.as_slice().iter().enumerate().map(|(i, &v)| game.transform_ratio(i) * v).collect();
    let lambda: f64 = scaled.iter().sum();
    Ok(TransformedAttacker {
        input: y.as_slice().to_vec(),
        output: scaled.iter().map(|v| v / lambda).collect(),
        lambda,
    })
}

/// Inverse of [`apply_transform`]: `y_i` proportional to `y_hat_i / ratio_i`.
fn invert_transform(game: &SecurityGame, y_hat: &AttackerMixed) -> Result<AttackerMixed> {
    let raw: Vec<f64> = y_hat.as_slice().iter().enumerate().map(|(i, &v)| v / game.transform_ratio(i)).collect();
    let total: f64 = raw.iter().sum();
    AttackerMixed::from_solver(raw.into_iter().map(|v| v / total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeUtilityCoefficients {
    pub gamma: Vec<f64>,
    pub val_bar: f64,
}

impl NeUtilityCoefficients {
    pub fn utility(&self, y: &[f64]) -> f64 {
        self.gamma.iter().zip(y).map(|(g, v)| g * v).sum()
    }
}

/// `gamma_i = c_i + ratio_i (val_bar + rho_i)`: the defender's equilibrium
/// utility is `gamma . y` for every attacker equilibrium strategy `y`.
pub fn ne_utility_coefficients(game: &SecurityGame, val_bar: f64) -> NeUtilityCoefficients {
    let gamma =
        (0..game.n()).map(|i| game.cost()[i] + game.transform_ratio(i) * (val_bar + game.att_reward()[i])).collect();
    NeUtilityCoefficients { gamma, val_bar }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolatedRow {
    /// Pure strategy the defender would rather play against `y`.
    pub strategy: PureStrategy,
    /// `w . e - w . x` with `w_i = y_i (r_i - c_i)`.
    pub violation: f64,
}

impl ViolatedRow {
    /// The row `sum_i y_i (r_i - c_i)(x_i - e_i) >= -slack` in `y`.
    fn cut(&self, game: &SecurityGame, x: &[f64], slack: f64) -> Cut {
        let coeffs = (0..game.n())
            .map(|i| {
                let e = if self.strategy.covers(i) { 1.0 } else { 0.0 };
                (game.reward()[i] - game.cost()[i]) * (x[i] - e)
            })
            .collect();
        Cut { coeffs, relation: Relation::Ge, rhs: -slack, violation: self.violation - slack }
    }
}

/// Checks that `x` is a defender best response to `y`: one oracle call at
/// `w_i = y_i (r_i - c_i)`. Returns the certifying strategy when its value
/// beats `w . x` by more than `tol`.
pub fn separate_defbest(game: &SecurityGame, x: &Marginal, y: &[f64], tol: f64) -> Result<Option<ViolatedRow>> {
    if x.len() != game.n() {
        return Err(Error::dims(game.n(), x.len()));
    }
    if y.len() != game.n() {
        return Err(Error::dims(game.n(), y.len()));
    }
    let w: Vec<f64> = (0..game.n()).map(|i| y[i] * (game.reward()[i] - game.cost()[i])).collect();
    let answer = game.oracle().best_response(&w)?;
    let current: f64 = w.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
    let violation = answer.value - current;
    Ok((violation > tol).then_some(ViolatedRow { strategy: answer.strategy, violation }))
}

/// Shared state for the Nash solvers: one companion minimax solve supplies
/// the defender strategy, the companion value, and an attacker equilibrium.
#[derive(Debug, Clone)]
pub struct NashContext {
    game: SecurityGame,
    config: ColGenConfig,
    mixed: MixedStrategy,
    marginal: Marginal,
    companion_attacker: AttackerMixed,
    coefficients: NeUtilityCoefficients,
    trace: ColGenTrace,
    columns: usize,
}

impl NashContext {
    pub fn new(game: &SecurityGame) -> Result<Self> {
        Self::with_config(game, &ColGenConfig::default())
    }

    pub fn with_config(game: &SecurityGame, config: &ColGenConfig) -> Result<Self> {
        let companion = game.zero_sum_companion();
        let out = minimax_core(&companion, config)?;
        let marginal = crate::game::marginal_of(&out.mixed);
        Ok(NashContext {
            game: game.clone(),
            config: *config,
            mixed: out.mixed,
            marginal,
            companion_attacker: out.attacker,
            coefficients: ne_utility_coefficients(game, out.value),
            trace: out.trace,
            columns: out.columns,
        })
    }

    /// The defender equilibrium marginal shared by every result.
    pub fn marginal(&self) -> &Marginal {
        &self.marginal
    }

    pub fn companion_attacker(&self) -> &AttackerMixed {
        &self.companion_attacker
    }

    pub fn coefficients(&self) -> &NeUtilityCoefficients {
        &self.coefficients
    }

    fn result(
        &self,
        kind: EquilibriumKind,
        attacker: AttackerMixed,
        cuts: Option<ColGenTrace>,
    ) -> Result<EquilibriumResult> {
        let mut trace = self.trace.clone();
        let mut diagnostics = Diagnostics { columns_generated: self.columns, ..Default::default() };
        if let Some(cuts) = cuts {
            diagnostics.cuts_added = cuts.rounds().saturating_sub(1);
            trace.extend(cuts);
        }
        diagnostics.rounds = trace.rounds();
        EquilibriumResult::assemble(&self.game, kind, self.mixed.clone(), attacker, trace, diagnostics)
    }

    pub fn any(&self) -> Result<EquilibriumResult> {
        let y = invert_transform(&self.game, &self.companion_attacker)?;
        self.result(EquilibriumKind::NeAny, y, None)
    }

    /// Rows (5) and (7) of the attacker equilibrium polytope; rows (6) are
    /// separated lazily. Attacker payoffs within the tie tolerance of the
    /// maximum are snapped to it, so that (5) confines `y` to the exact set
    /// of best responses rather than a float approximation of it.
    fn base_program(&self, sense: Sense) -> Result<LinearProgram> {
        let n = self.game.n();
        let x = self.marginal.as_slice();
        let a: Vec<f64> = (0..n).map(|i| self.game.attacker_payoff_at(i, x[i])).collect();
        let best = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = TIE_TOL * (1.0 + best.abs());
        let a: Vec<f64> = a.into_iter().map(|v| if v >= best - tol { best } else { v }).collect();

        let mut lp = LinearProgram::new(sense);
        for &g in &self.coefficients.gamma {
            lp.add_variable(g, Bounds::NONNEGATIVE);
        }
        for &ak in &a {
            lp.add_row(&a, Relation::Ge, ak)?;
        }
        lp.add_row(&vec![1.0; n], Relation::Eq, 1.0)?;
        Ok(lp)
    }

    fn separate(&self, lp: &mut LinearProgram) -> Result<(LpSolution, ColGenTrace)> {
        let config = ColGenConfig { reduced_cost_tol: SEPARATION_TOL, ..self.config };
        let result = run_cut_generation(
            lp,
            |sol| {
                let row = separate_defbest(&self.game, &self.marginal, &sol.primal, SEPARATION_TOL)?;
                Ok(row.map(|r| r.cut(&self.game, self.marginal.as_slice(), DEFBEST_SLACK)))
            },
            &config,
            self.game.n(),
        );
        match result {
            Err(Error::LpStatus("infeasible")) => {
                Err(Error::NumericalBreakdown("attacker equilibrium polytope came out empty".into()))
            }
            other => other,
        }
    }

    /// Best or worst equilibrium for the defender.
    pub fn extremal(&self, which: Extremum) -> Result<EquilibriumResult> {
        let (sense, kind) = match which {
            Extremum::Best => (Sense::Maximize, EquilibriumKind::NeBest),
            Extremum::Worst => (Sense::Minimize, EquilibriumKind::NeWorst),
        };
        let mut lp = self.base_program(sense)?;
        let (sol, cuts) = self.separate(&mut lp)?;
        self.result(kind, AttackerMixed::from_solver(sol.primal)?, Some(cuts))
    }

    /// An equilibrium in which the defender's utility is `target`.
    pub fn with_utility(&self, target: f64) -> Result<EquilibriumResult> {
        let best = self.extremal(Extremum::Best)?.defender_utility;
        let worst = self.extremal(Extremum::Worst)?.defender_utility;
        if !(target >= worst - UTILITY_RANGE_TOL && target <= best + UTILITY_RANGE_TOL) {
            return Err(Error::UtilityOutOfRange { requested: target, worst, best });
        }
        let target = target.clamp(worst.min(best), best.max(worst));
        let mut lp = self.base_program(Sense::Maximize)?;
        lp.add_row(&self.coefficients.gamma, Relation::Eq, target)?;
        lp.set_objective(&vec![0.0; self.game.n()])?;
        let (sol, cuts) = self.separate(&mut lp)?;
        self.result(EquilibriumKind::NeTarget, AttackerMixed::from_solver(sol.primal)?, Some(cuts))
    }
}

pub fn solve_ne_any(game: &SecurityGame) -> Result<EquilibriumResult> {
    NashContext::new(game)?.any()
}

pub fn solve_ne_extremal(game: &SecurityGame, which: Extremum) -> Result<EquilibriumResult> {
    NashContext::new(game)?.extremal(which)
}

pub fn solve_ne_with_utility(game: &SecurityGame, target: f64) -> Result<EquilibriumResult> {
    NashContext::new(game)?.with_utility(target)
}
