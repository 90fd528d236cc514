//! Equilibrium solvers: minimax, strong Stackelberg, the Nash family, and
//! decomposition of marginals into mixed strategies.

mod decompose;
mod minimax;
mod nash;
mod sse;

pub use decompose::decompose_marginal;
pub(crate) use minimax::minimax_value;
pub use minimax::{solve_minimax, solve_minimax_with};
pub use nash::{
    apply_transform, ne_utility_coefficients, separate_defbest, solve_ne_any, solve_ne_extremal, solve_ne_with_utility,
    NashContext, NeUtilityCoefficients, TransformedAttacker, ViolatedRow,
};
pub use sse::{solve_sse, solve_sse_with};

use std::fmt;

use crate::colgen::ColGenTrace;
use crate::error::Result;
use crate::game::{AttackerMixed, Marginal, MixedStrategy, PureStrategy, SecurityGame};

/// Attacker payoffs closer than this are treated as ties.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    Minimax,
    Sse,
    NeAny,
    NeBest,
    NeWorst,
    NeTarget,
}

impl EquilibriumKind {
    pub const ALL: [EquilibriumKind; 6] = [
        EquilibriumKind::Minimax,
        EquilibriumKind::Sse,
        EquilibriumKind::NeAny,
        EquilibriumKind::NeBest,
        EquilibriumKind::NeWorst,
        EquilibriumKind::NeTarget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumKind::Minimax => "minimax",
            EquilibriumKind::Sse => "sse",
            EquilibriumKind::NeAny => "ne-any",
            EquilibriumKind::NeBest => "ne-best",
            EquilibriumKind::NeWorst => "ne-worst",
            EquilibriumKind::NeTarget => "ne-target",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Best,
    Worst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Among attacker-indifferent targets, the one best for the defender.
    FavorDefender,
    LowestIndex,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Restricted-master solves across all column and cut loops.
    pub rounds: usize,
    pub columns_generated: usize,
    pub cuts_added: usize,
    /// LP_k problems that were feasible (SSE only).
    pub feasible_targets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub kind: EquilibriumKind,
    pub defender_utility: f64,
    pub attacker_utility: f64,
    /// Game value for minimax solves.
    pub value: Option<f64>,
    /// The attacked target when the attacker plays a pure strategy (SSE).
    pub attacked_target: Option<usize>,
    pub marginal: Marginal,
    pub mixed: MixedStrategy,
    pub attacker: AttackerMixed,
    pub trace: ColGenTrace,
    pub diagnostics: Diagnostics,
}

impl EquilibriumResult {
    pub(crate) fn assemble(
        game: &SecurityGame,
        kind: EquilibriumKind,
        mixed: MixedStrategy,
        attacker: AttackerMixed,
        trace: ColGenTrace,
        mut diagnostics: Diagnostics,
    ) -> Result<Self> {
        let marginal = crate::game::marginal_of(&mixed);
        let defender_utility = game.defender_utility(&marginal, &attacker)?;
        let attacker_utility = game.attacker_utility(&marginal, &attacker)?;
        diagnostics.rounds = diagnostics.rounds.max(trace.rounds());
        Ok(EquilibriumResult {
            kind,
            defender_utility,
            attacker_utility,
            value: None,
            attacked_target: None,
            marginal,
            mixed,
            attacker,
            trace,
            diagnostics,
        })
    }
}

/// Defender best response to `y`: the oracle on `w_i = y_i (r_i - c_i)`.
pub fn best_response_defender(game: &SecurityGame, y: &AttackerMixed) -> Result<PureStrategy> {
    if y.len() != game.n() {
        return Err(crate::Error::dims(game.n(), y.len()));
    }
    let w: Vec<f64> = (0..game.n()).map(|i| y.as_slice()[i] * (game.reward()[i] - game.cost()[i])).collect();
    Ok(game.oracle().best_response(&w)?.strategy)
}

/// Attacker best response to coverage `x`.
pub fn best_response_attacker(game: &SecurityGame, x: &Marginal, tie_break: TieBreak) -> Result<usize> {
    if x.len() != game.n() {
        return Err(crate::Error::dims(game.n(), x.len()));
    }
    let x = x.as_slice();
    let payoff: Vec<f64> = (0..game.n()).map(|i| game.attacker_payoff_at(i, x[i])).collect();
    let best = payoff.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * (1.0 + best.abs());
    let mut ties = (0..game.n()).filter(|&i| payoff[i] >= best - tol);
    let first = ties.next().expect("n >= 1");
    Ok(match tie_break {
        TieBreak::LowestIndex => first,
        TieBreak::FavorDefender => ties.fold(first, |acc, i| {
            if game.defender_payoff_at(i, x[i]) > game.defender_payoff_at(acc, x[acc]) {
                i
            } else {
                acc
            }
        }),
    })
}
