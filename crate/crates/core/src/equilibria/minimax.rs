use super::{Diagnostics, EquilibriumKind, EquilibriumResult};
use crate::colgen::{price_minimax, run_column_generation, ColGenConfig, ColGenTrace, CouplingMaster};
use crate::error::{Error, Result};
use crate::game::{AttackerMixed, MixedStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, Relation, Sense};

pub(crate) struct MinimaxOutcome {
    pub value: f64,
    pub mixed: MixedStrategy,
    pub attacker: AttackerMixed,
    pub trace: ColGenTrace,
    pub columns: usize,
}

/// Maximin master: `max u` s.t. `u - (r_i - c_i) x_i <= c_i` (duals are the
/// attacker's minimax strategy), `x_i - sum_e p_e e_i = 0`, `sum_e p_e = 1`.
/// The `x_i` are free so that the coupling duals equal `y_i (r_i - c_i)`.
/// Payoffs are used as given; the caller decides whether the game is
/// zero-sum.
pub(crate) fn minimax_core(game: &SecurityGame, config: &ColGenConfig) -> Result<MinimaxOutcome> {
    let n = game.n();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let u = lp.add_variable(1.0, Bounds::FREE);
    let xs: Vec<usize> = (0..n).map(|_| lp.add_variable(0.0, Bounds::FREE)).collect();
    let attacker_rows: Vec<usize> = (0..n)
        .map(|i| {
            lp.add_row_sparse(&[(u, 1.0), (xs[i], -(game.reward()[i] - game.cost()[i]))], Relation::Le, game.cost()[i])
        })
        .collect::<Result<_>>()?;
    let coupling: Vec<usize> =
        (0..n).map(|i| lp.add_row_sparse(&[(xs[i], 1.0)], Relation::Eq, 0.0)).collect::<Result<_>>()?;
    let mut master = CouplingMaster::new(lp, coupling, -1.0)?;
    master.seed(game.oracle())?;
    let seeded = master.num_columns();

    let (sol, trace) = run_column_generation(
        &mut master,
        |m, sol| {
            let y: Vec<f64> = attacker_rows.iter().map(|&r| sol.duals[r]).collect();
            price_minimax(game, &y, sol.duals[m.convexity_row()])
        },
        config,
        n,
    )?;
    let y: Vec<f64> = attacker_rows.iter().map(|&r| sol.duals[r]).collect();
    Ok(MinimaxOutcome {
        value: sol.objective,
        mixed: master.mixed_strategy(&sol)?,
        attacker: AttackerMixed::from_solver(y)?,
        trace,
        columns: master.num_columns() - seeded,
    })
}

/// Value of the maximin program, with no zero-sum check.
pub(crate) fn minimax_value(game: &SecurityGame, config: &ColGenConfig) -> Result<f64> {
    Ok(minimax_core(game, config)?.value)
}

pub fn solve_minimax(game: &SecurityGame) -> Result<EquilibriumResult> {
    solve_minimax_with(game, &ColGenConfig::default())
}

/// Minimax equilibrium of a zero-sum game by column generation over the
/// defender's pure strategies.
pub fn solve_minimax_with(game: &SecurityGame, config: &ColGenConfig) -> Result<EquilibriumResult> {
    if !game.is_zero_sum() {
        return Err(Error::NotZeroSum);
    }
    let out = minimax_core(game, config)?;
    let diagnostics = Diagnostics { columns_generated: out.columns, ..Default::default() };
    let mut result =
        EquilibriumResult::assemble(game, EquilibriumKind::Minimax, out.mixed, out.attacker, out.trace, diagnostics)?;
    result.value = Some(out.value);
    Ok(result)
}
