use super::{Diagnostics, EquilibriumKind, EquilibriumResult};
use crate::colgen::{run_column_generation, ColGenConfig, ColGenTrace, CouplingMaster};
use crate::error::{Error, Result};
use crate::game::{AttackerMixed, MixedStrategy, SecurityGame};
use crate::lp::{Bounds, LinearProgram, Relation, Sense};

/// Phase-1 slack above this means target `k` cannot be made a best response.
const INFEASIBLE_SLACK: f64 = 1e-9;
/// Objectives within this margin count as tied; the lower target wins.
const OBJECTIVE_TIE: f64 = 1e-10;
const PHASE1_TOL: f64 = 1e-11;

struct TargetSolution {
    objective: f64,
    mixed: MixedStrategy,
    trace: ColGenTrace,
    columns: usize,
}

/// LP_k: maximise the defender's payoff on `k` subject to `k` being an
/// attacker best response. A single slack `s >= 0` relaxes every incentive
/// row; phase 1 minimises it, phase 2 caps it at the phase-1 optimum and
/// switches to the real objective, keeping the generated columns.
fn solve_target(game: &SecurityGame, k: usize, config: &ColGenConfig) -> Result<Option<TargetSolution>> {
    let n = game.n();
    let (rho, zeta) = (game.att_reward(), game.att_cost());
    let mut lp = LinearProgram::new(Sense::Maximize);
    let xs: Vec<usize> = (0..n).map(|_| lp.add_variable(0.0, Bounds::FREE)).collect();
    let s = lp.add_variable(-1.0, Bounds::NONNEGATIVE);
    for i in (0..n).filter(|&i| i != k) {
        // rho_k (1 - x_k) + zeta_k x_k >= rho_i (1 - x_i) + zeta_i x_i
        lp.add_row_sparse(
            &[(xs[k], -(rho[k] - zeta[k])), (xs[i], rho[i] - zeta[i]), (s, 1.0)],
            Relation::Ge,
            rho[i] - rho[k],
        )?;
    }
    let coupling: Vec<usize> =
        (0..n).map(|i| lp.add_row_sparse(&[(xs[i], 1.0)], Relation::Eq, 0.0)).collect::<Result<_>>()?;
    let mut master = CouplingMaster::new(lp, coupling, -1.0)?;
    master.seed(game.oracle())?;
    let seeded = master.num_columns();
    let oracle = game.oracle();

    // a loose stop could leave a spurious positive slack on a feasible k
    let tight = ColGenConfig { reduced_cost_tol: config.reduced_cost_tol.min(PHASE1_TOL), ..*config };
    let (phase1, mut trace) = run_column_generation(&mut master, |m, sol| m.price(oracle, sol), &tight, n)?;
    let slack = phase1.primal[s];
    if slack > INFEASIBLE_SLACK {
        log::debug!("target {} cannot be induced (slack {slack:.3e})", k + 1);
        return Ok(None);
    }

    let mut objective = vec![0.0; master.lp.num_vars()];
    objective[xs[k]] = game.reward()[k] - game.cost()[k];
    master.lp.set_objective(&objective)?;
    master.lp.set_bounds(s, Bounds::boxed(0.0, slack.max(0.0)));
    let (phase2, trace2) = run_column_generation(&mut master, |m, sol| m.price(oracle, sol), config, n)?;
    trace.extend(trace2);
    Ok(Some(TargetSolution {
        objective: phase2.objective + game.cost()[k],
        mixed: master.mixed_strategy(&phase2)?,
        trace,
        columns: master.num_columns() - seeded,
    }))
}

pub fn solve_sse(game: &SecurityGame) -> Result<EquilibriumResult> {
    solve_sse_with(game, &ColGenConfig::default())
}

/// Strong Stackelberg equilibrium: the best of the per-target programs LP_k,
/// skipping targets that cannot be made a best response.
pub fn solve_sse_with(game: &SecurityGame, config: &ColGenConfig) -> Result<EquilibriumResult> {
    let mut best: Option<(usize, TargetSolution)> = None;
    let mut trace = ColGenTrace::default();
    let mut diagnostics = Diagnostics::default();
    for k in 0..game.n() {
        let Some(sol) = solve_target(game, k, config)? else { continue };
        diagnostics.feasible_targets.push(k);
        diagnostics.columns_generated += sol.columns;
        diagnostics.rounds += sol.trace.rounds();
        trace.extend(sol.trace.clone());
        let better = match &best {
            None => true,
            Some((_, b)) => sol.objective > b.objective + OBJECTIVE_TIE,
        };
        if better {
            best = Some((k, sol));
        }
    }
    // some target is always a best response, so LP_k is feasible for it
    let (k, sol) = best.ok_or_else(|| Error::NumericalBreakdown("every LP_k reported infeasible".into()))?;
    let mut result = EquilibriumResult::assemble(
        game,
        EquilibriumKind::Sse,
        sol.mixed,
        AttackerMixed::pure(game.n(), k),
        trace,
        diagnostics,
    )?;
    result.attacked_target = Some(k);
    Ok(result)
}
