//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any FAIL.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use secgame::equilibria::{best_response_attacker, solve_minimax, solve_sse, Extremum, NashContext, TieBreak};
use secgame::instance::{parse_instance, Instance};
use secgame::lp::duality_monitor;
use secgame::reductions::{build_kn_edge_game, kn_edges};
use secgame::setsystems::{DbrOracle, Explicit, UniformMatroid};
use secgame::verify::{
    check_decomposition, check_down_monotone, check_equilibria, check_membership, check_regularization, rng,
    CheckOutcome, ENUMERATION_LIMIT,
};
use secgame::{AttackerMixed, Marginal, Payoffs, PureStrategy, SecurityGame};

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn corpus() -> Vec<(String, Instance)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("bundled instances directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let inst = parse_instance(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (name, inst)
        })
        .collect()
}

/// Bundled instances whose E can be listed, with the listing.
fn enumerable(corpus: &[(String, Instance)]) -> Vec<(&str, &Instance, Vec<PureStrategy>)> {
    corpus
        .iter()
        .filter_map(|(name, inst)| {
            let oracle = inst.game.oracle();
            if !oracle.capabilities().enumerable {
                return None;
            }
            oracle.enumerate(ENUMERATION_LIMIT).ok().map(|e| (name.as_str(), inst, e))
        })
        .collect()
}

fn seed_of(inst: &Instance) -> u64 {
    inst.file.seed.unwrap_or(0)
}

fn near(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: {got} vs {want} (tolerance {tol:e})"))
    }
}

fn within_time(label: &str, elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("{label} took {:.3} s, budget {:.3} s", elapsed.as_secs_f64(), budget.as_secs_f64()))
    }
}

fn uniform_game(r: [f64; 2], c: [f64; 2], rho: [f64; 2], zeta: [f64; 2]) -> SecurityGame {
    let payoffs = Payoffs::new(r.to_vec(), c.to_vec(), rho.to_vec(), zeta.to_vec());
    SecurityGame::new(payoffs, Arc::new(UniformMatroid::new(2, 1).unwrap())).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn reference_values() -> Verdict {
    let budget = Duration::from_millis(100);
    let g2 = uniform_game([1., 1.], [0., 0.], [0., 0.], [-1., -1.]);
    let g2b = uniform_game([1., 1.], [0., -1.], [0., 1.], [-1., -1.]);
    let g3 = uniform_game([1., 1.], [0., 0.], [1., 2.], [0., 0.]);

    let (r, t) = timed(|| solve_minimax(&g2));
    let r = r.map_err(|e| e.to_string())?;
    near("minimax(G2)", r.value.unwrap(), 0.5, 1e-9)?;
    within_time("minimax(G2)", t, budget)?;

    let (r, t) = timed(|| solve_minimax(&g2b));
    let r = r.map_err(|e| e.to_string())?;
    near("minimax(G2b)", r.value.unwrap(), 1. / 3., 1e-8)?;
    within_time("minimax(G2b)", t, budget)?;

    let (r, t) = timed(|| solve_sse(&g3));
    let r = r.map_err(|e| e.to_string())?;
    near("sse(G3)", r.defender_utility, 2. / 3., 1e-8)?;
    if r.attacked_target != Some(1) {
        return Err(format!("sse(G3) attacked target {:?}, want target 2", r.attacked_target.map(|k| k + 1)));
    }
    within_time("sse(G3)", t, budget)?;

    let (r, t) = timed(|| NashContext::new(&g3).and_then(|c| c.any()));
    let r = r.map_err(|e| e.to_string())?;
    near("ne-any(G3) defender", r.defender_utility, 0.5, 1e-8)?;
    near("ne-any(G3) attacker", r.attacker_utility, 2. / 3., 1e-8)?;
    within_time("ne-any(G3)", t, budget)?;
    Ok("G2 = 1/2, G2b = 1/3, SSE(G3) = 2/3 at target 2, NE-any(G3) = (1/2, 2/3)".into())
}

fn kn_edge_values() -> Verdict {
    let start = Instant::now();
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for n in 3..=7 {
        for k in 1..n {
            let (game, want) = build_kn_edge_game(n, k).map_err(|e| e.to_string())?;
            let r = solve_minimax(&game).map_err(|e| format!("n = {n}, k = {k}: {e}"))?;
            let value = r.value.unwrap();
            near(&format!("K_{n}, k = {k}"), value, want, 1e-6)?;
            worst = worst.max((value - want).abs());

            // uniform k-subset of vertices: every edge is touched with
            // probability `want`, which must guarantee the value against
            // every target and hence against the solver's attacker strategy
            let x = Marginal::new(vec![want; kn_edges(n).len()]).map_err(|e| e.to_string())?;
            let guaranteed =
                (0..game.n()).map(|i| game.defender_payoff_at(i, x.as_slice()[i])).fold(f64::INFINITY, f64::min);
            near(&format!("K_{n}, k = {k} uniform guarantee"), guaranteed, value, 1e-6)?;
            let against = game.defender_utility(&x, &r.attacker).map_err(|e| e.to_string())?;
            near(&format!("K_{n}, k = {k} uniform vs solver attacker"), against, value, 1e-6)?;
            cases += 1;
        }
    }
    within_time("K_n sweep", start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{cases} (n, k) pairs, worst error {worst:.2e}"))
}

fn failures(outcomes: &[CheckOutcome], instance: &str) -> Vec<String> {
    outcomes.iter().filter(|o| !o.passed()).map(|o| format!("{instance}: {o}")).collect()
}

fn verdict(failed: Vec<String>, ok: String) -> Verdict {
    match failed.first() {
        None => Ok(ok),
        Some(first) => Err(format!("{} failure(s); first: {first}", failed.len())),
    }
}

fn oracle_equivalence(corpus: &[(String, Instance)]) -> Verdict {
    let start = Instant::now();
    let listed = enumerable(corpus);
    let kinds: BTreeSet<&str> = listed.iter().map(|(_, inst, _)| inst.game.oracle().kind()).collect();
    if kinds.len() < 6 {
        return Err(format!("only {} set-system kinds among enumerable instances: {kinds:?}", kinds.len()));
    }
    let mut failed = Vec::new();
    for (name, inst, strategies) in &listed {
        failed.extend(failures(&check_equilibria(&inst.game, strategies), name));
    }
    within_time("oracle equivalence suite", start.elapsed(), Duration::from_secs(30))?;
    verdict(failed, format!("{} instances, {} kinds, 4 solvers each", listed.len(), kinds.len()))
}

fn membership_soundness(corpus: &[(String, Instance)]) -> Verdict {
    let mut failed = Vec::new();
    let (mut points, mut boundary) = (0, 0);
    for (name, inst, strategies) in enumerable(corpus) {
        let mut rng = rng(seed_of(inst) ^ 0x4d45_4d42);
        let (outcome, counts) = check_membership(inst.game.oracle_handle(), &strategies, &mut rng, 200, 20);
        failed.extend(failures(&[outcome], name));
        if counts.points < 200 || counts.boundary < 20 {
            failed.push(format!("{name}: only {} points, {} near the boundary", counts.points, counts.boundary));
        }
        points += counts.points;
        boundary += counts.boundary;
    }
    verdict(failed, format!("{points} points, {boundary} within 1e-5 (relative) of the boundary, 0 disagreements"))
}

fn down_monotonicity(corpus: &[(String, Instance)]) -> Verdict {
    let mut failed = Vec::new();
    let mut count = 0;
    for (name, inst, strategies) in enumerable(corpus) {
        let mut rng = rng(seed_of(inst) ^ 0x444f_574e);
        failed.extend(failures(&[check_down_monotone(inst.game.oracle_handle(), &strategies, &mut rng, 100)], name));
        count += 1;
    }
    verdict(failed, format!("100 pairs on each of {count} instances"))
}

fn regularization(corpus: &[(String, Instance)]) -> Verdict {
    let mut failed = Vec::new();
    let mut count = 0;
    for (name, inst, strategies) in enumerable(corpus) {
        let mut rng = rng(seed_of(inst) ^ 0x5245_4755);
        failed.extend(failures(&[check_regularization(inst.game.oracle(), &strategies, &mut rng, 100)], name));
        count += 1;
    }
    verdict(failed, format!("100 weight vectors on each of {count} instances"))
}

fn decomposition(corpus: &[(String, Instance)]) -> Verdict {
    let mut failed = Vec::new();
    let mut count = 0;
    for (name, inst, strategies) in enumerable(corpus) {
        let mut rng = rng(seed_of(inst) ^ 0x4445_434f);
        failed.extend(failures(&[check_decomposition(inst.game.oracle(), &strategies, &mut rng, 100)], name));
        count += 1;
    }
    verdict(failed, format!("100 mixtures on each of {count} instances"))
}

/// A random game on 3 to 6 targets over a uniform matroid or a random
/// explicit family.
fn random_game(rng: &mut impl Rng, zero_sum: bool) -> SecurityGame {
    let n = rng.gen_range(3..=6);
    let oracle: Arc<dyn DbrOracle> = if rng.gen_bool(0.5) {
        Arc::new(UniformMatroid::new(n, rng.gen_range(1..n)).unwrap())
    } else {
        let mut family: Vec<PureStrategy> = Vec::new();
        let size = rng.gen_range(2..=2 * n);
        while family.len() < size {
            let e = PureStrategy::new((0..n).map(|_| rng.gen_bool(0.4)).collect());
            if e.cardinality() > 0 && !family.contains(&e) {
                family.push(e);
            }
        }
        Arc::new(Explicit::new(family).unwrap())
    };
    let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..1.0)).collect();
    let reward: Vec<f64> = cost.iter().map(|c| c + rng.gen_range(0.1..5.0)).collect();
    let (att_reward, att_cost) = if zero_sum {
        (cost.iter().map(|v| -v).collect(), reward.iter().map(|v| -v).collect())
    } else {
        let att_cost: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..1.0)).collect();
        (att_cost.iter().map(|c| c + rng.gen_range(0.1..5.0)).collect(), att_cost)
    };
    SecurityGame::new(Payoffs::new(reward, cost, att_reward, att_cost), oracle).unwrap()
}

fn zero_sum_relations(g: &SecurityGame) -> Result<(), String> {
    let minimax = solve_minimax(g).map_err(|e| e.to_string())?.value.unwrap();
    let sse = solve_sse(g).map_err(|e| e.to_string())?.defender_utility;
    near("SSE vs minimax", sse, minimax, 1e-6)?;
    let ctx = NashContext::new(g).map_err(|e| e.to_string())?;
    let best = ctx.extremal(Extremum::Best).map_err(|e| e.to_string())?.defender_utility;
    let worst = ctx.extremal(Extremum::Worst).map_err(|e| e.to_string())?.defender_utility;
    near("NE-best vs NE-worst", best, worst, 1e-6)?;
    Ok(())
}

fn general_sum_relations(g: &SecurityGame) -> Result<(), String> {
    let ctx = NashContext::new(g).map_err(|e| e.to_string())?;
    let any = ctx.any().map_err(|e| e.to_string())?;
    let best = ctx.extremal(Extremum::Best).map_err(|e| e.to_string())?;
    let worst = ctx.extremal(Extremum::Worst).map_err(|e| e.to_string())?;
    near("attacker utility any vs best", any.attacker_utility, best.attacker_utility, 1e-6)?;
    near("attacker utility any vs worst", any.attacker_utility, worst.attacker_utility, 1e-6)?;
    if best.defender_utility < worst.defender_utility - 1e-9 {
        return Err(format!("NE-best {} below NE-worst {}", best.defender_utility, worst.defender_utility));
    }
    let sse = solve_sse(g).map_err(|e| e.to_string())?.defender_utility;
    let x = ctx.marginal();
    let t = best_response_attacker(g, x, TieBreak::FavorDefender).map_err(|e| e.to_string())?;
    let committed = g.defender_utility(x, &AttackerMixed::pure(g.n(), t)).map_err(|e| e.to_string())?;
    if sse < committed - 1e-8 {
        return Err(format!("SSE {sse} below committing to the NE marginal ({committed})"));
    }
    let mid = 0.5 * (best.defender_utility + worst.defender_utility);
    let realized = ctx.with_utility(mid).map_err(|e| e.to_string())?;
    near("midpoint utility", realized.defender_utility, mid, 1e-8)
}

fn concept_relations() -> Verdict {
    let mut rng = rng(2024);
    let mut failed = Vec::new();
    for j in 0..50 {
        let g = random_game(&mut rng, true);
        if let Err(e) = zero_sum_relations(&g) {
            failed.push(format!("zero-sum game {j} (n = {}, {}): {e}", g.n(), g.oracle().kind()));
        }
    }
    for j in 0..50 {
        let g = random_game(&mut rng, false);
        if let Err(e) = general_sum_relations(&g) {
            failed.push(format!("general-sum game {j} (n = {}, {}): {e}", g.n(), g.oracle().kind()));
        }
    }
    verdict(failed, "50 zero-sum and 50 general-sum random games".into())
}

fn lp_core() -> Verdict {
    let s = duality_monitor().snapshot();
    if s.solves == 0 {
        return Err("no LP solves were recorded".into());
    }
    if s.breakdowns > 0 {
        return Err(format!("{} numerical breakdowns", s.breakdowns));
    }
    if !(s.worst_duality_gap <= 1e-8) {
        return Err(format!("worst duality gap {:.3e} over {} solves", s.worst_duality_gap, s.solves));
    }
    Ok(format!(
        "{} optimal solves, worst duality gap {:.2e}, worst dual infeasibility {:.2e}, 0 breakdowns",
        s.solves, s.worst_duality_gap, s.worst_dual_infeasibility
    ))
}

fn main() {
    let corpus = corpus();
    duality_monitor().reset();
    let criteria: Vec<Criterion> = vec![
        ("reference-instance values", Box::new(reference_values)),
        ("K_n edge game closed form", Box::new(kn_edge_values)),
        ("oracle equivalence with explicit LPs", Box::new(|| oracle_equivalence(&corpus))),
        ("membership game soundness", Box::new(|| membership_soundness(&corpus))),
        ("down-monotonicity", Box::new(|| down_monotonicity(&corpus))),
        ("regularized DBR exactness", Box::new(|| regularization(&corpus))),
        ("equilibrium-concept relations", Box::new(concept_relations)),
        ("decomposition", Box::new(|| decomposition(&corpus))),
        ("LP core duality and stability", Box::new(lp_core)),
    ];
    let mut all_passed = true;
    for (j, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} - {name} ({secs:.2} s): {detail}", j + 1),
            Err(why) => {
                all_passed = false;
                println!("FAIL criterion {} - {name} ({secs:.2} s): {why}", j + 1);
            }
        }
    }
    if !all_passed {
        std::process::exit(1);
    }
}
