//! Cross-checks of the oracle-driven machinery against brute force.
//!
//! Each check returns a [`CheckOutcome`]; [`verify_instance`] runs the full
//! suite, skipping enumeration-based checks when E is too large to list.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibria::{decompose_marginal, solve_sse, Extremum, NashContext};
use crate::error::{Error, Result};
use crate::game::{marginal_of, PureStrategy, SecurityGame};
use crate::reductions::{boundary_scale, brute_membership, downward_closure, membership_check};
use crate::reference::{reference_minimax, reference_ne, reference_sse};
use crate::setsystems::{brute_force_best, regularized_dbr, relaxed_best_response, DbrOracle};

/// Largest E listed for enumeration-based checks.
pub const ENUMERATION_LIMIT: usize = 5000;
/// Agreement required between oracle-driven and explicit solvers.
pub const SOLVER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    /// Summary of what was checked, e.g. sample counts.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, status: CheckStatus, detail: impl Into<String>) -> Self {
        CheckOutcome { name: name.to_string(), status, detail: detail.into() }
    }

    fn from_failures(name: &str, failures: Vec<String>, detail: impl Into<String>) -> Self {
        let status = match failures.first() {
            None => CheckStatus::Pass,
            Some(first) => CheckStatus::Fail(format!("{} failure(s); first: {first}", failures.len())),
        };
        CheckOutcome::new(name, status, detail)
    }

    fn error(name: &str, err: Error) -> Self {
        CheckOutcome::new(name, CheckStatus::Fail(err.to_string()), "")
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, CheckStatus::Fail(_))
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, why) = match &self.status {
            CheckStatus::Pass => ("PASS", String::new()),
            CheckStatus::Fail(m) => ("FAIL", format!(" - {m}")),
            CheckStatus::Skipped(m) => ("SKIP", format!(" - {m}")),
        };
        write!(f, "{tag} {}", self.name)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        f.write_str(&why)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol_for(w: &[f64]) -> f64 {
    1e-12 * (1.0 + w.iter().map(|v| v.abs()).sum::<f64>())
}

/// Random weights: half signed, half nonnegative, with occasional zeros.
pub fn random_weights(rng: &mut impl Rng, n: usize, signed: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else if signed {
                rng.gen_range(-1.0..1.0)
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect()
}

/// A random convex combination of at most `n + 1` of the given vectors.
pub fn random_mixture(rng: &mut impl Rng, pool: &[PureStrategy]) -> Vec<f64> {
    let n = pool[0].len();
    let m = rng.gen_range(1..=(n + 1).min(pool.len()));
    let picks: Vec<&PureStrategy> = pool.choose_multiple(rng, m).collect();
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut x = vec![0.0; n];
    for (e, w) in picks.iter().zip(&raw) {
        e.covered().for_each(|i| x[i] += w / total);
    }
    x.into_iter().map(|v: f64| v.min(1.0)).collect()
}

/// `best_response(w).value` equals the maximum over the enumeration and the
/// returned strategy is listed.
pub fn check_oracle_enumeration(
    oracle: &dyn DbrOracle,
    strategies: &[PureStrategy],
    rng: &mut impl Rng,
    samples: usize,
) -> CheckOutcome {
    let name = "oracle matches enumeration";
    let listed: std::collections::HashSet<&PureStrategy> = strategies.iter().collect();
    let mut failures = Vec::new();
    for s in 0..samples {
        let w = random_weights(rng, oracle.dim(), s % 2 == 0);
        let answer = match oracle.best_response(&w) {
            Ok(a) => a,
            Err(e) => return CheckOutcome::error(name, e),
        };
        let brute = brute_force_best(strategies, &w).expect("nonempty enumeration");
        if (answer.value - brute.value).abs() > tol_for(&w) {
            failures.push(format!("w = {w:?}: oracle {} vs enumeration {}", answer.value, brute.value));
        } else if !listed.contains(&answer.strategy) {
            failures.push(format!("w = {w:?}: {} is not in the enumeration", answer.strategy.bit_string()));
        }
    }
    CheckOutcome::from_failures(name, failures, format!("{samples} weight vectors, |E| = {}", strategies.len()))
}

/// Checks needing no enumeration: the relaxed and plain best responses
/// agree for nonnegative weights, the regularised answer is a genuine
/// member, and raising a weight never lowers the optimum.
pub fn check_oracle_internal(oracle: &dyn DbrOracle, rng: &mut impl Rng, samples: usize) -> CheckOutcome {
    let name = "oracle self-consistency";
    let mut failures = Vec::new();
    for _ in 0..samples {
        let w = random_weights(rng, oracle.dim(), false);
        let i = rng.gen_range(0..w.len());
        let run = || -> Result<Option<String>> {
            let plain = oracle.best_response(&w)?;
            let relaxed = relaxed_best_response(oracle, &w)?;
            if (plain.value - relaxed.value).abs() > tol_for(&w) {
                return Ok(Some(format!("w = {w:?}: relaxed {} vs plain {}", relaxed.value, plain.value)));
            }
            let reg = regularized_dbr(oracle, &w)?;
            if reg.strategy.is_subpure() || (reg.value - plain.value).abs() > tol_for(&w) {
                return Ok(Some(format!("w = {w:?}: regularized value {} vs {}", reg.value, plain.value)));
            }
            let mut bumped = w.clone();
            bumped[i] += 0.5;
            if oracle.best_response(&bumped)?.value < plain.value - tol_for(&w) {
                return Ok(Some(format!("w = {w:?}: raising w[{i}] lowered the optimum")));
            }
            Ok(None)
        };
        match run() {
            Ok(Some(f)) => failures.push(f),
            Ok(None) => {}
            Err(e) => return CheckOutcome::error(name, e),
        }
    }
    CheckOutcome::from_failures(name, failures, format!("{samples} weight vectors"))
}

/// Nonnegative dyadic weights with at least one zero entry: the regularised
/// oracle returns a member of E attaining the brute-force optimum exactly.
pub fn check_regularization(
    oracle: &dyn DbrOracle,
    strategies: &[PureStrategy],
    rng: &mut impl Rng,
    samples: usize,
) -> CheckOutcome {
    let name = "regularized DBR is exact";
    let listed: std::collections::HashSet<&PureStrategy> = strategies.iter().collect();
    let n = oracle.dim();
    let mut failures = Vec::new();
    for _ in 0..samples {
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=16) as f64 / 8.0).collect();
        w[rng.gen_range(0..n)] = 0.0;
        let answer = match regularized_dbr(oracle, &w) {
            Ok(a) => a,
            Err(e) => return CheckOutcome::error(name, e),
        };
        let brute = brute_force_best(strategies, &w).expect("nonempty enumeration");
        if !listed.contains(&answer.strategy) {
            failures.push(format!("w = {w:?}: {} is not in E", answer.strategy.bit_string()));
        } else if answer.value != brute.value {
            failures.push(format!("w = {w:?}: value {} vs optimum {}", answer.value, brute.value));
        }
    }
    CheckOutcome::from_failures(name, failures, format!("{samples} rational weight vectors"))
}

fn compare(name: &str, ours: Result<f64>, reference: Result<f64>) -> CheckOutcome {
    match (ours, reference) {
        (Ok(a), Ok(b)) if (a - b).abs() <= SOLVER_TOL => {
            CheckOutcome::new(name, CheckStatus::Pass, format!("{a:.9} vs explicit {b:.9}"))
        }
        (Ok(a), Ok(b)) => CheckOutcome::new(name, CheckStatus::Fail(format!("{a} vs explicit {b}")), ""),
        (Err(e), _) | (_, Err(e)) => CheckOutcome::error(name, e),
    }
}

/// Column/cut generation against the explicit-column solvers: minimax (of
/// the zero-sum companion when the game is general-sum), SSE, and the best
/// and worst Nash equilibria.
pub fn check_equilibria(game: &SecurityGame, strategies: &[PureStrategy]) -> Vec<CheckOutcome> {
    let zero_sum = if game.is_zero_sum() { game.clone() } else { game.zero_sum_companion() };
    let mut out = vec![compare(
        "minimax: column generation vs explicit LP",
        crate::equilibria::minimax_value(&zero_sum, &Default::default()),
        reference_minimax(&zero_sum, strategies).map(|r| r.value),
    )];
    out.push(compare(
        "sse: column generation vs explicit LP",
        solve_sse(game).map(|r| r.defender_utility),
        reference_sse(game, strategies).map(|r| r.defender_utility),
    ));
    match NashContext::new(game) {
        Ok(ctx) => {
            for (which, label) in [(Extremum::Best, "ne-best"), (Extremum::Worst, "ne-worst")] {
                out.push(compare(
                    &format!("{label}: cut generation vs explicit LP"),
                    ctx.extremal(which).map(|r| r.defender_utility),
                    reference_ne(game, strategies, which),
                ));
            }
        }
        Err(e) => out.push(CheckOutcome::error("ne: companion minimax", e)),
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MembershipCounts {
    pub points: usize,
    pub boundary: usize,
    pub members: usize,
}

/// Compares the game-value membership test with the explicit LP on points
/// drawn half inside (mixtures over the closure), half scaled outward, plus
/// `boundary` points placed within `1e-5` (relative) of the hull boundary.
pub fn check_membership(
    oracle: Arc<dyn DbrOracle>,
    strategies: &[PureStrategy],
    rng: &mut impl Rng,
    samples: usize,
    boundary: usize,
) -> (CheckOutcome, MembershipCounts) {
    let name = "membership game agrees with explicit LP";
    let closure = match downward_closure(strategies) {
        Ok(c) => c,
        Err(e) => return (CheckOutcome::error(name, e), MembershipCounts::default()),
    };
    let mut counts = MembershipCounts::default();
    let mut failures = Vec::new();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for s in 0..samples {
        let x = random_mixture(rng, &closure);
        if s % 2 == 0 {
            points.push(x);
        } else {
            let factor = rng.gen_range(1.02..1.6);
            points.push(x.into_iter().map(|v| v * factor).collect());
        }
    }
    let mut placed = 0;
    while placed < boundary {
        let x = random_mixture(rng, &closure);
        let t = match boundary_scale(&x, strategies) {
            Ok(t) if t.is_finite() => t,
            Ok(_) => continue,
            Err(e) => return (CheckOutcome::error(name, e), counts),
        };
        let side = if placed % 2 == 0 { 1.0 - 1e-5 } else { 1.0 + 1e-5 };
        points.push(x.iter().map(|v| v * t * side).collect());
        placed += 1;
    }
    for (j, x) in points.iter().enumerate() {
        let verdict = match membership_check(x, Arc::clone(&oracle)) {
            Ok(v) => v,
            Err(e) => return (CheckOutcome::error(name, e), counts),
        };
        let brute = match brute_membership(x, strategies) {
            Ok(b) => b,
            Err(e) => return (CheckOutcome::error(name, e), counts),
        };
        counts.points += 1;
        counts.boundary += usize::from(j >= samples);
        counts.members += usize::from(brute);
        if verdict.is_member != brute {
            failures.push(format!("x = {x:?}: game value {} but explicit LP says {brute}", verdict.game_value));
        }
    }
    let detail = format!("{} points, {} near the boundary, {} members", counts.points, counts.boundary, counts.members);
    (CheckOutcome::from_failures(name, failures, detail), counts)
}

/// Members stay members when every coordinate is scaled by a factor in [0, 1].
pub fn check_down_monotone(
    oracle: Arc<dyn DbrOracle>,
    strategies: &[PureStrategy],
    rng: &mut impl Rng,
    pairs: usize,
) -> CheckOutcome {
    let name = "membership is down-monotone";
    let mut failures = Vec::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < pairs && attempts < 20 * pairs {
        attempts += 1;
        let x = random_mixture(rng, strategies);
        let scaled: Vec<f64> = x.iter().map(|v| v * rng.gen_range(0.0..=1.0)).collect();
        let run = || -> Result<Option<Option<String>>> {
            if !membership_check(&x, Arc::clone(&oracle))?.is_member {
                return Ok(None);
            }
            let member = membership_check(&scaled, Arc::clone(&oracle))?.is_member;
            Ok(Some((!member).then(|| format!("{x:?} is a member but {scaled:?} is not"))))
        };
        match run() {
            Ok(None) => {}
            Ok(Some(f)) => {
                done += 1;
                failures.extend(f);
            }
            Err(e) => return CheckOutcome::error(name, e),
        }
    }
    if done < pairs {
        failures.push(format!("only {done} member points found in {attempts} attempts"));
    }
    CheckOutcome::from_failures(name, failures, format!("{done} member/scaled pairs"))
}

/// Decomposing a random mixture's marginal recovers it with small support.
pub fn check_decomposition(
    oracle: &dyn DbrOracle,
    strategies: &[PureStrategy],
    rng: &mut impl Rng,
    samples: usize,
) -> CheckOutcome {
    let name = "decomposition reconstructs marginals";
    let n = oracle.dim();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_mixture(rng, strategies);
        let p = match decompose_marginal(&x, oracle) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("x = {x:?}: {e}"));
                continue;
            }
        };
        let back = marginal_of(&p);
        let err = back.as_slice().iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        if err > 1e-8 || p.support_size() > n + 1 {
            failures.push(format!("x = {x:?}: error {err:.3e}, support {}", p.support_size()));
        }
    }
    CheckOutcome::from_failures(name, failures, format!("{samples} mixtures, worst error {worst:.2e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }
}

/// Runs every check that the instance's size allows.
pub fn verify_instance(game: &SecurityGame, samples: usize, seed: u64) -> VerifyReport {
    let mut rng = rng(seed);
    let oracle = game.oracle();
    let mut outcomes = vec![check_oracle_internal(oracle, &mut rng, samples)];
    let strategies = if oracle.capabilities().enumerable {
        oracle.enumerate(ENUMERATION_LIMIT).map_err(|e| e.to_string())
    } else {
        Err("set system is not enumerable".to_string())
    };
    let strategies = match strategies {
        Ok(s) => s,
        Err(why) => {
            let why = format!("{why}; enumeration checks need |E| <= {ENUMERATION_LIMIT}");
            for name in [
                "oracle matches enumeration",
                "regularized DBR is exact",
                "equilibria vs explicit LP",
                "membership game agrees with explicit LP",
                "membership is down-monotone",
                "decomposition reconstructs marginals",
            ] {
                outcomes.push(CheckOutcome::new(name, CheckStatus::Skipped(why.clone()), ""));
            }
            return VerifyReport { outcomes };
        }
    };
    outcomes.push(check_oracle_enumeration(oracle, &strategies, &mut rng, samples));
    outcomes.push(check_regularization(oracle, &strategies, &mut rng, samples));
    outcomes.extend(check_equilibria(game, &strategies));
    let handle = game.oracle_handle();
    outcomes.push(check_membership(Arc::clone(&handle), &strategies, &mut rng, samples, samples.div_ceil(10)).0);
    outcomes.push(check_down_monotone(handle, &strategies, &mut rng, samples.div_ceil(2)));
    outcomes.push(check_decomposition(oracle, &strategies, &mut rng, samples.div_ceil(2)));
    VerifyReport { outcomes }
}
