//! Defender best-response (DBR) oracles.
//!
//! A set system is the family E of binary coverage vectors available to the
//! defender. Solvers never see E directly: they ask an oracle for
//! `argmax_{e in E} w . e`. Every oracle here is exact for arbitrary real
//! weights, not just nonnegative ones, because pricing in decomposition and
//! in the SSE masters produces signed duals.
//!
//! Ties are broken deterministically (lowest index / first found).

use std::fmt;

use crate::error::{Error, Result};
use crate::game::PureStrategy;

mod bipartite;
mod coverage;
mod explicit;
pub(crate) mod flow;
mod layered;
mod packing;
mod regularize;
mod uniform;

pub use bipartite::Bipartite;
pub use coverage::Coverage;
pub use explicit::Explicit;
pub use layered::{LayeredGraph, Move};
pub use packing::Packing;
pub use regularize::{bit_complexity, regularized_dbr, relaxed_best_response};
pub use uniform::UniformMatroid;

/// Default branch-and-bound node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_NODE_BUDGET`].
pub const NODE_BUDGET_ENV: &str = "SG_NODE_BUDGET";

/// Node budget from `SG_NODE_BUDGET`, falling back to the default.
pub fn node_budget_from_env() -> u64 {
    std::env::var(NODE_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    /// All of E can be listed (subject to a size limit).
    pub enumerable: bool,
    /// Every sub-vector of a member of E is itself in E.
    pub subpure_closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleAnswer {
    pub strategy: PureStrategy,
    /// `w . strategy`.
    pub value: f64,
}

impl OracleAnswer {
    pub(crate) fn new(strategy: PureStrategy, w: &[f64]) -> Self {
        let value = strategy.dot(w);
        OracleAnswer { strategy, value }
    }
}

pub trait DbrOracle: Send + Sync + fmt::Debug {
    /// Number of targets.
    fn dim(&self) -> usize;

    /// A member of E maximizing `w . e`.
    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer>;

    fn capabilities(&self) -> Capabilities;

    /// Lists E without duplicates. Fails with `ScaleExceeded` when E has
    /// more than `limit` members.
    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>>;

    /// Whether the all-zero vector belongs to E.
    fn admits_empty(&self) -> bool;

    /// Short name of the set-system family.
    fn kind(&self) -> &'static str;
}

pub(crate) fn check_weights(n: usize, w: &[f64]) -> Result<()> {
    if w.len() != n {
        return Err(Error::dims(n, w.len()));
    }
    if let Some(i) = w.iter().position(|v| !v.is_finite()) {
        return Err(Error::Invalid(format!("weight w[{i}] is not finite")));
    }
    Ok(())
}

pub(crate) fn check_targets(n: usize, targets: &[usize], what: &str) -> Result<()> {
    match targets.iter().find(|&&t| t >= n) {
        Some(t) => Err(Error::Invalid(format!("{what} references target {} but n = {n}", t + 1))),
        None => Ok(()),
    }
}

/// Indices sorted by weight, largest first; equal weights keep index order.
pub(crate) fn by_weight_desc(w: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    order
}

/// All subsets of `0..n` with at most `k` elements, by increasing size.
pub(crate) fn subsets_up_to(n: usize, k: usize, limit: usize) -> Result<Vec<PureStrategy>> {
    let mut out = Vec::new();
    let mut combo = Vec::with_capacity(k);
    for size in 0..=k.min(n) {
        combo.clear();
        combo.extend(0..size);
        loop {
            if out.len() >= limit {
                return Err(Error::ScaleExceeded { budget: limit as u64 });
            }
            out.push(PureStrategy::from_indices(n, combo.iter().copied()));
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && combo[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Deduplicating collector with a size limit.
pub(crate) struct StrategySet {
    seen: std::collections::HashSet<PureStrategy>,
    order: Vec<PureStrategy>,
    limit: usize,
}

impl StrategySet {
    pub(crate) fn new(limit: usize) -> Self {
        StrategySet { seen: Default::default(), order: Vec::new(), limit }
    }

    pub(crate) fn insert(&mut self, e: PureStrategy) -> Result<()> {
        if self.seen.contains(&e) {
            return Ok(());
        }
        if self.order.len() >= self.limit {
            return Err(Error::ScaleExceeded { budget: self.limit as u64 });
        }
        self.seen.insert(e.clone());
        self.order.push(e);
        Ok(())
    }

    pub(crate) fn into_vec(self) -> Vec<PureStrategy> {
        self.order
    }
}

/// Brute-force `max_{e in E} w . e` over an enumerated family, first index
/// winning ties.
pub fn brute_force_best(strategies: &[PureStrategy], w: &[f64]) -> Option<OracleAnswer> {
    let mut best: Option<OracleAnswer> = None;
    for e in strategies {
        let value = e.dot(w);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(OracleAnswer { strategy: e.clone(), value });
        }
    }
    best
}
