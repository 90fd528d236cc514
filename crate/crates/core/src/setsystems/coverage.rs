use super::{check_targets, check_weights, Capabilities, DbrOracle, OracleAnswer, StrategySet, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// Each resource runs at most one of its schedules; a pure strategy is the
/// union of the chosen schedules.
#[derive(Debug, Clone)]
pub struct Coverage {
    n: usize,
    schedules: Vec<Vec<Vec<usize>>>,
    node_budget: u64,
}

impl Coverage {
    /// `schedules[r]` lists the 0-based target sets resource `r` may cover.
    pub fn new(n: usize, schedules: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut schedules = schedules;
        for (r, list) in schedules.iter_mut().enumerate() {
            for s in list.iter_mut() {
                check_targets(n, s, &format!("resource {} schedule", r + 1))?;
                s.sort_unstable();
                s.dedup();
            }
        }
        Ok(Coverage { n, schedules, node_budget: DEFAULT_NODE_BUDGET })
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn resources(&self) -> &[Vec<Vec<usize>>] {
        &self.schedules
    }
}

struct Search<'a> {
    schedules: &'a [Vec<Vec<usize>>],
    w: &'a [f64],
    /// `reach[r][i]`: some resource in `r..` can cover target `i`.
    reach: Vec<Vec<bool>>,
    counts: Vec<u32>,
    value: f64,
    best_value: f64,
    best: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn bound(&self, r: usize) -> f64 {
        let extra: f64 = (0..self.w.len())
            .filter(|&i| self.reach[r][i] && self.counts[i] == 0 && self.w[i] > 0.0)
            .map(|i| self.w[i])
            .sum();
        self.value + extra
    }

    fn visit(&mut self, r: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ScaleExceeded { budget: self.budget });
        }
        if r == self.schedules.len() {
            if self.value > self.best_value {
                self.best_value = self.value;
                self.best = self.counts.iter().map(|&c| c > 0).collect();
            }
            return Ok(());
        }
        if self.bound(r) <= self.best_value {
            return Ok(());
        }
        for s in 0..self.schedules[r].len() {
            let sched = &self.schedules[r][s];
            let before = self.value;
            for &t in sched {
                if self.counts[t] == 0 {
                    self.value += self.w[t];
                }
                self.counts[t] += 1;
            }
            self.visit(r + 1)?;
            for &t in sched {
                self.counts[t] -= 1;
            }
            self.value = before;
        }
        self.visit(r + 1)
    }
}

impl DbrOracle for Coverage {
    fn dim(&self) -> usize {
        self.n
    }

    /// Branch and bound over schedule choices, each resource trying its
    /// schedules in order and then idling.
    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        let m = self.schedules.len();
        let mut reach = vec![vec![false; self.n]; m + 1];
        for r in (0..m).rev() {
            reach[r] = reach[r + 1].clone();
            for s in &self.schedules[r] {
                for &t in s {
                    reach[r][t] = true;
                }
            }
        }
        let mut search = Search {
            schedules: &self.schedules,
            w,
            reach,
            counts: vec![0; self.n],
            value: 0.0,
            best_value: f64::NEG_INFINITY,
            best: vec![false; self.n],
            nodes: 0,
            budget: self.node_budget,
        };
        search.visit(0)?;
        Ok(OracleAnswer::new(PureStrategy::new(search.best), w))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: false }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        let mut set = StrategySet::new(limit);
        let mut nodes = 0u64;
        let mut counts = vec![0u32; self.n];
        self.unions(0, &mut counts, &mut set, &mut nodes)?;
        Ok(set.into_vec())
    }

    fn admits_empty(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "coverage"
    }
}

impl Coverage {
    fn unions(&self, r: usize, counts: &mut [u32], set: &mut StrategySet, nodes: &mut u64) -> Result<()> {
        *nodes += 1;
        if *nodes > self.node_budget {
            return Err(Error::ScaleExceeded { budget: self.node_budget });
        }
        if r == self.schedules.len() {
            return set.insert(PureStrategy::new(counts.iter().map(|&c| c > 0).collect()));
        }
        self.unions(r + 1, counts, set, nodes)?;
        for s in &self.schedules[r] {
            s.iter().for_each(|&t| counts[t] += 1);
            self.unions(r + 1, counts, set, nodes)?;
            s.iter().for_each(|&t| counts[t] -= 1);
        }
        Ok(())
    }
}
