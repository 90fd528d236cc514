use super::{by_weight_desc, check_weights, subsets_up_to, Capabilities, DbrOracle, OracleAnswer, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// Screening teams built from capacity-limited tools. Each target holds one
/// passenger; screening a passenger with team `t` uses one unit of every
/// tool in `t`.
///
/// Passengers are interchangeable apart from their weights, so an optimal
/// assignment screens the heaviest `m` positive-weight passengers, where `m`
/// is the largest number of team uses the capacities allow. The search
/// therefore branches on per-team usage counts.
#[derive(Debug, Clone)]
pub struct Packing {
    n: usize,
    teams: Vec<Vec<usize>>,
    capacities: Vec<u64>,
    node_budget: u64,
}

impl Packing {
    /// `teams[t]` lists tool indices into `capacities`.
    pub fn new(n: usize, teams: Vec<Vec<usize>>, capacities: Vec<u64>) -> Result<Self> {
        let mut teams = teams;
        for (t, tools) in teams.iter_mut().enumerate() {
            if let Some(&bad) = tools.iter().find(|&&tool| tool >= capacities.len()) {
                return Err(Error::Invalid(format!("team {} uses unknown tool {bad}", t + 1)));
            }
            tools.sort_unstable();
            tools.dedup();
        }
        Ok(Packing { n, teams, capacities, node_budget: DEFAULT_NODE_BUDGET })
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    /// Largest number of passengers (at most `cap`) the teams can screen.
    pub fn max_screened(&self, cap: usize) -> Result<usize> {
        let mut search = CountSearch {
            teams: &self.teams,
            remaining: self.capacities.clone(),
            cap,
            best: 0,
            nodes: 0,
            budget: self.node_budget,
        };
        search.visit(0, 0)?;
        Ok(search.best)
    }
}

struct CountSearch<'a> {
    teams: &'a [Vec<usize>],
    remaining: Vec<u64>,
    cap: usize,
    best: usize,
    nodes: u64,
    budget: u64,
}

impl CountSearch<'_> {
    /// Most uses team `t` could still get on its own.
    fn room(&self, t: usize) -> usize {
        self.teams[t].iter().map(|&tool| self.remaining[tool] as usize).min().unwrap_or(usize::MAX)
    }

    /// Relaxation: every remaining team may use its own bottleneck capacity
    /// independently.
    fn bound(&self, t: usize, count: usize) -> usize {
        let extra = (t..self.teams.len()).fold(0usize, |acc, u| acc.saturating_add(self.room(u)));
        count.saturating_add(extra).min(self.cap)
    }

    fn visit(&mut self, t: usize, count: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ScaleExceeded { budget: self.budget });
        }
        if count > self.best {
            self.best = count;
        }
        if t == self.teams.len() || self.best == self.cap || self.bound(t, count) <= self.best {
            return Ok(());
        }
        let most = self.room(t).min(self.cap - count);
        for uses in (0..=most).rev() {
            for &tool in &self.teams[t] {
                self.remaining[tool] -= uses as u64;
            }
            let result = self.visit(t + 1, count + uses);
            for &tool in &self.teams[t] {
                self.remaining[tool] += uses as u64;
            }
            result?;
        }
        Ok(())
    }
}

impl DbrOracle for Packing {
    fn dim(&self) -> usize {
        self.n
    }

    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        let positive = w.iter().filter(|&&v| v > 0.0).count();
        let m = self.max_screened(positive)?;
        let chosen = by_weight_desc(w).into_iter().take(m);
        Ok(OracleAnswer::new(PureStrategy::from_indices(self.n, chosen), w))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: true }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        let m = self.max_screened(self.n)?;
        subsets_up_to(self.n, m, limit)
    }

    fn admits_empty(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "packing"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_examples() {
        let p = Packing::new(2, vec![vec![0]], vec![1]).unwrap();
        let a = p.best_response(&[3., 5.]).unwrap();
        assert_eq!((a.strategy.bit_string().as_str(), a.value), ("01", 5.0));

        let roomy = Packing::new(3, vec![vec![0, 1]], vec![3, 3]).unwrap();
        let a = roomy.best_response(&[1., -1., 2.]).unwrap();
        assert_eq!((a.strategy.bit_string().as_str(), a.value), ("101", 3.0));

        let empty = Packing::new(2, vec![], vec![]).unwrap();
        let a = empty.best_response(&[1., 1.]).unwrap();
        assert_eq!((a.strategy.bit_string().as_str(), a.value), ("00", 0.0));
    }

    #[test]
    fn shared_tools_limit_screening() {
        // teams {A,B}, {B,C}, {A}: A=1, B=1, C=1 allows {A,B} alone or {B,C}+{A}
        let p = Packing::new(4, vec![vec![0, 1], vec![1, 2], vec![0]], vec![1, 1, 1]).unwrap();
        assert_eq!(p.max_screened(4).unwrap(), 2);
        assert_eq!(p.best_response(&[1., 2., 3., 4.]).unwrap().value, 7.0);
    }

    #[test]
    fn team_without_tools_is_unlimited() {
        let p = Packing::new(3, vec![vec![]], vec![]).unwrap();
        assert_eq!(p.best_response(&[1., 1., 1.]).unwrap().value, 3.0);
    }
}
