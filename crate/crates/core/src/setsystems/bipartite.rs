use super::flow::MinCostFlow;
use super::{check_targets, check_weights, Capabilities, DbrOracle, OracleAnswer, StrategySet};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// Resources assigned to at most one allowed target each; a target is
/// covered when some resource sits on it.
#[derive(Debug, Clone)]
pub struct Bipartite {
    n: usize,
    allowed: Vec<Vec<usize>>,
}

impl Bipartite {
    /// `allowed[r]` lists the 0-based targets resource `r` may cover.
    pub fn new(n: usize, allowed: Vec<Vec<usize>>) -> Result<Self> {
        let mut allowed = allowed;
        for (r, list) in allowed.iter_mut().enumerate() {
            check_targets(n, list, &format!("resource {}", r + 1))?;
            list.sort_unstable();
            list.dedup();
        }
        Ok(Bipartite { n, allowed })
    }

    pub fn resources(&self) -> &[Vec<usize>] {
        &self.allowed
    }
}

impl DbrOracle for Bipartite {
    fn dim(&self) -> usize {
        self.n
    }

    /// Maximum-weight matching over positive-weight edges by successive
    /// shortest augmenting paths; stops once no path gains weight.
    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        let m = self.allowed.len();
        let (source, sink) = (m + self.n, m + self.n + 1);
        let mut graph = MinCostFlow::new(m + self.n + 2);
        let mut edges = Vec::new();
        for (r, list) in self.allowed.iter().enumerate() {
            graph.add_arc(source, r, 1, 0.0);
            for &t in list {
                if w[t] > 0.0 {
                    edges.push((graph.add_arc(r, m + t, 1, -w[t]), t));
                }
            }
        }
        for t in 0..self.n {
            graph.add_arc(m + t, sink, 1, 0.0);
        }
        graph.run(source, sink, m as i64, true);
        let covered = edges.iter().filter(|(arc, _)| graph.flow_on(*arc) > 0).map(|&(_, t)| t);
        Ok(OracleAnswer::new(PureStrategy::from_indices(self.n, covered), w))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: true }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        let mut set = StrategySet::new(limit);
        let mut counts = vec![0u32; self.n];
        let mut visited = 0u64;
        let budget = (limit as u64).saturating_mul(64).max(1 << 20);
        self.assign(0, &mut counts, &mut set, &mut visited, budget)?;
        Ok(set.into_vec())
    }

    fn admits_empty(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "bipartite"
    }
}

impl Bipartite {
    fn assign(
        &self,
        r: usize,
        counts: &mut [u32],
        set: &mut StrategySet,
        visited: &mut u64,
        budget: u64,
    ) -> Result<()> {
        *visited += 1;
        if *visited > budget {
            return Err(Error::ScaleExceeded { budget });
        }
        if r == self.allowed.len() {
            let bits = counts.iter().map(|&c| c > 0).collect();
            return set.insert(PureStrategy::new(bits));
        }
        self.assign(r + 1, counts, set, visited, budget)?;
        for &t in &self.allowed[r] {
            counts[t] += 1;
            self.assign(r + 1, counts, set, visited, budget)?;
            counts[t] -= 1;
        }
        Ok(())
    }
}
