use super::flow::MinCostFlow;
use super::{check_weights, Capabilities, DbrOracle, OracleAnswer, StrategySet, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// An allowed step from `from` at layer `time` to `to` at layer `time + 1`
/// (all indices 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub time: usize,
    pub from: usize,
    pub to: usize,
}

/// `k` patrollers, each walking one path through a position-by-time grid.
/// Grid nodes may be mapped to targets; a target is covered when any path
/// visits its node.
#[derive(Debug, Clone)]
pub struct LayeredGraph {
    n: usize,
    positions: usize,
    times: usize,
    target_of: Vec<Option<usize>>,
    successors: Vec<Vec<Vec<usize>>>,
    k: usize,
    node_budget: u64,
}

impl LayeredGraph {
    /// `targets` maps `(position, time)` to a target, injectively.
    pub fn new(
        n: usize,
        positions: usize,
        times: usize,
        targets: &[(usize, usize, usize)],
        moves: &[Move],
        k: usize,
    ) -> Result<Self> {
        if positions == 0 || times == 0 {
            return Err(Error::Invalid("layered graph needs at least one position and one time".into()));
        }
        if k == 0 {
            return Err(Error::Invalid("layered graph needs at least one patroller".into()));
        }
        let mut target_of = vec![None; positions * times];
        let mut used = vec![false; n];
        for &(p, t, target) in targets {
            if p >= positions || t >= times {
                return Err(Error::Invalid(format!("grid node ({}, {}) out of range", p + 1, t + 1)));
            }
            if target >= n {
                return Err(Error::Invalid(format!("grid target {} out of range for n = {n}", target + 1)));
            }
            if used[target] || target_of[t * positions + p].is_some() {
                return Err(Error::Invalid(format!("target {} mapped to more than one grid node", target + 1)));
            }
            used[target] = true;
            target_of[t * positions + p] = Some(target);
        }
        let mut successors = vec![vec![Vec::new(); positions]; times.saturating_sub(1)];
        for mv in moves {
            if mv.time + 1 >= times || mv.from >= positions || mv.to >= positions {
                return Err(Error::Invalid(format!("move {mv:?} leaves the grid")));
            }
            let list = &mut successors[mv.time][mv.from];
            if !list.contains(&mv.to) {
                list.push(mv.to);
            }
        }
        for layer in &mut successors {
            layer.iter_mut().for_each(|l| l.sort_unstable());
        }
        Ok(LayeredGraph { n, positions, times, target_of, successors, k, node_budget: DEFAULT_NODE_BUDGET })
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn patrollers(&self) -> usize {
        self.k
    }

    fn node(&self, p: usize, t: usize) -> usize {
        t * self.positions + p
    }

    fn weight_at(&self, w: &[f64], p: usize, t: usize) -> f64 {
        self.target_of[self.node(p, t)].map_or(0.0, |i| w[i])
    }

    /// Min-cost flow: each grid node is split into in/out halves joined by a
    /// unit arc worth the node's weight and a free arc carrying the other
    /// `k - 1` patrollers.
    fn best_by_flow(&self, w: &[f64]) -> Result<PureStrategy> {
        let (p_count, t_count, k) = (self.positions, self.times, self.k as i64);
        let grid = p_count * t_count;
        let (source, sink) = (2 * grid, 2 * grid + 1);
        let mut graph = MinCostFlow::new(2 * grid + 2);
        let mut node_arcs = Vec::with_capacity(grid);
        for t in 0..t_count {
            for p in 0..p_count {
                let v = self.node(p, t);
                let mut arcs = vec![graph.add_arc(2 * v, 2 * v + 1, 1, -self.weight_at(w, p, t))];
                if k > 1 {
                    arcs.push(graph.add_arc(2 * v, 2 * v + 1, k - 1, 0.0));
                }
                node_arcs.push(arcs);
                if t == 0 {
                    graph.add_arc(source, 2 * v, k, 0.0);
                }
                if t + 1 == t_count {
                    graph.add_arc(2 * v + 1, sink, k, 0.0);
                } else {
                    for &q in &self.successors[t][p] {
                        graph.add_arc(2 * v + 1, 2 * self.node(q, t + 1), k, 0.0);
                    }
                }
            }
        }
        let out = graph.run(source, sink, k, false);
        if out.flow < k {
            return Err(Error::InfeasibleFlow { required: self.k });
        }
        let covered =
            (0..grid).filter(|&v| node_arcs[v].iter().any(|&a| graph.flow_on(a) > 0)).filter_map(|v| self.target_of[v]);
        Ok(PureStrategy::from_indices(self.n, covered))
    }

    /// Exact dynamic program over the joint positions of all patrollers.
    /// Handles negative weights, which the flow model cannot charge once
    /// per node when several patrollers share it.
    pub(crate) fn best_by_joint_dp(&self, w: &[f64]) -> Result<PureStrategy> {
        let (p_count, k) = (self.positions, self.k);
        let states = p_count
            .checked_pow(k as u32)
            .filter(|s| (*s as u64).saturating_mul(self.times as u64) <= self.node_budget)
            .ok_or(Error::ScaleExceeded { budget: self.node_budget })?;
        let decode = |mut s: usize| {
            let mut tuple = vec![0; k];
            for slot in tuple.iter_mut() {
                *slot = s % p_count;
                s /= p_count;
            }
            tuple
        };
        let encode = |tuple: &[usize]| tuple.iter().rev().fold(0, |acc, &p| acc * p_count + p);
        let layer_value = |tuple: &[usize], t: usize| {
            let mut seen: Vec<usize> = Vec::with_capacity(k);
            let mut total = 0.0;
            for &p in tuple {
                if !seen.contains(&p) {
                    seen.push(p);
                    total += self.weight_at(w, p, t);
                }
            }
            total
        };

        let mut value: Vec<f64> = (0..states).map(|s| layer_value(&decode(s), 0)).collect();
        let mut parents: Vec<Vec<usize>> = Vec::with_capacity(self.times);
        let mut nodes = states as u64;
        for t in 0..self.times - 1 {
            let mut next = vec![f64::NEG_INFINITY; states];
            let mut parent = vec![usize::MAX; states];
            for s in 0..states {
                if value[s] == f64::NEG_INFINITY {
                    continue;
                }
                let tuple = decode(s);
                let choices: Vec<&Vec<usize>> = tuple.iter().map(|&p| &self.successors[t][p]).collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut pick = vec![0usize; k];
                loop {
                    nodes += 1;
                    if nodes > self.node_budget {
                        return Err(Error::ScaleExceeded { budget: self.node_budget });
                    }
                    let succ: Vec<usize> = (0..k).map(|i| choices[i][pick[i]]).collect();
                    let s2 = encode(&succ);
                    let candidate = value[s] + layer_value(&succ, t + 1);
                    if candidate > next[s2] {
                        next[s2] = candidate;
                        parent[s2] = s;
                    }
                    let mut i = 0;
                    while i < k {
                        pick[i] += 1;
                        if pick[i] < choices[i].len() {
                            break;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
            }
            parents.push(parent);
            value = next;
        }
        let mut best = None;
        for (s, &v) in value.iter().enumerate() {
            if v > f64::NEG_INFINITY && best.is_none_or(|b: usize| v > value[b]) {
                best = Some(s);
            }
        }
        let mut s = best.ok_or(Error::InfeasibleFlow { required: self.k })?;
        let mut covered = Vec::new();
        for t in (0..self.times).rev() {
            covered.extend(decode(s).into_iter().filter_map(|p| self.target_of[self.node(p, t)]));
            if t > 0 {
                s = parents[t - 1][s];
            }
        }
        Ok(PureStrategy::from_indices(self.n, covered))
    }

    fn paths(&self, limit: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(self.times);
        for p in 0..self.positions {
            path.push(p);
            self.extend_path(&mut path, &mut out, limit)?;
            path.pop();
        }
        Ok(out)
    }

    fn extend_path(&self, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) -> Result<()> {
        let t = path.len() - 1;
        if t + 1 == self.times {
            if out.len() >= limit {
                return Err(Error::ScaleExceeded { budget: limit as u64 });
            }
            out.push(path.clone());
            return Ok(());
        }
        for &q in &self.successors[t][path[t]] {
            path.push(q);
            self.extend_path(path, out, limit)?;
            path.pop();
        }
        Ok(())
    }
}

impl DbrOracle for LayeredGraph {
    fn dim(&self) -> usize {
        self.n
    }

    fn best_response(&self, w: &[f64]) -> Result<OracleAnswer> {
        check_weights(self.n, w)?;
        let strategy =
            if self.k == 1 || w.iter().all(|&v| v >= 0.0) { self.best_by_flow(w)? } else { self.best_by_joint_dp(w)? };
        Ok(OracleAnswer::new(strategy, w))
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { enumerable: true, subpure_closed: false }
    }

    fn enumerate(&self, limit: usize) -> Result<Vec<PureStrategy>> {
        let paths = self.paths(limit.saturating_mul(4).max(1024))?;
        if paths.is_empty() {
            return Err(Error::InfeasibleFlow { required: self.k });
        }
        let coverage: Vec<Vec<usize>> = paths
            .iter()
            .map(|path| path.iter().enumerate().filter_map(|(t, &p)| self.target_of[self.node(p, t)]).collect())
            .collect();
        let mut set = StrategySet::new(limit);
        let mut nodes = 0u64;
        // multisets of k paths: nondecreasing index tuples
        let mut pick = vec![0usize; self.k];
        loop {
            nodes += 1;
            if nodes > self.node_budget {
                return Err(Error::ScaleExceeded { budget: self.node_budget });
            }
            let covered = pick.iter().flat_map(|&i| coverage[i].iter().copied());
            set.insert(PureStrategy::from_indices(self.n, covered))?;
            let mut i = self.k;
            while i > 0 && pick[i - 1] == paths.len() - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..self.k {
                pick[j] = pick[i - 1];
            }
        }
        Ok(set.into_vec())
    }

    fn admits_empty(&self) -> bool {
        // every patroller occupies one node per layer
        self.target_of.iter().all(|t| t.is_none())
    }

    fn kind(&self) -> &'static str {
        "layered_graph"
    }
}
