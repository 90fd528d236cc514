//! Successive-shortest-path min-cost flow with node potentials.
//!
//! Arc costs may be negative as long as the initial residual graph has no
//! negative cycle; a label-correcting pass seeds the potentials, then each
//! augmentation runs Dijkstra on reduced costs.

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    cost: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    original_cap: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FlowOutcome {
    pub flow: i64,
    pub cost: f64,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow { adj: vec![Vec::new(); nodes], arcs: Vec::new(), original_cap: Vec::new() }
    }

    /// Returns the arc id; its reverse arc is `id ^ 1`.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost });
        self.original_cap.push(cap);
        self.original_cap.push(0);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, arc: usize) -> i64 {
        self.original_cap[arc] - self.arcs[arc].cap
    }

    /// Sends up to `limit` units from `s` to `t` along cheapest paths. With
    /// `profitable_only`, stops as soon as the next path would not lower
    /// the total cost.
    pub fn run(&mut self, s: usize, t: usize, limit: i64, profitable_only: bool) -> FlowOutcome {
        let n = self.adj.len();
        let mut potential = self.bellman_ford(s);
        let mut flow = 0;
        let mut cost = 0.0;
        while flow < limit {
            let (dist, parent) = self.dijkstra(s, &potential);
            if dist[t].is_infinite() {
                break;
            }
            let path_cost = dist[t] + potential[t] - potential[s];
            if profitable_only && path_cost >= -EPS {
                break;
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let a = parent[v].expect("path arc");
                push = push.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = parent[v].expect("path arc");
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                v = self.arcs[a ^ 1].to;
            }
            flow += push;
            cost += path_cost * push as f64;
            for v in 0..n {
                if dist[v].is_finite() {
                    potential[v] += dist[v];
                }
            }
        }
        FlowOutcome { flow, cost }
    }

    fn bellman_ford(&self, s: usize) -> Vec<f64> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u].is_infinite() {
                    continue;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] - EPS {
                        dist[arc.to] = dist[u] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // unreachable nodes never carry flow; any finite potential works
        dist.iter().map(|&d| if d.is_finite() { d } else { 0.0 }).collect()
    }

    fn dijkstra(&self, s: usize, potential: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![None; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        loop {
            let mut u = None;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && u.is_none_or(|w: usize| dist[v] < dist[w]) {
                    u = Some(v);
                }
            }
            let Some(u) = u else { break };
            done[u] = true;
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap <= 0 || done[arc.to] {
                    continue;
                }
                let reduced = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                if dist[u] + reduced < dist[arc.to] - EPS {
                    dist[arc.to] = dist[u] + reduced;
                    parent[arc.to] = Some(a);
                }
            }
        }
        (dist, parent)
    }
}
