//! Support graphs and highest-label push-relabel max flow.

use crate::instance::Instance;
use crate::model::{FractionalPoint, VariableMap};

/// Capacity of auxiliary attachments to super terminals in tests and
/// callers without a support graph at hand.
pub const BIG: f64 = 1e9;
/// Support edges below this are dropped.
pub const EPS_SUPP: f64 = 1e-9;
const EPS_FLOW: f64 = 1e-12;

/// Capacitated graph over `V* = {i in T : y*_i > 0} ∪ D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGraph {
    /// Local vertex of each node.
    pub vertices: Vec<usize>,
    node_of: Vec<Option<usize>>,
    /// `(node, node, capacity)`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl SupportGraph {
    pub fn node(&self, v: usize) -> Option<usize> {
        self.node_of[v]
    }

    pub fn num_nodes(&self) -> usize {
        self.vertices.len()
    }

    /// Flow network over the support nodes plus `s = n`, `t = n + 1`.
    pub fn network(&self) -> FlowGraph {
        let mut g = FlowGraph::new(self.vertices.len() + 2);
        for &(u, v, c) in &self.edges {
            g.add_edge(u, v, c);
        }
        g
    }

    /// Terminal-arc capacity exceeding every finite cut.  Kept close to the
    /// edge weights so push-relabel arithmetic stays exact enough.
    pub fn terminal_capacity(&self) -> f64 {
        1.0 + self.edges.iter().map(|e| e.2).sum::<f64>()
    }

    /// `x*(δ(S))` for a node set given as a membership mask.
    pub fn cut_value(&self, inside: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| inside[u] != inside[v])
            .map(|&(_, _, c)| c)
            .sum()
    }

    /// Connected components of the support graph, as node lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

pub fn build_support(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> SupportGraph {
    let k = inst.num_depots();
    let mut vertices: Vec<usize> = (0..k).collect();
    for t in 0..inst.num_targets() {
        if point.y(map, t) > EPS_SUPP {
            vertices.push(k + t);
        }
    }
    let mut node_of = vec![None; inst.num_vertices()];
    for (i, &v) in vertices.iter().enumerate() {
        node_of[v] = Some(i);
    }
    let mut edges = Vec::new();
    for e in 0..map.num_edges() {
        let c = point.values[e];
        if c <= EPS_SUPP {
            continue;
        }
        let (u, v) = map.endpoints(e);
        if let (Some(a), Some(b)) = (node_of[u], node_of[v]) {
            edges.push((a, b, c));
        }
    }
    SupportGraph {
        vertices,
        node_of,
        edges,
    }
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    rev: usize,
    cap: f64,
}

/// Residual network with paired arcs.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    adj: Vec<Vec<Arc>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: f64,
    /// Nodes reachable from `s` in the final residual graph.
    pub source_side: Vec<bool>,
    /// Net outflow at every node (zero away from the terminals).
    pub imbalance: Vec<f64>,
}

impl MaxFlow {
    pub fn source_nodes(&self) -> Vec<usize> {
        (0..self.source_side.len()).filter(|&v| self.source_side[v]).collect()
    }
}

impl FlowGraph {
    pub fn new(n: usize) -> FlowGraph {
        FlowGraph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    fn push_pair(&mut self, u: usize, v: usize, cu: f64, cv: f64) {
        assert!(u != v, "self loop");
        let ru = self.adj[u].len();
        let rv = self.adj[v].len();
        self.adj[u].push(Arc { to: v, rev: rv, cap: cu });
        self.adj[v].push(Arc { to: u, rev: ru, cap: cv });
    }

    /// Undirected edge; both directions get capacity `c`.
    pub fn add_edge(&mut self, u: usize, v: usize, c: f64) {
        self.push_pair(u, v, c, c);
    }

    pub fn add_arc(&mut self, u: usize, v: usize, c: f64) {
        self.push_pair(u, v, c, 0.0);
    }

    /// Capacity of the cut `(side, not side)` over the original arcs.
    fn cut_capacity(original: &FlowGraph, side: &[bool]) -> f64 {
        let mut c = 0.0;
        for (u, arcs) in original.adj.iter().enumerate() {
            if !side[u] {
                continue;
            }
            for a in arcs {
                if !side[a.to] {
                    c += a.cap;
                }
            }
        }
        c
    }

    /// Highest-label push-relabel with the gap heuristic.  The returned value
    /// is the capacity of the canonical (residual-reachable) cut.
    pub fn max_flow_min_cut(&self, s: usize, t: usize) -> MaxFlow {
        assert!(s != t && s < self.adj.len() && t < self.adj.len());
        let n = self.adj.len();
        let mut g = self.clone();
        let mut h = vec![0usize; n];
        let mut excess = vec![0.0f64; n];
        let mut count = vec![0usize; 2 * n + 1];
        h[s] = n;
        count[0] = n - 1;
        count[n] = 1;
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 1];
        let mut active = vec![false; n];
        let mut highest = 0usize;
        for i in 0..g.adj[s].len() {
            let c = g.adj[s][i].cap;
            if c <= 0.0 {
                continue;
            }
            let v = g.adj[s][i].to;
            let r = g.adj[s][i].rev;
            g.adj[s][i].cap = 0.0;
            g.adj[v][r].cap += c;
            excess[v] += c;
            excess[s] -= c;
            if v != t && !active[v] {
                active[v] = true;
                buckets[h[v]].push(v);
            }
        }
        let mut current = vec![0usize; n];
        loop {
            while highest > 0 && buckets[highest].is_empty() {
                highest -= 1;
            }
            let Some(u) = buckets[highest].pop().or_else(|| {
                (0..=2 * n).rev().find_map(|l| buckets[l].pop())
            }) else {
                break;
            };
            active[u] = false;
            // discharge u
            while excess[u] > EPS_FLOW {
                if current[u] == g.adj[u].len() {
                    let old = h[u];
                    let mut best = usize::MAX;
                    for a in &g.adj[u] {
                        if a.cap > EPS_FLOW {
                            best = best.min(h[a.to] + 1);
                        }
                    }
                    if best >= 2 * n {
                        // isolated, or rounding crumbs that cannot return to s
                        excess[u] = 0.0;
                        break;
                    }
                    let new = best;
                    count[old] -= 1;
                    h[u] = new;
                    count[new] += 1;
                    current[u] = 0;
                    if old < n && count[old] == 0 {
                        for v in 0..n {
                            if v != s && h[v] > old && h[v] < n {
                                count[h[v]] -= 1;
                                h[v] = n + 1;
                                count[n + 1] += 1;
                                current[v] = 0;
                            }
                        }
                        if h[u] < n + 1 {
                            count[h[u]] -= 1;
                            h[u] = n + 1;
                            count[n + 1] += 1;
                        }
                        // relocate queued nodes to their new buckets
                        let mut moved = Vec::new();
                        for l in old + 1..n {
                            moved.append(&mut buckets[l]);
                        }
                        for v in moved {
                            buckets[h[v]].push(v);
                        }
                    }
                    continue;
                }
                let i = current[u];
                let (v, r, cap) = {
                    let a = &g.adj[u][i];
                    (a.to, a.rev, a.cap)
                };
                if cap > EPS_FLOW && h[u] == h[v] + 1 {
                    let delta = excess[u].min(cap);
                    g.adj[u][i].cap -= delta;
                    g.adj[v][r].cap += delta;
                    excess[u] -= delta;
                    excess[v] += delta;
                    if v != s && v != t && !active[v] {
                        active[v] = true;
                        buckets[h[v]].push(v);
                        highest = highest.max(h[v]);
                    }
                } else {
                    current[u] += 1;
                }
            }
        }
        // residual reachability from s
        let mut side = vec![false; n];
        side[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &g.adj[u] {
                if a.cap > EPS_FLOW && !side[a.to] {
                    side[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        debug_assert!(!side[t], "sink reachable after max flow");
        let mut imbalance = vec![0.0; n];
        for u in 0..n {
            for (i, a) in g.adj[u].iter().enumerate() {
                // flow on the arc = original capacity - residual
                let orig = self.adj[u][i].cap;
                let f = orig - a.cap;
                if f > 0.0 {
                    imbalance[u] += f;
                    imbalance[a.to] -= f;
                }
            }
        }
        // fold each undirected pair: flow on u->v and v->u net out above
        let value = FlowGraph::cut_capacity(self, &side);
        MaxFlow {
            value,
            source_side: side,
            imbalance,
        }
    }
}
