//! Two-index formulation: variable layout, base rows, cut rows and
//! integer-solution decoding.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::instance::Instance;

/// Tolerance for declaring a row violated.
pub const EPS_CUT: f64 = 1e-6;
/// Tolerance for declaring a value integral.
pub const EPS_INT: f64 = 1e-6;

const NO_EDGE: usize = usize::MAX;

/// Index layout of the `x` and `y` variables.
///
/// Edge variables come first: target-target edges `γ(T)` in lexicographic
/// order, then depot-target edges `(D:T)` ordered by target then depot.  The
/// `y` variable of target `t` is `num_edges() + t`.
#[derive(Debug, Clone)]
pub struct VariableMap {
    depots: usize,
    targets: usize,
    edges: Vec<(usize, usize)>,
    edge_index: Vec<usize>,
    first_depot_edge: usize,
}

impl VariableMap {
    pub fn new(inst: &Instance) -> VariableMap {
        let k = inst.num_depots();
        let n = inst.num_targets();
        let nv = k + n;
        let mut edges = Vec::with_capacity(n * (n - 1) / 2 + n * k);
        for a in 0..n {
            for b in a + 1..n {
                edges.push((k + a, k + b));
            }
        }
        let first_depot_edge = edges.len();
        for t in 0..n {
            for d in 0..k {
                edges.push((d, k + t));
            }
        }
        let mut edge_index = vec![NO_EDGE; nv * nv];
        for (e, &(u, v)) in edges.iter().enumerate() {
            edge_index[u * nv + v] = e;
            edge_index[v * nv + u] = e;
        }
        VariableMap {
            depots: k,
            targets: n,
            edges,
            edge_index,
            first_depot_edge,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vars(&self) -> usize {
        self.edges.len() + self.targets
    }

    pub fn num_targets(&self) -> usize {
        self.targets
    }

    pub fn num_depots(&self) -> usize {
        self.depots
    }

    /// Variable of the edge between two local vertices, if that edge exists.
    #[inline]
    pub fn edge(&self, u: usize, v: usize) -> Option<usize> {
        let e = self.edge_index[u * (self.depots + self.targets) + v];
        (e != NO_EDGE).then_some(e)
    }

    /// Variable of the edge between two local vertices; panics on depot pairs.
    #[inline]
    pub fn x(&self, u: usize, v: usize) -> usize {
        self.edge(u, v).expect("no such edge")
    }

    #[inline]
    pub fn y(&self, t: usize) -> usize {
        self.edges.len() + t
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn is_depot_edge(&self, e: usize) -> bool {
        e >= self.first_depot_edge && e < self.edges.len()
    }

    pub fn is_y(&self, var: usize) -> bool {
        var >= self.edges.len()
    }

    /// Upper bound of a variable: 2 on depot edges, 1 otherwise.
    pub fn upper_bound(&self, var: usize) -> f64 {
        if self.is_depot_edge(var) {
            2.0
        } else {
            1.0
        }
    }

    pub fn objective(&self, inst: &Instance) -> Vec<f64> {
        let mut c = vec![0.0; self.num_vars()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            c[e] = inst.c(u, v) as f64;
        }
        c
    }

    pub fn describe(&self, inst: &Instance, var: usize) -> String {
        if self.is_y(var) {
            format!("y_{}", inst.target_ids()[var - self.edges.len()])
        } else {
            let (u, v) = self.edges[var];
            format!("x_{}_{}", inst.vertex_id(u), inst.vertex_id(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutClass {
    Degree,
    Assignment,
    Sec1,
    Sec2,
    Pec4,
    Pec,
    Comb,
    Tcomb,
    /// Rows that are not part of the formulation (tests, user rows).
    Other,
}

impl CutClass {
    pub fn label(self) -> &'static str {
        match self {
            CutClass::Degree => "degree",
            CutClass::Assignment => "assignment",
            CutClass::Sec1 => "sec1",
            CutClass::Sec2 => "sec2",
            CutClass::Pec4 => "4pec",
            CutClass::Pec => "pec",
            CutClass::Comb => "comb",
            CutClass::Tcomb => "tcomb",
            CutClass::Other => "other",
        }
    }
}

/// A sparse linear row `sum coeffs * vars (sense) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRow {
    coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub class: CutClass,
    hash: u64,
}

impl CutRow {
    /// Builds a row; duplicate variables are merged and zero coefficients
    /// dropped.
    pub fn new(mut coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64, class: CutClass) -> CutRow {
        coeffs.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (v, a) in coeffs {
            assert!(a.is_finite(), "non-finite coefficient");
            match merged.last_mut() {
                Some((lv, la)) if *lv == v => *la += a,
                _ => merged.push((v, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        assert!(!merged.is_empty(), "empty row");
        assert!(rhs.is_finite(), "non-finite rhs");
        let hash = fingerprint(&merged, sense, rhs);
        CutRow {
            coeffs: merged,
            sense,
            rhs,
            class,
            hash,
        }
    }

    pub fn coeffs(&self) -> &[(usize, f64)] {
        &self.coeffs
    }

    /// Canonical fingerprint; equal for rows with the same coefficients,
    /// sense and right-hand side.
    pub fn fingerprint(&self) -> u64 {
        self.hash
    }

    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * values[v]).sum()
    }

    pub fn coefficient(&self, var: usize) -> f64 {
        match self.coeffs.binary_search_by_key(&var, |&(v, _)| v) {
            Ok(i) => self.coeffs[i].1,
            Err(_) => 0.0,
        }
    }

    /// Signed slack at `values`; negative means violated.
    pub fn slack(&self, values: &[f64]) -> f64 {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Ge => lhs - self.rhs,
            Sense::Le => self.rhs - lhs,
            Sense::Eq => -(lhs - self.rhs).abs(),
        }
    }

    pub fn max_var(&self) -> usize {
        self.coeffs.last().map(|&(v, _)| v).unwrap_or(0)
    }
}

fn quantize(a: f64) -> i64 {
    (a * 1e9).round() as i64
}

fn fingerprint(coeffs: &[(usize, f64)], sense: Sense, rhs: f64) -> u64 {
    let mut h = DefaultHasher::new();
    sense.hash(&mut h);
    quantize(rhs).hash(&mut h);
    for &(v, a) in coeffs {
        v.hash(&mut h);
        quantize(a).hash(&mut h);
    }
    h.finish()
}

/// An LP solution `(x*, y*)` laid out by a [`VariableMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    pub values: Vec<f64>,
    /// Branch-and-bound node that produced the point.
    pub node: u64,
}

impl FractionalPoint {
    pub fn new(values: Vec<f64>) -> FractionalPoint {
        FractionalPoint { values, node: 0 }
    }

    #[inline]
    pub fn x(&self, map: &VariableMap, u: usize, v: usize) -> f64 {
        map.edge(u, v).map_or(0.0, |e| self.values[e])
    }

    #[inline]
    pub fn y(&self, map: &VariableMap, t: usize) -> f64 {
        self.values[map.y(t)]
    }

    pub fn is_integral(&self) -> bool {
        self.values
            .iter()
            .all(|v| (v - v.round()).abs() <= EPS_INT)
    }
}

/// Slack of `row` at `point` (`lhs - rhs` for `>=`, `rhs - lhs` for `<=`).
pub fn evaluate_row(row: &CutRow, point: &FractionalPoint) -> f64 {
    assert!(
        row.max_var() < point.values.len(),
        "row references variable {} outside the point",
        row.max_var()
    );
    row.slack(&point.values)
}

/// Base rows: degree equalities and cluster covering rows.
pub fn build_base_lp(inst: &Instance) -> (VariableMap, Vec<CutRow>) {
    let map = VariableMap::new(inst);
    let k = inst.num_depots();
    let nv = inst.num_vertices();
    let mut rows = Vec::new();
    for t in 0..inst.num_targets() {
        let v = k + t;
        let mut coeffs: Vec<(usize, f64)> = (0..nv)
            .filter(|&u| u != v)
            .map(|u| (map.x(u, v), 1.0))
            .collect();
        coeffs.push((map.y(t), -2.0));
        rows.push(CutRow::new(coeffs, Sense::Eq, 0.0, CutClass::Degree));
    }
    for c in inst.clusters() {
        let coeffs = c.iter().map(|&t| (map.y(t), 1.0)).collect();
        rows.push(CutRow::new(coeffs, Sense::Ge, 1.0, CutClass::Assignment));
    }
    (map, rows)
}

/// A depot-rooted cycle.  A single target means the doubled edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    /// Depot index `0..k`.
    pub depot: usize,
    /// Target indices `0..n` in visiting order.
    pub targets: Vec<usize>,
}

impl Cycle {
    pub fn cost(&self, inst: &Instance) -> i64 {
        let d = self.depot;
        let vs: Vec<usize> = self.targets.iter().map(|&t| inst.target_vertex(t)).collect();
        match vs.len() {
            0 => 0,
            1 => 2 * inst.c(d, vs[0]),
            _ => {
                inst.c(d, vs[0])
                    + vs.windows(2).map(|w| inst.c(w[0], w[1])).sum::<i64>()
                    + inst.c(vs[vs.len() - 1], d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegerSolution {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub cycles: Vec<Cycle>,
    pub cost: i64,
}

impl IntegerSolution {
    /// Builds `x`, `y` from cycles.  No feasibility check is made.
    pub fn from_cycles(inst: &Instance, map: &VariableMap, cycles: Vec<Cycle>) -> IntegerSolution {
        let mut x = vec![0u8; map.num_edges()];
        let mut y = vec![0u8; inst.num_targets()];
        let mut kept = Vec::new();
        for cyc in cycles {
            if cyc.targets.is_empty() {
                continue;
            }
            let d = cyc.depot;
            let vs: Vec<usize> = cyc.targets.iter().map(|&t| inst.target_vertex(t)).collect();
            for &t in &cyc.targets {
                y[t] += 1;
            }
            if vs.len() == 1 {
                x[map.x(d, vs[0])] += 2;
            } else {
                x[map.x(d, vs[0])] += 1;
                for w in vs.windows(2) {
                    x[map.x(w[0], w[1])] += 1;
                }
                x[map.x(vs[vs.len() - 1], d)] += 1;
            }
            kept.push(cyc);
        }
        let cost = kept.iter().map(|c| c.cost(inst)).sum();
        IntegerSolution {
            x,
            y,
            cycles: kept,
            cost,
        }
    }

    /// Full variable vector (x then y) as reals.
    pub fn values(&self) -> Vec<f64> {
        self.x
            .iter()
            .chain(self.y.iter())
            .map(|&v| v as f64)
            .collect()
    }
}

/// Why an integer vector is not a feasible solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Bounds { var: usize },
    Degree { target: usize, degree: u32, visited: u8 },
    ClusterUncovered { cluster: usize },
    /// Closed cycle made of targets only.
    Subtour { targets: Vec<usize> },
    /// Path between two distinct depots through at least two targets.
    MultiDepotPath { from: usize, to: usize, targets: Vec<usize> },
    /// Path between two distinct depots through a single target.
    TwoPath { from: usize, to: usize, target: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Bounds { var } => write!(f, "variable {var} outside its bounds"),
            Violation::Degree { target, degree, visited } => write!(
                f,
                "degree of target {target} is {degree} but y = {visited}"
            ),
            Violation::ClusterUncovered { cluster } => write!(f, "cluster {cluster} uncovered"),
            Violation::Subtour { targets } => write!(f, "subtour over {targets:?}"),
            Violation::MultiDepotPath { from, to, targets } => write!(
                f,
                "path with more than one depot: depot {from} -> {targets:?} -> depot {to}"
            ),
            Violation::TwoPath { from, to, target } => {
                write!(f, "2-path between depots {from} and {to} through target {target}")
            }
        }
    }
}

/// Walk decomposition of an integer point whose degrees are consistent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Walks {
    /// Depot-to-same-depot trips.
    pub cycles: Vec<Cycle>,
    /// Depot-to-other-depot trips: `(from, targets, to)`.
    pub depot_paths: Vec<(usize, Vec<usize>, usize)>,
    /// Target-only cycles.
    pub subtours: Vec<Vec<usize>>,
}

/// Checks bounds and degree equalities, then splits the edge multiset into
/// trips.  Targets are reported as target indices.
pub fn decode_walks(inst: &Instance, map: &VariableMap, x: &[u8], y: &[u8]) -> Result<Walks, Violation> {
    let k = inst.num_depots();
    let n = inst.num_targets();
    let nv = k + n;
    for (e, &v) in x.iter().enumerate() {
        if v as f64 > map.upper_bound(e) {
            return Err(Violation::Bounds { var: e });
        }
    }
    for (t, &v) in y.iter().enumerate() {
        if v > 1 {
            return Err(Violation::Bounds { var: map.y(t) });
        }
    }
    for t in 0..n {
        let v = k + t;
        let deg: u32 = (0..nv)
            .filter(|&u| u != v)
            .map(|u| x[map.x(u, v)] as u32)
            .sum();
        if deg != 2 * y[t] as u32 {
            return Err(Violation::Degree {
                target: t,
                degree: deg,
                visited: y[t],
            });
        }
    }
    let mut left: Vec<u8> = x.to_vec();
    let incident = |v: usize, left: &[u8]| -> Option<(usize, usize)> {
        (0..nv)
            .filter(|&u| u != v)
            .filter_map(|u| map.edge(u, v).map(|e| (e, u)))
            .filter(|&(e, _)| left[e] > 0)
            .min_by_key(|&(e, _)| e)
    };
    let mut walks = Walks::default();
    for d in 0..k {
        while let Some((e, first)) = incident(d, &left) {
            left[e] -= 1;
            let mut seq = vec![first - k];
            let mut cur = first;
            let end = loop {
                let (e2, next) = incident(cur, &left).expect("degree 2 at every visited target");
                left[e2] -= 1;
                if next < k {
                    break next;
                }
                seq.push(next - k);
                cur = next;
            };
            if end == d {
                walks.cycles.push(Cycle {
                    depot: d,
                    targets: seq,
                });
            } else {
                walks.depot_paths.push((d, seq, end));
            }
        }
    }
    for t in 0..n {
        let start = k + t;
        if incident(start, &left).is_none() {
            continue;
        }
        let mut seq = vec![t];
        let mut cur = start;
        loop {
            let (e, next) = incident(cur, &left).expect("degree 2 on a subtour");
            left[e] -= 1;
            if next == start {
                break;
            }
            seq.push(next - k);
            cur = next;
        }
        walks.subtours.push(seq);
    }
    Ok(walks)
}

/// Verifies an integer point and decodes its cycles.  2-paths are rejected.
pub fn check_feasible(inst: &Instance, map: &VariableMap, x: &[u8], y: &[u8]) -> Result<IntegerSolution, Violation> {
    let walks = decode_walks(inst, map, x, y)?;
    for (h, c) in inst.clusters().iter().enumerate() {
        if c.iter().all(|&t| y[t] == 0) {
            return Err(Violation::ClusterUncovered { cluster: h });
        }
    }
    if let Some(s) = walks.subtours.first() {
        return Err(Violation::Subtour { targets: s.clone() });
    }
    if let Some((from, seq, to)) = walks.depot_paths.first() {
        return Err(if seq.len() == 1 {
            Violation::TwoPath {
                from: *from,
                to: *to,
                target: seq[0],
            }
        } else {
            Violation::MultiDepotPath {
                from: *from,
                to: *to,
                targets: seq.clone(),
            }
        });
    }
    let cost = walks.cycles.iter().map(|c| c.cost(inst)).sum();
    Ok(IntegerSolution {
        x: x.to_vec(),
        y: y.to_vec(),
        cycles: walks.cycles,
        cost,
    })
}

/// Replaces every 2-path `d1 - t - d2` by the cheaper doubled edge
/// `d - t - d`, `d in {d1, d2}`.  The cost never increases.
pub fn repair_two_paths(inst: &Instance, map: &VariableMap, x: &mut [u8], walks: &Walks) -> bool {
    let mut changed = false;
    for (from, seq, to) in &walks.depot_paths {
        if seq.len() != 1 {
            continue;
        }
        let v = inst.target_vertex(seq[0]);
        let (keep, drop) = if inst.c(*from, v) <= inst.c(*to, v) {
            (*from, *to)
        } else {
            (*to, *from)
        };
        x[map.x(drop, v)] -= 1;
        x[map.x(keep, v)] += 1;
        changed = true;
    }
    changed
}

/// JSON form of a solution, with file vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: i64,
    pub cycles: Vec<CycleFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleFile {
    pub depot: usize,
    pub targets: Vec<usize>,
}

impl SolutionFile {
    pub fn from_solution(inst: &Instance, sol: &IntegerSolution) -> SolutionFile {
        SolutionFile {
            cost: sol.cost,
            cycles: sol
                .cycles
                .iter()
                .map(|c| CycleFile {
                    depot: inst.depot_ids()[c.depot],
                    targets: c.targets.iter().map(|&t| inst.target_ids()[t]).collect(),
                })
                .collect(),
        }
    }

    /// Maps file ids back to local numbers.
    pub fn to_cycles(&self, inst: &Instance) -> Result<Vec<Cycle>, String> {
        self.cycles
            .iter()
            .map(|c| {
                let depot = inst
                    .depot_ids()
                    .iter()
                    .position(|&d| d == c.depot)
                    .ok_or_else(|| format!("{} is not a depot", c.depot))?;
                let targets = c
                    .targets
                    .iter()
                    .map(|&id| {
                        inst.target_ids()
                            .iter()
                            .position(|&t| t == id)
                            .ok_or_else(|| format!("{id} is not a target"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Cycle { depot, targets })
            })
            .collect()
    }

    /// Plain-text listing, one cycle per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("cost {}\n", self.cost);
        for c in &self.cycles {
            let mut parts = vec![c.depot.to_string()];
            parts.extend(c.targets.iter().map(|t| t.to_string()));
            parts.push(c.depot.to_string());
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }
}
