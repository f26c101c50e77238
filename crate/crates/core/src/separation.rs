//! Separation of subtour, path, comb and T-comb inequalities.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::instance::Instance;
use crate::maxflow::{build_support, FlowGraph, SupportGraph};
use crate::model::{evaluate_row, CutClass, CutRow, FractionalPoint, Sense, VariableMap, EPS_CUT};

pub const MAX_CUTS_PER_FAMILY: usize = 50;

/// `μ(S)`: number of clusters entirely inside the target set `S`.
pub fn mu(inst: &Instance, in_set: &[bool]) -> usize {
    inst.clusters()
        .iter()
        .filter(|c| c.iter().all(|&t| in_set[t]))
        .count()
}

fn mask(n: usize, members: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut m = vec![false; n];
    for t in members {
        m[t] = true;
    }
    m
}

/// Terms of `x(δ(S))` for a target set `S`.
pub fn delta_terms(inst: &Instance, map: &VariableMap, in_set: &[bool], coef: f64) -> Vec<(usize, f64)> {
    let k = inst.num_depots();
    let mut out = Vec::new();
    for u in 0..inst.num_targets() {
        if !in_set[u] {
            continue;
        }
        for w in 0..inst.num_vertices() {
            if w >= k && in_set[w - k] || w == k + u {
                continue;
            }
            out.push((map.x(k + u, w), coef));
        }
    }
    out
}

/// Terms of `x(γ(S))` for a target set `S`.
pub fn gamma_terms(inst: &Instance, map: &VariableMap, members: &[usize], coef: f64) -> Vec<(usize, f64)> {
    let k = inst.num_depots();
    let mut out = Vec::new();
    for (a, &u) in members.iter().enumerate() {
        for &w in &members[a + 1..] {
            out.push((map.x(k + u, k + w), coef));
        }
    }
    out
}

pub fn sec1_row(inst: &Instance, map: &VariableMap, s: &[bool]) -> CutRow {
    CutRow::new(delta_terms(inst, map, s, 1.0), Sense::Ge, 2.0, CutClass::Sec1)
}

pub fn sec2_row(inst: &Instance, map: &VariableMap, s: &[bool], i: usize) -> CutRow {
    let mut c = delta_terms(inst, map, s, 1.0);
    c.push((map.y(i), -2.0));
    CutRow::new(c, Sense::Ge, 0.0, CutClass::Sec2)
}

/// `x(δ(S)) >= 2` when `μ(S) != 0`, else `x(δ(S)) >= 2 y_i`.
pub fn gsec_row(inst: &Instance, map: &VariableMap, s: &[bool], i: usize) -> CutRow {
    if mu(inst, s) != 0 {
        sec1_row(inst, map, s)
    } else {
        sec2_row(inst, map, s, i)
    }
}

/// `x(D':j) + 3 x_jk + x(k:D\D') <= 2 y_j + 2 y_k`; `in_dp` flags `D'`.
pub fn four_path_row(inst: &Instance, map: &VariableMap, j: usize, k: usize, in_dp: &[bool]) -> CutRow {
    let nd = inst.num_depots();
    let (vj, vk) = (nd + j, nd + k);
    let mut c = vec![(map.x(vj, vk), 3.0), (map.y(j), -2.0), (map.y(k), -2.0)];
    for d in 0..nd {
        if in_dp[d] {
            c.push((map.x(d, vj), 1.0));
        } else {
            c.push((map.x(d, vk), 1.0));
        }
    }
    CutRow::new(c, Sense::Le, 0.0, CutClass::Pec4)
}

/// Cut form of the generalized path constraint over `S̄ = S ∪ {j, k}`:
/// `x(δ(S̄)) - x(D':j) - x(k:D\D') >= y_i` if `μ(S) = 0`, `>= 1` otherwise.
pub fn pec_row(inst: &Instance, map: &VariableMap, s: &[bool], j: usize, k: usize, in_dp: &[bool], i: usize) -> CutRow {
    let nd = inst.num_depots();
    debug_assert!(!s[j] && !s[k] && s[i]);
    let mut sbar = s.to_vec();
    sbar[j] = true;
    sbar[k] = true;
    let mut c = delta_terms(inst, map, &sbar, 1.0);
    for d in 0..nd {
        if in_dp[d] {
            c.push((map.x(d, nd + j), -1.0));
        } else {
            c.push((map.x(d, nd + k), -1.0));
        }
    }
    if mu(inst, s) != 0 {
        CutRow::new(c, Sense::Ge, 1.0, CutClass::Pec)
    } else {
        c.push((map.y(i), -1.0));
        CutRow::new(c, Sense::Ge, 0.0, CutClass::Pec)
    }
}

/// Lifted comb row.  Teeth are target sets; all sets are target indices.
pub fn comb_row(inst: &Instance, map: &VariableMap, handle: &[usize], teeth: &[Vec<usize>]) -> CutRow {
    let n = inst.num_targets();
    let t = teeth.len();
    assert!(t >= 3 && t % 2 == 1, "comb needs an odd number of teeth");
    let in_h = mask(n, handle.iter().copied());
    let mut c = gamma_terms(inst, map, handle, 1.0);
    let mut beta = vec![0.0; n];
    for &v in handle {
        beta[v] = 1.0;
    }
    let mut size = handle.len() as f64;
    for tooth in teeth {
        c.extend(gamma_terms(inst, map, tooth, 1.0));
        size += tooth.len() as f64;
        let inside: Vec<usize> = tooth.iter().copied().filter(|&v| in_h[v]).collect();
        let outside: Vec<usize> = tooth.iter().copied().filter(|&v| !in_h[v]).collect();
        assert!(!inside.is_empty() && !outside.is_empty(), "tooth must cross the handle");
        for &v in &inside {
            beta[v] = 2.0;
        }
        for &v in &outside {
            beta[v] = 1.0;
        }
        if mu(inst, &mask(n, inside.iter().copied())) == 0 {
            beta[*inside.iter().min().unwrap()] = 1.0;
        }
        if mu(inst, &mask(n, outside.iter().copied())) == 0 {
            beta[*outside.iter().min().unwrap()] = 0.0;
        }
    }
    let sigma = size - (3 * t + 1) as f64 / 2.0;
    let mut constant = 0.0;
    for v in 0..n {
        if beta[v] != 0.0 {
            c.push((map.y(v), -beta[v]));
            constant += beta[v];
        }
    }
    CutRow::new(c, Sense::Le, sigma - constant, CutClass::Comb)
}

/// Lifted T-comb row with two-vertex teeth `{d_i, v_i}`, all `v_i` in `handle`.
/// With a single handle target outside the teeth this is the unlifted form.
pub fn tcomb_row(inst: &Instance, map: &VariableMap, handle: &[usize], teeth: &[(usize, usize)]) -> CutRow {
    let n = inst.num_targets();
    let nd = inst.num_depots();
    let t = teeth.len();
    assert!(t >= 2, "T-comb needs two teeth");
    let in_teeth = mask(n, teeth.iter().map(|&(_, v)| v));
    let rest: Vec<usize> = handle.iter().copied().filter(|&v| !in_teeth[v]).collect();
    assert!(!rest.is_empty(), "handle must stick out of the teeth");
    let anchor = *rest.iter().min().unwrap();
    let mut c = gamma_terms(inst, map, handle, 1.0);
    for &(d, v) in teeth {
        c.push((map.x(d, nd + v), 1.0));
        c.push((map.y(v), -2.0));
    }
    for &v in &rest {
        if v != anchor {
            c.push((map.y(v), -1.0));
        }
    }
    CutRow::new(c, Sense::Le, 0.0, CutClass::Tcomb)
}

/// Best proper nonempty `D'` for the pair `(j, k)` and the value
/// `L = x*(D':j) + x*(k:D\D')`.
pub fn best_depot_split(inst: &Instance, map: &VariableMap, p: &FractionalPoint, j: usize, k: usize) -> (Vec<bool>, f64) {
    let nd = inst.num_depots();
    let (vj, vk) = (nd + j, nd + k);
    let diff: Vec<f64> = (0..nd).map(|d| p.x(map, d, vj) - p.x(map, d, vk)).collect();
    let mut dp: Vec<bool> = diff.iter().map(|&g| g >= 0.0).collect();
    if nd >= 2 {
        if dp.iter().all(|&b| b) {
            let d = (0..nd).min_by(|&a, &b| diff[a].total_cmp(&diff[b])).unwrap();
            dp[d] = false;
        } else if dp.iter().all(|&b| !b) {
            let d = (0..nd).min_by(|&a, &b| (-diff[a]).total_cmp(&-diff[b])).unwrap();
            dp[d] = true;
        }
    }
    let l = (0..nd)
        .map(|d| if dp[d] { p.x(map, d, vj) } else { p.x(map, d, vk) })
        .sum();
    (dp, l)
}

/// A candidate row together with its violation at the point.
#[derive(Debug, Clone)]
pub struct Cut {
    pub row: CutRow,
    pub violation: f64,
}

/// Separation state for one fractional point.
pub struct Separator<'a> {
    pub inst: &'a Instance,
    pub map: &'a VariableMap,
    pub point: &'a FractionalPoint,
    pub support: SupportGraph,
    base: FlowGraph,
    pub limit: usize,
}

impl<'a> Separator<'a> {
    pub fn new(inst: &'a Instance, map: &'a VariableMap, point: &'a FractionalPoint) -> Separator<'a> {
        let support = build_support(point, inst, map);
        let base = support.network();
        Separator {
            inst,
            map,
            point,
            support,
            base,
            limit: MAX_CUTS_PER_FAMILY,
        }
    }

    fn y(&self, t: usize) -> f64 {
        self.point.y(self.map, t)
    }

    /// Min cut with `forced` targets on the source side and depots on the
    /// sink side.  Returns the source-side target mask and the cut value.
    fn min_cut(&self, forced: &[usize]) -> (Vec<bool>, f64) {
        let nn = self.support.num_nodes();
        let (s, t) = (nn, nn + 1);
        let mut g = self.base.clone();
        let k = self.inst.num_depots();
        let big = self.support.terminal_capacity();
        for &f in forced {
            if let Some(v) = self.support.node(k + f) {
                g.add_arc(s, v, big);
            }
        }
        for d in 0..k {
            g.add_arc(d, t, big);
        }
        let flow = g.max_flow_min_cut(s, t);
        let mut side = vec![false; self.inst.num_targets()];
        for v in 0..nn {
            if flow.source_side[v] {
                let vert = self.support.vertices[v];
                debug_assert!(vert >= k, "depot on the source side");
                side[vert - k] = true;
            }
        }
        for &f in forced {
            side[f] = true;
        }
        (side, flow.value)
    }

    fn finish(&self, cands: Vec<Cut>) -> Vec<CutRow> {
        let mut seen = HashSet::new();
        let mut cuts: Vec<Cut> = cands
            .into_iter()
            .filter(|c| c.violation > EPS_CUT)
            .filter(|c| seen.insert(c.row.fingerprint()))
            .collect();
        cuts.sort_by(|a, b| b.violation.total_cmp(&a.violation));
        cuts.truncate(self.limit);
        cuts.into_iter().map(|c| c.row).collect()
    }

    fn cut(&self, row: CutRow) -> Cut {
        let violation = -evaluate_row(&row, self.point);
        Cut { row, violation }
    }

    /// `x(δ(S)) >= 2` for sets containing a whole cluster.
    pub fn gsec_cluster(&self) -> Vec<CutRow> {
        let cands: Vec<Cut> = (0..self.inst.num_clusters())
            .into_par_iter()
            .filter_map(|h| {
                let (side, value) = self.min_cut(self.inst.cluster(h));
                (value < 2.0 - EPS_CUT).then(|| self.cut(sec1_row(self.inst, self.map, &side)))
            })
            .collect();
        self.finish(cands)
    }

    /// `x(δ(S)) >= 2 y_i`, promoted to the cluster form when `μ(S) != 0`.
    pub fn gsec_target(&self) -> Vec<CutRow> {
        let cands: Vec<Cut> = (0..self.inst.num_targets())
            .into_par_iter()
            .filter(|&i| self.y(i) > EPS_CUT)
            .filter_map(|i| {
                let (side, value) = self.min_cut(&[i]);
                (value < 2.0 * self.y(i) - EPS_CUT).then(|| self.cut(gsec_row(self.inst, self.map, &side, i)))
            })
            .collect();
        self.finish(cands)
    }

    pub fn four_path(&self) -> Vec<CutRow> {
        let nd = self.inst.num_depots();
        if nd < 2 {
            return Vec::new();
        }
        let act: Vec<usize> = (0..self.inst.num_targets()).filter(|&t| self.y(t) > 0.0).collect();
        let mut cands = Vec::new();
        for (a, &j) in act.iter().enumerate() {
            for &k in &act[a + 1..] {
                let (vj, vk) = (nd + j, nd + k);
                let dp: Vec<bool> = (0..nd)
                    .map(|d| self.point.x(self.map, d, vj) >= self.point.x(self.map, d, vk))
                    .collect();
                if dp.iter().all(|&b| b) || dp.iter().all(|&b| !b) {
                    continue;
                }
                let row = four_path_row(self.inst, self.map, j, k, &dp);
                let c = self.cut(row);
                if c.violation > EPS_CUT {
                    cands.push(c);
                }
            }
        }
        self.finish(cands)
    }

    /// Generalized path constraints in cut form, both the cluster-forced and
    /// the target-forced searches.
    pub fn gpec(&self) -> Vec<CutRow> {
        let inst = self.inst;
        let n = inst.num_targets();
        if inst.num_depots() < 2 {
            return Vec::new();
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
        let per_pair: Vec<Vec<Cut>> = pairs
            .par_iter()
            .map(|&(j, k)| {
                let (dp, l) = best_depot_split(inst, self.map, self.point, j, k);
                let mut out = Vec::new();
                for h in 0..inst.num_clusters() {
                    let c = inst.cluster(h);
                    if c.contains(&j) || c.contains(&k) {
                        continue;
                    }
                    let mut forced = vec![j, k];
                    forced.extend_from_slice(c);
                    let (mut side, value) = self.min_cut(&forced);
                    if value < l + 1.0 - EPS_CUT {
                        side[j] = false;
                        side[k] = false;
                        let i = c[0];
                        out.push(self.cut(pec_row(inst, self.map, &side, j, k, &dp, i)));
                    }
                }
                for i in 0..n {
                    if i == j || i == k || self.y(i) <= EPS_CUT {
                        continue;
                    }
                    let (mut side, value) = self.min_cut(&[i, j, k]);
                    if value < l + self.y(i) - EPS_CUT {
                        side[j] = false;
                        side[k] = false;
                        out.push(self.cut(pec_row(inst, self.map, &side, j, k, &dp, i)));
                    }
                }
                // an unvisited witness adds nothing to the cut
                if let Some(i) = (0..n).find(|&i| i != j && i != k && self.y(i) <= EPS_CUT) {
                    let (mut side, value) = self.min_cut(&[j, k]);
                    if value < l - EPS_CUT {
                        side[j] = false;
                        side[k] = false;
                        side[i] = true;
                        out.push(self.cut(pec_row(inst, self.map, &side, j, k, &dp, i)));
                    }
                }
                out
            })
            .collect();
        self.finish(per_pair.into_iter().flatten().collect())
    }

    /// Odd-handle heuristic on fractional edges, then on clusters shrunk
    /// into supernodes.
    pub fn two_matching_and_comb(&self) -> Vec<CutRow> {
        let inst = self.inst;
        let n = inst.num_targets();
        let nd = inst.num_depots();
        let x = |a: usize, b: usize| self.point.x(self.map, nd + a, nd + b);
        let mut cands = Vec::new();

        // pass 1: vertices are targets
        let act: Vec<usize> = (0..n).filter(|&t| self.y(t) > 0.0).collect();
        let mut w = vec![vec![0.0; n]; n];
        for &a in &act {
            for &b in &act {
                if a != b {
                    w[a][b] = x(a, b);
                }
            }
        }
        let groups: Vec<Vec<usize>> = act.iter().map(|&t| vec![t]).collect();
        let wg: Vec<Vec<f64>> = (0..groups.len())
            .map(|a| (0..groups.len()).map(|b| w[act[a]][act[b]]).collect())
            .collect();
        for (handle, teeth) in odd_handles(&wg) {
            let h: Vec<usize> = handle.iter().flat_map(|&g| groups[g].iter().copied()).collect();
            let t: Vec<Vec<usize>> = teeth
                .iter()
                .map(|&(a, b)| vec![act[a], act[b]])
                .collect();
            cands.push(self.cut(comb_row(inst, self.map, &h, &t)));
        }

        // pass 2: clusters shrunk into supernodes
        let live: Vec<usize> = (0..inst.num_clusters())
            .filter(|&h| inst.cluster(h).iter().any(|&t| self.y(t) > 0.0))
            .collect();
        let mut wc = vec![vec![0.0; live.len()]; live.len()];
        for (a, &ha) in live.iter().enumerate() {
            for (b, &hb) in live.iter().enumerate() {
                if a == b {
                    continue;
                }
                wc[a][b] = inst
                    .cluster(ha)
                    .iter()
                    .flat_map(|&u| inst.cluster(hb).iter().map(move |&v| (u, v)))
                    .map(|(u, v)| x(u, v))
                    .sum();
            }
        }
        for (handle, teeth) in odd_handles(&wc) {
            let h: Vec<usize> = handle.iter().flat_map(|&g| inst.cluster(live[g]).iter().copied()).collect();
            let t: Vec<Vec<usize>> = teeth
                .iter()
                .map(|&(a, b)| {
                    let mut v = inst.cluster(live[a]).to_vec();
                    v.extend_from_slice(inst.cluster(live[b]));
                    v
                })
                .collect();
            cands.push(self.cut(comb_row(inst, self.map, &h, &t)));
        }
        self.finish(cands)
    }

    pub fn tcomb(&self) -> Vec<CutRow> {
        let inst = self.inst;
        let nd = inst.num_depots();
        let n = inst.num_targets();
        if nd < 3 {
            return Vec::new();
        }
        let p = self.point;
        // one tooth per depot
        let mut teeth: Vec<(usize, usize)> = Vec::new();
        for d in 0..nd {
            let deg_d: f64 = (0..n).map(|t| p.x(self.map, d, nd + t)).sum();
            let mut best: Option<(usize, f64)> = None;
            for v in 0..n {
                let xdv = p.x(self.map, d, nd + v);
                if xdv <= 0.0 {
                    continue;
                }
                let val = deg_d + 2.0 * self.y(v) - 2.0 * xdv;
                if best.is_none_or(|(_, b)| val < b) {
                    best = Some((v, val));
                }
            }
            if let Some((v, _)) = best {
                teeth.push((d, v));
            }
        }
        let comps = self.support.components();
        let mut comp_of = vec![usize::MAX; n];
        for (c, nodes) in comps.iter().enumerate() {
            for &u in nodes {
                let v = self.support.vertices[u];
                if v >= nd {
                    comp_of[v - nd] = c;
                }
            }
        }
        let mut cands = Vec::new();
        let nt = teeth.len();
        for subset in 1u32..(1u32 << nt) {
            let size = subset.count_ones() as usize;
            if size < 2 || size > nd - 1 {
                continue;
            }
            let sel: Vec<(usize, usize)> = (0..nt).filter(|&i| subset >> i & 1 == 1).map(|i| teeth[i]).collect();
            let vs: HashSet<usize> = sel.iter().map(|&(_, v)| v).collect();
            if vs.len() != sel.len() {
                continue;
            }
            let c = comp_of[sel[0].1];
            if sel.iter().any(|&(_, v)| comp_of[v] != c) {
                continue;
            }
            let mut handle: Vec<usize> = (0..n).filter(|&t| comp_of[t] == c).collect();
            let mut rest: Vec<usize> = handle.iter().copied().filter(|v| !vs.contains(v)).collect();
            if rest.is_empty() {
                continue;
            }
            rest.sort_by(|&a, &b| self.y(a).total_cmp(&self.y(b)).then(a.cmp(&b)));
            let mut order = rest.into_iter();
            loop {
                cands.push(self.cut(tcomb_row(inst, self.map, &handle, &sel)));
                let outside = handle.iter().filter(|v| !vs.contains(v)).count();
                if outside <= 1 {
                    break;
                }
                let drop = order.next().unwrap();
                handle.retain(|&v| v != drop);
            }
        }
        self.finish(cands)
    }
}

/// Components of the fractional-weight graph as handles whose crossing
/// near-integral edges form an odd set of disjoint teeth.
fn odd_handles(w: &[Vec<f64>]) -> Vec<(Vec<usize>, Vec<(usize, usize)>)> {
    let n = w.len();
    let frac = |a: usize, b: usize| w[a][b] > EPS_CUT && w[a][b] < 1.0 - EPS_CUT;
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = s;
        comp[s] = id;
        let mut stack = vec![s];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if v != u && comp[v] == usize::MAX && frac(u, v) {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        let mut teeth = Vec::new();
        for &u in &members {
            for v in 0..n {
                if comp[v] != id && w[u][v] >= 1.0 - EPS_CUT {
                    teeth.push((u, v));
                }
            }
        }
        let mut used = HashSet::new();
        let disjoint = teeth.iter().all(|&(a, b)| used.insert(a) && used.insert(b));
        if disjoint && teeth.len() >= 3 && teeth.len() % 2 == 1 {
            out.push((members, teeth));
        }
    }
    out
}

/// Which family a separator belongs to, in the order they are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Sec1,
    Sec2,
    Pec,
    Comb,
    Tcomb,
}

impl Family {
    pub const ORDER: [Family; 5] = [Family::Sec1, Family::Sec2, Family::Pec, Family::Comb, Family::Tcomb];

    pub fn run(self, sep: &Separator) -> Vec<CutRow> {
        match self {
            Family::Sec1 => sep.gsec_cluster(),
            Family::Sec2 => sep.gsec_target(),
            Family::Pec => {
                let mut v = sep.four_path();
                v.extend(sep.gpec());
                v
            }
            Family::Comb => sep.two_matching_and_comb(),
            Family::Tcomb => sep.tcomb(),
        }
    }
}

pub fn separate_gsec_cluster(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).gsec_cluster()
}

pub fn separate_gsec_target(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).gsec_target()
}

pub fn separate_4path(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).four_path()
}

pub fn separate_gpec(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).gpec()
}

pub fn separate_2matching_and_comb(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).two_matching_and_comb()
}

pub fn separate_tcomb(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<CutRow> {
    Separator::new(inst, map, point).tcomb()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cycle, IntegerSolution};

    fn inst(k: usize, clusters: Vec<Vec<usize>>) -> Instance {
        let n: usize = clusters.iter().map(|c| c.len()).sum();
        Instance::new(
            "t",
            (1..=k).collect(),
            (k + 1..=k + n).collect(),
            clusters,
            |u, v| (u as i64 - v as i64).abs(),
        )
        .unwrap()
    }

    fn point_from_edges(inst: &Instance, map: &VariableMap, edges: &[(usize, usize, f64)]) -> FractionalPoint {
        let mut v = vec![0.0; map.num_vars()];
        for &(a, b, x) in edges {
            v[map.x(a, b)] += x;
        }
        let nd = inst.num_depots();
        for t in 0..inst.num_targets() {
            let deg: f64 = (0..inst.num_vertices())
                .filter(|&u| u != nd + t)
                .map(|u| v[map.x(u, nd + t)])
                .sum();
            v[map.y(t)] = deg / 2.0;
        }
        FractionalPoint::new(v)
    }

    #[test]
    fn island_gives_sec1() {
        // depot 0 serves target 0; targets 1..3 form an island
        let inst = inst(2, vec![vec![0], vec![1, 2, 3]]);
        let map = VariableMap::new(&inst);
        let p = point_from_edges(&inst, &map, &[(0, 2, 2.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0)]);
        let sep = Separator::new(&inst, &map, &p);
        let cuts = sep.gsec_cluster();
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].class, CutClass::Sec1);
        assert_eq!(evaluate_row(&cuts[0], &p), -2.0);
    }

    #[test]
    fn half_cycle_gives_sec2() {
        // one depot, targets a,b,c in three clusters; y_a = 1 with half edges
        let inst = inst(1, vec![vec![0], vec![1], vec![2, 3]]);
        let map = VariableMap::new(&inst);
        // d-a (1), a-b (1): b visited, b-d (1) => cycle d-a-b-d
        // plus fractional triangle on {c, e}: target 2,3 y=0.5 with x_23 = 0.5 and x_d2 = 0.5, x_d3 = 0.5
        let p = point_from_edges(
            &inst,
            &map,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (3, 0, 0.5), (4, 0, 0.5)],
        );
        // targets 2,3: y = 0.75 each, cut around {2,3} = 1.0 < 1.5
        let cuts = Separator::new(&inst, &map, &p).gsec_target();
        assert!(!cuts.is_empty());
        assert_eq!(cuts[0].class, CutClass::Sec1, "{{2,3}} holds a whole cluster");
        assert!((evaluate_row(&cuts[0], &p) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn four_path_fixture() {
        let inst = inst(2, vec![vec![0], vec![1]]);
        let map = VariableMap::new(&inst);
        let p = point_from_edges(&inst, &map, &[(0, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0)]);
        let cuts = Separator::new(&inst, &map, &p).four_path();
        assert_eq!(cuts.len(), 1);
        assert_eq!(evaluate_row(&cuts[0], &p), -1.0);
        // symmetric loads: skipped
        let q = point_from_edges(&inst, &map, &[(0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0)]);
        assert!(Separator::new(&inst, &map, &q).four_path().is_empty());
    }

    #[test]
    fn gpec_on_long_path() {
        let inst = inst(2, vec![vec![0], vec![1], vec![2]]);
        let map = VariableMap::new(&inst);
        let p = point_from_edges(&inst, &map, &[(0, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 1, 1.0)]);
        let cuts = Separator::new(&inst, &map, &p).gpec();
        assert!(!cuts.is_empty());
        assert!(cuts.iter().all(|c| evaluate_row(c, &p) <= -1.0 + 1e-9));
        // the recipe row: j = t1, k = t3, S = {t2}, D' = {d1}
        let row = pec_row(&inst, &map, &mask(3, [1]), 0, 2, &[true, false], 1);
        assert_eq!(evaluate_row(&row, &p), -1.0);
    }

    #[test]
    fn two_matching_fixture() {
        // triangle handle {0,1,2} at 0.5, pendant teeth to 3,4,5
        let inst = inst(1, (0..6).map(|t| vec![t]).collect());
        let map = VariableMap::new(&inst);
        let v = |t: usize| 1 + t;
        let p = point_from_edges(
            &inst,
            &map,
            &[
                (v(0), v(1), 0.5),
                (v(1), v(2), 0.5),
                (v(2), v(0), 0.5),
                (v(0), v(3), 1.0),
                (v(1), v(4), 1.0),
                (v(2), v(5), 1.0),
                (0, v(3), 1.0),
                (0, v(4), 1.0),
                (0, v(5), 1.0),
            ],
        );
        let cuts = Separator::new(&inst, &map, &p).two_matching_and_comb();
        assert!(!cuts.is_empty());
        // x(γ(H)) + Σ x(e_i) = 1.5 + 3 against |H| + (t-1)/2 = 4
        assert!((evaluate_row(&cuts[0], &p) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn feasible_points_yield_nothing() {
        let inst = inst(3, vec![vec![0, 1], vec![2], vec![3, 4]]);
        let map = VariableMap::new(&inst);
        let sol = IntegerSolution::from_cycles(
            &inst,
            &map,
            vec![
                Cycle { depot: 0, targets: vec![0, 2] },
                Cycle { depot: 2, targets: vec![4] },
            ],
        );
        let p = FractionalPoint::new(sol.values());
        let sep = Separator::new(&inst, &map, &p);
        for f in Family::ORDER {
            assert!(f.run(&sep).is_empty(), "{f:?}");
        }
    }

    #[test]
    fn tcomb_needs_three_depots() {
        let inst = inst(2, vec![vec![0], vec![1], vec![2]]);
        let map = VariableMap::new(&inst);
        let p = point_from_edges(&inst, &map, &[(0, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 1, 1.0)]);
        assert!(Separator::new(&inst, &map, &p).tcomb().is_empty());
    }
}
