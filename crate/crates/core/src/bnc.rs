//! Best-first branch-and-cut driver.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::heuristic::run_heuristic;
use crate::instance::Instance;
use crate::lp::{write_lp_format, Basis, DualSimplex, LpBackend, LpProblem, LpStatus, DEFAULT_ITERATION_CAP};
use crate::model::{
    build_base_lp, decode_walks, repair_two_paths, check_feasible, CutClass, CutRow, FractionalPoint, IntegerSolution,
    VariableMap, Violation, EPS_INT,
};
use crate::separation::{four_path_row, gsec_row, pec_row, Family, Separator};

const EPS_BOUND: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub time_limit: f64,
    /// Run every family each round instead of stopping at the first one
    /// that yields cuts.
    pub all_families: bool,
    pub sec: bool,
    pub pec: bool,
    pub comb: bool,
    pub tcomb: bool,
    pub strong_candidates: usize,
    pub strong_pivots: usize,
    pub heuristic_every: usize,
    pub max_cuts_per_family: usize,
    pub purge_after: usize,
    pub purge_slack: f64,
    pub iteration_cap: usize,
    /// Keep the root LP in textual form in the outcome.
    pub dump_root_lp: bool,
    /// Reserved; nothing in the default path is random.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            time_limit: 7200.0,
            all_families: false,
            sec: true,
            pec: true,
            comb: true,
            tcomb: true,
            strong_candidates: 10,
            strong_pivots: 20,
            heuristic_every: 5,
            max_cuts_per_family: 50,
            purge_after: 50,
            purge_slack: 0.5,
            iteration_cap: DEFAULT_ITERATION_CAP,
            dump_root_lp: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    TimeLimit,
    Infeasible,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub sec1: usize,
    pub sec2: usize,
    pub pec4: usize,
    pub pec: usize,
    /// Combs and T-combs together.
    pub comb: usize,
    pub tcomb: usize,
    pub lazy: usize,
    pub nodes: usize,
    /// Base-model LP value at the root.
    pub base_lp: f64,
    /// Whether the base-model optimum had a fractional component.
    pub base_fractional: bool,
    /// LP value at the end of the root cut loop.
    pub root_lb: f64,
    /// Best heuristic solution found at the root.
    pub heuristic_ub: Option<i64>,
    pub best_ub: Option<i64>,
    pub lower_bound: f64,
    pub root_rounds: usize,
    pub lp_iterations: usize,
    pub purged: usize,
    pub heuristic_calls: usize,
    pub sep_time: f64,
    pub sec_time: f64,
    pub pec4_time: f64,
    pub pec_time: f64,
    pub comb_time: f64,
    pub total_time: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub solution: Option<IntegerSolution>,
    pub stats: SolverStats,
    pub root_lp: Option<String>,
    /// Every row added to the LP during the run, in order.
    pub emitted: Vec<CutRow>,
}

#[derive(Debug, Clone)]
struct Node {
    id: u64,
    bound: f64,
    depth: usize,
    fixings: Vec<(usize, f64, f64)>,
    warm: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // reversed: BinaryHeap pops the lowest bound, then the oldest node
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound).then(o.id.cmp(&self.id))
    }
}

struct PoolEntry {
    idle: usize,
}

/// Lazy cuts for an integral point, or the decoded solution.
pub enum LazyCheck {
    Feasible(IntegerSolution),
    Cuts(Vec<CutRow>),
    /// Only 2-paths; repaired into a feasible solution of no greater cost.
    Repaired(IntegerSolution),
    /// Rounding broke the degree structure.
    Numerical(Violation),
}

pub fn integrality_and_lazy_check(inst: &Instance, map: &VariableMap, primal: &[f64]) -> LazyCheck {
    let ne = map.num_edges();
    let mut x: Vec<u8> = primal[..ne].iter().map(|v| v.round().max(0.0) as u8).collect();
    let y: Vec<u8> = primal[ne..].iter().map(|v| v.round().max(0.0) as u8).collect();
    let walks = match decode_walks(inst, map, &x, &y) {
        Ok(w) => w,
        Err(v) => return LazyCheck::Numerical(v),
    };
    let n = inst.num_targets();
    let mut cuts = Vec::new();
    for s in &walks.subtours {
        let mut m = vec![false; n];
        for &t in s {
            m[t] = true;
        }
        cuts.push(gsec_row(inst, map, &m, *s.iter().min().unwrap()));
    }
    for (from, seq, to) in &walks.depot_paths {
        let mut dp = vec![false; inst.num_depots()];
        dp[*from] = true;
        debug_assert!(from != to);
        match seq.len() {
            1 => {}
            2 => cuts.push(four_path_row(inst, map, seq[0], seq[1], &dp)),
            _ => {
                let mut m = vec![false; n];
                for &t in &seq[1..seq.len() - 1] {
                    m[t] = true;
                }
                cuts.push(pec_row(inst, map, &m, seq[0], seq[seq.len() - 1], &dp, seq[1]));
            }
        }
    }
    if !cuts.is_empty() {
        return LazyCheck::Cuts(cuts);
    }
    if walks.depot_paths.is_empty() {
        return match check_feasible(inst, map, &x, &y) {
            Ok(sol) => LazyCheck::Feasible(sol),
            Err(v) => LazyCheck::Numerical(v),
        };
    }
    repair_two_paths(inst, map, &mut x, &walks);
    match check_feasible(inst, map, &x, &y) {
        Ok(sol) => LazyCheck::Repaired(sol),
        Err(v) => LazyCheck::Numerical(v),
    }
}

/// Strong-branching scores: product of the two child bound gains.
pub fn branch_score(down: f64, up: f64) -> f64 {
    down.max(1e-4) * up.max(1e-4)
}

struct Solver<'a> {
    inst: &'a Instance,
    map: VariableMap,
    cfg: &'a Config,
    lp: DualSimplex,
    base_rows: usize,
    pool: Vec<PoolEntry>,
    in_lp: HashSet<u64>,
    global_lo: Vec<f64>,
    global_hi: Vec<f64>,
    incumbent: Option<IntegerSolution>,
    stats: SolverStats,
    emitted: Vec<CutRow>,
    start: Instant,
    deadline: Instant,
    next_id: u64,
    timed_out: bool,
    root_lp_text: Option<String>,
}

enum NodeResult {
    Fathomed,
    Branch { bound: f64, primal: Vec<f64>, basis: Basis },
}

impl<'a> Solver<'a> {
    fn ub(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |s| s.cost as f64)
    }

    fn prunable(&self, bound: f64) -> bool {
        bound > self.ub() - 1.0 + EPS_BOUND
    }

    fn offer(&mut self, sol: IntegerSolution) {
        if self.incumbent.as_ref().is_none_or(|s| sol.cost < s.cost) {
            log::debug!("incumbent {}", sol.cost);
            self.incumbent = Some(sol);
        }
    }

    fn add_cuts(&mut self, rows: Vec<CutRow>) -> usize {
        let fresh: Vec<CutRow> = rows
            .into_iter()
            .filter(|r| self.in_lp.insert(r.fingerprint()))
            .collect();
        for r in &fresh {
            match r.class {
                CutClass::Sec1 => self.stats.sec1 += 1,
                CutClass::Sec2 => self.stats.sec2 += 1,
                CutClass::Pec4 => self.stats.pec4 += 1,
                CutClass::Pec => self.stats.pec += 1,
                CutClass::Comb => self.stats.comb += 1,
                CutClass::Tcomb => {
                    self.stats.comb += 1;
                    self.stats.tcomb += 1
                }
                _ => {}
            }
            self.pool.push(PoolEntry { idle: 0 });
        }
        self.lp.add_rows(&fresh);
        let count = fresh.len();
        self.emitted.extend(fresh);
        count
    }

    fn purge(&mut self, primal: &[f64]) {
        let mut drop = Vec::new();
        for (p, entry) in self.pool.iter_mut().enumerate() {
            let i = self.base_rows + p;
            if self.lp.rows()[i].slack(primal) > self.cfg.purge_slack {
                entry.idle += 1;
            } else {
                entry.idle = 0;
            }
            if entry.idle >= self.cfg.purge_after && self.lp.row_slack_is_basic(i) {
                drop.push(i);
            }
        }
        if drop.is_empty() {
            return;
        }
        let fps: Vec<u64> = drop.iter().map(|&i| self.lp.rows()[i].fingerprint()).collect();
        let removed = self.lp.remove_rows(&drop);
        for (&i, fp) in drop.iter().zip(fps) {
            if removed.contains(&i) {
                self.in_lp.remove(&fp);
            }
        }
        for &i in removed.iter().rev() {
            self.pool.remove(i - self.base_rows);
        }
        self.stats.purged += removed.len();
    }

    fn apply_fixings(&mut self, fixings: &[(usize, f64, f64)]) {
        for j in 0..self.map.num_vars() {
            self.lp.set_bounds(j, self.global_lo[j], self.global_hi[j]);
        }
        for &(j, lo, hi) in fixings {
            let (l0, h0) = self.lp.bounds(j);
            self.lp.set_bounds(j, l0.max(lo), h0.min(hi));
        }
    }

    fn separate(&mut self, point: &FractionalPoint) -> Vec<CutRow> {
        let mut sep = Separator::new(self.inst, &self.map, point);
        sep.limit = self.cfg.max_cuts_per_family;
        let mut out = Vec::new();
        let t0 = Instant::now();
        for fam in Family::ORDER {
            let enabled = match fam {
                Family::Sec1 | Family::Sec2 => self.cfg.sec,
                Family::Pec => self.cfg.pec,
                Family::Comb => self.cfg.comb,
                Family::Tcomb => self.cfg.tcomb,
            };
            if !enabled {
                continue;
            }
            let t = Instant::now();
            let cuts = match fam {
                Family::Pec => {
                    let mut four = sep.four_path();
                    self.stats.pec4_time += t.elapsed().as_secs_f64();
                    let t2 = Instant::now();
                    four.extend(sep.gpec());
                    self.stats.pec_time += t2.elapsed().as_secs_f64();
                    four
                }
                _ => {
                    let c = fam.run(&sep);
                    let dt = t.elapsed().as_secs_f64();
                    match fam {
                        Family::Sec1 | Family::Sec2 => self.stats.sec_time += dt,
                        _ => self.stats.comb_time += dt,
                    }
                    c
                }
            };
            let fresh: Vec<CutRow> = cuts
                .into_iter()
                .filter(|r| !self.in_lp.contains(&r.fingerprint()))
                .collect();
            out.extend(fresh);
            if !out.is_empty() && !self.cfg.all_families {
                break;
            }
        }
        self.stats.sep_time += t0.elapsed().as_secs_f64();
        out
    }

    fn out_of_time(&mut self) -> bool {
        if Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn process(&mut self, node: &Node, root: bool) -> NodeResult {
        self.apply_fixings(&node.fixings);
        if let Some(b) = &node.warm {
            self.lp.set_basis(b);
        }
        let mut rounds = 0usize;
        let mut retried = false;
        loop {
            let res = self.lp.solve(self.cfg.iteration_cap);
            self.stats.lp_iterations += res.iterations;
            match res.status {
                LpStatus::Infeasible => return NodeResult::Fathomed,
                LpStatus::IterationLimit => {
                    if !retried {
                        log::warn!("node {}: iteration limit, retrying cold", node.id);
                        retried = true;
                        self.lp.cold_start();
                        continue;
                    }
                    log::error!("node {}: iteration limit after cold start; node dropped", node.id);
                    self.timed_out = true;
                    return NodeResult::Fathomed;
                }
                LpStatus::Optimal => {}
            }
            let bound = res.objective_value;
            if root && rounds == 0 {
                self.stats.base_lp = bound;
                self.stats.base_fractional = res.primal.iter().any(|v| (v - v.round()).abs() > EPS_INT);
            }
            if root {
                self.stats.root_lb = bound;
                self.stats.root_rounds = rounds;
            }
            let point = FractionalPoint {
                values: res.primal.clone(),
                node: node.id,
            };
            let scheduled = root && rounds % self.cfg.heuristic_every.max(1) == 0;
            if scheduled {
                self.root_heuristic(&point);
            }
            if self.prunable(bound) {
                if root {
                    self.finish_root(&point, scheduled);
                }
                return NodeResult::Fathomed;
            }
            self.purge(&res.primal);
            if point.values.iter().all(|v| (v - v.round()).abs() <= EPS_INT) {
                match integrality_and_lazy_check(self.inst, &self.map, &res.primal) {
                    LazyCheck::Feasible(sol) | LazyCheck::Repaired(sol) => {
                        self.offer(sol);
                        if root {
                            self.finish_root(&point, scheduled);
                        }
                        return NodeResult::Fathomed;
                    }
                    LazyCheck::Cuts(cuts) => {
                        let added = self.add_cuts(cuts);
                        debug_assert!(added > 0, "lazy cuts must be new rows");
                        self.stats.lazy += added;
                        rounds += 1;
                        continue;
                    }
                    LazyCheck::Numerical(v) => {
                        log::warn!("node {}: rounded point rejected ({v}); separating", node.id);
                    }
                }
            }
            let cuts = if self.out_of_time() { Vec::new() } else { self.separate(&point) };
            if cuts.is_empty() {
                if root {
                    self.finish_root(&point, scheduled);
                }
                return NodeResult::Branch {
                    bound,
                    primal: res.primal,
                    basis: res.basis,
                };
            }
            self.add_cuts(cuts);
            rounds += 1;
        }
    }

    /// Last heuristic call and LP snapshot when the root cut loop ends.
    fn finish_root(&mut self, point: &FractionalPoint, heuristic_ran: bool) {
        if !heuristic_ran {
            self.root_heuristic(point);
        }
        if self.cfg.dump_root_lp {
            self.root_lp_text = Some(self.lp_text());
        }
    }

    fn root_heuristic(&mut self, point: &FractionalPoint) {
        self.stats.heuristic_calls += 1;
        if let Some(sol) = run_heuristic(point, self.inst, &self.map) {
            if self.stats.heuristic_ub.is_none_or(|u| sol.cost < u) {
                self.stats.heuristic_ub = Some(sol.cost);
            }
            self.offer(sol);
        }
    }

    fn lp_text(&self) -> String {
        let mut p = LpProblem::new(self.map.objective(self.inst), self.global_lo.clone(), self.global_hi.clone());
        p.rows = self.lp.rows().to_vec();
        let inst = self.inst;
        let map = &self.map;
        write_lp_format(&p, &|j| map.describe(inst, j))
    }

    /// Picks the branching variable and the bounds of its two children.
    fn choose_branch(&self, primal: &[f64], bound: f64) -> (usize, f64, f64) {
        let ne = self.map.num_edges();
        let frac = |j: usize| {
            let f = primal[j] - primal[j].floor();
            f.min(1.0 - f)
        };
        let pick = |range: std::ops::Range<usize>| -> Vec<usize> {
            let mut c: Vec<usize> = range.filter(|&j| frac(j) > EPS_INT).collect();
            c.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
            c.truncate(self.cfg.strong_candidates.max(1));
            c
        };
        let mut cands = pick(ne..self.map.num_vars());
        if cands.is_empty() {
            cands = pick(0..ne);
        }
        assert!(!cands.is_empty(), "branching on an integral point");
        if cands.len() == 1 {
            let j = cands[0];
            return (j, primal[j].floor(), primal[j].ceil());
        }
        let probe = |j: usize| -> (f64, f64) {
            let mut out = [0.0; 2];
            let (lo, hi) = self.lp.bounds(j);
            for (side, slot) in out.iter_mut().enumerate() {
                let mut lp = self.lp.clone();
                if side == 0 {
                    lp.set_bounds(j, lo, primal[j].floor());
                } else {
                    lp.set_bounds(j, primal[j].ceil(), hi);
                }
                let r = lp.solve(self.cfg.strong_pivots);
                *slot = match r.status {
                    LpStatus::Infeasible => 1e9,
                    _ => (r.objective_value - bound).max(0.0),
                };
            }
            (out[0], out[1])
        };
        let scores: Vec<f64> = cands
            .par_iter()
            .map(|&j| {
                let (d, u) = probe(j);
                branch_score(d, u)
            })
            .collect();
        let mut best = 0;
        for i in 1..cands.len() {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        let j = cands[best];
        (j, primal[j].floor(), primal[j].ceil())
    }
}

pub fn solve(inst: &Instance, cfg: &Config) -> Outcome {
    let start = Instant::now();
    let (map, base) = build_base_lp(inst);
    let nv = map.num_vars();
    let global_lo = vec![0.0; nv];
    let global_hi: Vec<f64> = (0..nv).map(|j| map.upper_bound(j)).collect();
    let mut problem = LpProblem::new(map.objective(inst), global_lo.clone(), global_hi.clone());
    problem.rows = base.clone();
    let lp = DualSimplex::load(&problem);
    let mut s = Solver {
        inst,
        cfg,
        lp,
        base_rows: base.len(),
        pool: Vec::new(),
        in_lp: base.iter().map(|r| r.fingerprint()).collect(),
        global_lo,
        global_hi,
        incumbent: None,
        stats: SolverStats::default(),
        emitted: Vec::new(),
        start,
        deadline: start + Duration::from_secs_f64(cfg.time_limit.max(0.0)),
        next_id: 1,
        timed_out: false,
        map,
        root_lp_text: None,
    };
    let mut queue = BinaryHeap::new();
    queue.push(Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        depth: 0,
        fixings: Vec::new(),
        warm: None,
    });
    let mut open_bound = f64::INFINITY;
    while let Some(node) = queue.pop() {
        if s.prunable(node.bound) {
            continue;
        }
        // the root always gets its first LP so the stats carry a bound
        if node.id != 0 && s.out_of_time() {
            open_bound = open_bound.min(node.bound);
            queue.push(node);
            break;
        }
        s.stats.nodes += 1;
        let root = node.id == 0;
        match s.process(&node, root) {
            NodeResult::Fathomed => {}
            NodeResult::Branch { bound, primal, basis } => {
                if s.timed_out {
                    open_bound = open_bound.min(bound);
                    break;
                }
                let (j, down, up) = s.choose_branch(&primal, bound);
                for (lo, hi) in [(s.global_lo[j], down), (up, s.global_hi[j])] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, lo, hi));
                    queue.push(Node {
                        id: s.next_id,
                        bound,
                        depth: node.depth + 1,
                        fixings,
                        warm: Some(basis.clone()),
                    });
                    s.next_id += 1;
                }
            }
        }
    }
    for n in queue.iter() {
        if !s.prunable(n.bound) {
            open_bound = open_bound.min(n.bound);
        }
    }
    let status = if s.timed_out {
        Status::TimeLimit
    } else if s.incumbent.is_some() {
        Status::Optimal
    } else {
        Status::Infeasible
    };
    s.stats.best_ub = s.incumbent.as_ref().map(|x| x.cost);
    s.stats.lower_bound = match status {
        Status::Optimal => s.ub(),
        _ => open_bound.min(s.ub()),
    };
    s.stats.total_time = s.start.elapsed().as_secs_f64();
    Outcome {
        status,
        solution: s.incumbent,
        stats: s.stats,
        root_lp: s.root_lp_text,
        emitted: s.emitted,
    }
}
