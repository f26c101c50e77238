//! Bounded-variable dual simplex on a dense explicit basis inverse.
//!
//! Each row `a x (sense) b` gets a slack `s = a x` boxed by the row sense on
//! one side and by the implied activity range of `a x` on the other, so every
//! variable has finite bounds.  Any basis is then dual feasible after putting
//! nonbasic variables on the bound matching their reduced-cost sign, and no
//! phase one is needed.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::model::{CutRow, Sense};

pub const TOL_PRIMAL: f64 = 1e-9;
pub const TOL_DUAL: f64 = 1e-9;
pub const TOL_PIVOT: f64 = 1e-9;
pub const TOL_FEAS: f64 = 1e-7;
const FLIP_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 100;
const STALL_LIMIT: usize = 50;
pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<CutRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> LpProblem {
        assert_eq!(objective.len(), lower.len());
        assert_eq!(objective.len(), upper.len());
        LpProblem {
            objective,
            rows: Vec::new(),
            lower,
            upper,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum State {
    Basic,
    Lower,
    Upper,
}

/// Warm-start token.  Rows are keyed by fingerprint so a token survives rows
/// being added or purged in between.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Basis {
    structural: Vec<State>,
    rows: HashMap<u64, State>,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal value, or a valid lower bound (the dual objective) when the
    /// iteration limit was hit.
    pub objective_value: f64,
    pub primal: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

/// Swappable LP engine used by the branch-and-cut driver.
pub trait LpBackend: Clone + Send {
    fn load(problem: &LpProblem) -> Self;
    fn num_rows(&self) -> usize;
    fn add_rows(&mut self, rows: &[CutRow]);
    /// Removes rows whose slacks are basic; others are kept.
    fn remove_rows(&mut self, rows: &[usize]) -> Vec<usize>;
    fn set_bounds(&mut self, var: usize, lo: f64, hi: f64);
    fn bounds(&self, var: usize) -> (f64, f64);
    fn solve(&mut self, iteration_cap: usize) -> LpResult;
    fn basis(&self) -> Basis;
    fn set_basis(&mut self, basis: &Basis) -> bool;
    fn row_slack_is_basic(&self, row: usize) -> bool;
}

/// Cold or warm solve of a standalone problem.
pub fn solve(problem: &LpProblem, warm: Option<&Basis>) -> LpResult {
    let mut lp = DualSimplex::load(problem);
    if let Some(b) = warm {
        lp.set_basis(b);
    }
    lp.solve(DEFAULT_ITERATION_CAP)
}

/// Appends rows to `problem` and resolves from `warm`.
pub fn add_rows_and_resolve(problem: &mut LpProblem, new_rows: &[CutRow], warm: &Basis) -> LpResult {
    problem.rows.extend_from_slice(new_rows);
    solve(problem, Some(warm))
}

#[derive(Debug, Clone)]
pub struct DualSimplex {
    n: usize,
    m: usize,
    cost: Vec<f64>,
    rows: Vec<CutRow>,
    cols: Vec<Vec<(usize, f64)>>,
    /// Bounds over structurals then slacks.
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Bounds used for the implied activity ranges of slacks.
    base_lo: Vec<f64>,
    base_hi: Vec<f64>,
    state: Vec<State>,
    head: Vec<usize>,
    /// Basis inverse, row-major, `binv[p * m + i]`.
    binv: Vec<f64>,
    since_refactor: usize,
    pub total_iterations: usize,
}

impl DualSimplex {
    fn slack(&self, i: usize) -> usize {
        self.n + i
    }

    fn slack_box(&self, row: &CutRow) -> (f64, f64) {
        let (mut minact, mut maxact) = (0.0, 0.0);
        for &(v, a) in row.coeffs() {
            let (l, u) = (a * self.base_lo[v], a * self.base_hi[v]);
            minact += l.min(u);
            maxact += l.max(u);
        }
        match row.sense {
            Sense::Ge => (row.rhs, maxact.max(row.rhs)),
            Sense::Le => (minact.min(row.rhs), row.rhs),
            Sense::Eq => (row.rhs, row.rhs),
        }
    }

    fn rebuild_cols(&mut self) {
        let mut cols = vec![Vec::new(); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(v, a) in r.coeffs() {
                cols[v].push((i, a));
            }
        }
        self.cols = cols;
    }

    pub fn rows(&self) -> &[CutRow] {
        &self.rows
    }

    /// Row activity `a x` at the current basis.
    pub fn row_activity(&self, i: usize) -> f64 {
        let x = self.values();
        self.rows[i].lhs(&x[..self.n])
    }

    /// Current values of all structurals then slacks.
    fn values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n + self.m];
        for j in 0..self.n + self.m {
            match self.state[j] {
                State::Lower => x[j] = self.lo[j],
                State::Upper => x[j] = self.hi[j],
                State::Basic => {}
            }
        }
        let xb = self.basic_values(&x);
        for (p, &j) in self.head.iter().enumerate() {
            x[j] = xb[p];
        }
        x
    }

    fn basic_values(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m;
        // v = [A | -I] x_N
        let mut v = vec![0.0; m];
        for j in 0..self.n {
            if self.state[j] != State::Basic && x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    v[i] += a * x[j];
                }
            }
        }
        for i in 0..m {
            let j = self.n + i;
            if self.state[j] != State::Basic {
                v[i] -= x[j];
            }
        }
        let mut xb = vec![0.0; m];
        for (p, out) in xb.iter_mut().enumerate() {
            let row = &self.binv[p * m..(p + 1) * m];
            let mut s = 0.0;
            for i in 0..m {
                s += row[i] * v[i];
            }
            *out = -s;
        }
        xb
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for (p, &j) in self.head.iter().enumerate() {
            let cj = self.cost[j];
            if cj != 0.0 {
                let row = &self.binv[p * m..(p + 1) * m];
                for i in 0..m {
                    pi[i] += cj * row[i];
                }
            }
        }
        let mut d = vec![0.0; self.n + m];
        for j in 0..self.n {
            if self.state[j] == State::Basic {
                continue;
            }
            let mut s = self.cost[j];
            for &(i, a) in &self.cols[j] {
                s -= pi[i] * a;
            }
            d[j] = s;
        }
        for i in 0..m {
            if self.state[self.n + i] != State::Basic {
                d[self.n + i] = pi[i];
            }
        }
        d
    }

    fn column(&self, q: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        if q < self.n {
            for &(i, a) in &self.cols[q] {
                for (p, wp) in w.iter_mut().enumerate() {
                    *wp += self.binv[p * m + i] * a;
                }
            }
        } else {
            let i = q - self.n;
            for (p, wp) in w.iter_mut().enumerate() {
                *wp = -self.binv[p * m + i];
            }
        }
        w
    }

    fn pivot(&mut self, r: usize, q: usize, leaving_state: State) {
        let m = self.m;
        let w = self.column(q);
        let piv = w[r];
        {
            let row = &mut self.binv[r * m..(r + 1) * m];
            for v in row.iter_mut() {
                *v /= piv;
            }
        }
        let pivot_row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
        for (p, &wp) in w.iter().enumerate() {
            if p == r || wp == 0.0 {
                continue;
            }
            let row = &mut self.binv[p * m..(p + 1) * m];
            for i in 0..m {
                row[i] -= wp * pivot_row[i];
            }
        }
        let leaving = self.head[r];
        self.state[leaving] = leaving_state;
        self.state[q] = State::Basic;
        self.head[r] = q;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
            self.slack_basis();
        }
    }

    /// Rebuilds the inverse from the basis head.  Basic structurals `J` cover
    /// the rows `R` whose slacks are nonbasic; only `A[R, J]` is inverted.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let n = self.n;
        let structs: Vec<(usize, usize)> = self
            .head
            .iter()
            .enumerate()
            .filter(|&(_, &j)| j < n)
            .map(|(p, &j)| (p, j))
            .collect();
        let uncovered: Vec<usize> = (0..m).filter(|&i| self.state[n + i] != State::Basic).collect();
        let q = structs.len();
        if uncovered.len() != q {
            return false;
        }
        let mut rpos = vec![usize::MAX; m];
        for (u, &i) in uncovered.iter().enumerate() {
            rpos[i] = u;
        }
        // K = A[uncovered, J], augmented with identity, Gauss-Jordan.
        let w = 2 * q;
        let mut k = vec![0.0; q * w];
        for (c, &(_, j)) in structs.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                if rpos[i] != usize::MAX {
                    k[rpos[i] * w + c] = a;
                }
            }
        }
        for u in 0..q {
            k[u * w + q + u] = 1.0;
        }
        for c in 0..q {
            let mut best = c;
            for r in c + 1..q {
                if k[r * w + c].abs() > k[best * w + c].abs() {
                    best = r;
                }
            }
            if k[best * w + c].abs() < 1e-11 {
                return false;
            }
            if best != c {
                for t in 0..w {
                    k.swap(c * w + t, best * w + t);
                }
            }
            let piv = k[c * w + c];
            for t in 0..w {
                k[c * w + t] /= piv;
            }
            let prow: Vec<f64> = k[c * w..(c + 1) * w].to_vec();
            for r in 0..q {
                if r != c {
                    let f = k[r * w + c];
                    if f != 0.0 {
                        for t in 0..w {
                            k[r * w + t] -= f * prow[t];
                        }
                    }
                }
            }
        }
        // kinv[c][u] = k[c * w + q + u]: maps uncovered row u to structural c.
        let mut binv = vec![0.0; m * m];
        let mut slack_pos = vec![usize::MAX; m];
        for (p, &j) in self.head.iter().enumerate() {
            if j >= n {
                slack_pos[j - n] = p;
            }
        }
        for (c, &(p, _)) in structs.iter().enumerate() {
            for (u, &i) in uncovered.iter().enumerate() {
                binv[p * m + i] = k[c * w + q + u];
            }
        }
        for i in 0..m {
            let p = slack_pos[i];
            if p == usize::MAX {
                continue;
            }
            binv[p * m + i] = -1.0;
            // z_s = A[i, J] z_J for unit right-hand sides of uncovered rows.
            for &(v, a) in self.rows[i].coeffs() {
                if self.state[v] != State::Basic {
                    continue;
                }
                let c = structs.iter().position(|&(_, j)| j == v).unwrap();
                for (u, &ir) in uncovered.iter().enumerate() {
                    binv[p * m + ir] += a * k[c * w + q + u];
                }
            }
        }
        self.binv = binv;
        self.since_refactor = 0;
        true
    }

    fn slack_basis(&mut self) {
        let n = self.n;
        let m = self.m;
        for j in 0..n {
            if self.state[j] == State::Basic {
                self.state[j] = State::Lower;
            }
        }
        for i in 0..m {
            self.state[n + i] = State::Basic;
        }
        self.head = (0..m).map(|i| n + i).collect();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        self.since_refactor = 0;
    }

    /// Places nonbasic variables on the bound matching their reduced cost.
    fn restore_dual_feasibility(&mut self, d: &[f64]) {
        for j in 0..self.n + self.m {
            match self.state[j] {
                State::Lower if d[j] < -FLIP_TOL && self.hi[j] > self.lo[j] => self.state[j] = State::Upper,
                State::Upper if d[j] > FLIP_TOL && self.hi[j] > self.lo[j] => self.state[j] = State::Lower,
                _ => {}
            }
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|j| self.cost[j] * x[j]).sum()
    }

    fn result(&self, status: LpStatus, iterations: usize) -> LpResult {
        let x = self.values();
        let mut primal: Vec<f64> = x[..self.n].to_vec();
        if status == LpStatus::Optimal {
            for j in 0..self.n {
                primal[j] = primal[j].clamp(self.lo[j], self.hi[j]);
            }
        }
        let objective_value = match status {
            LpStatus::Infeasible => f64::INFINITY,
            _ => self.objective(&x),
        };
        LpResult {
            status,
            objective_value,
            primal,
            basis: self.basis(),
            iterations,
        }
    }

    /// Largest violation of the original rows and bounds at `x`.
    /// Drops the current basis and restarts from the all-slack one.
    pub fn cold_start(&mut self) {
        self.slack_basis();
    }

    pub fn max_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            worst = worst.max(self.lo[j] - x[j]).max(x[j] - self.hi[j]);
        }
        for r in &self.rows {
            worst = worst.max(-r.slack(x));
        }
        worst
    }
}

impl LpBackend for DualSimplex {
    fn load(problem: &LpProblem) -> DualSimplex {
        let n = problem.num_vars();
        for j in 0..n {
            assert!(problem.lower[j] <= problem.upper[j], "empty bound range on {j}");
            assert!(problem.lower[j].is_finite() && problem.upper[j].is_finite());
        }
        let mut lp = DualSimplex {
            n,
            m: 0,
            cost: problem.objective.clone(),
            rows: Vec::new(),
            cols: vec![Vec::new(); n],
            lo: problem.lower.clone(),
            hi: problem.upper.clone(),
            base_lo: problem.lower.clone(),
            base_hi: problem.upper.clone(),
            state: (0..n)
                .map(|j| if problem.objective[j] < 0.0 { State::Upper } else { State::Lower })
                .collect(),
            head: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            total_iterations: 0,
        };
        lp.add_rows(&problem.rows);
        lp
    }

    fn num_rows(&self) -> usize {
        self.m
    }

    fn add_rows(&mut self, rows: &[CutRow]) {
        if rows.is_empty() {
            return;
        }
        let m0 = self.m;
        let k = rows.len();
        let m1 = m0 + k;
        // Slack variables sit after structurals; shift is implicit because
        // slack index = n + row.
        let mut binv = vec![0.0; m1 * m1];
        for p in 0..m0 {
            binv[p * m1..p * m1 + m0].copy_from_slice(&self.binv[p * m0..(p + 1) * m0]);
        }
        let mut pos_of = vec![usize::MAX; self.n];
        for (p, &j) in self.head.iter().enumerate() {
            if j < self.n {
                pos_of[j] = p;
            }
        }
        for (t, row) in rows.iter().enumerate() {
            assert!(row.max_var() < self.n, "row references unknown variable");
            let p = m0 + t;
            // new inverse row = C Binv, C = row coefficients on basic structurals
            for &(v, a) in row.coeffs() {
                let bp = pos_of[v];
                if bp == usize::MAX {
                    continue;
                }
                for i in 0..m0 {
                    binv[p * m1 + i] += a * self.binv[bp * m0 + i];
                }
            }
            binv[p * m1 + p] = -1.0;
            let (l, u) = self.slack_box(row);
            self.lo.push(l);
            self.hi.push(u);
            self.cost.push(0.0);
            self.state.push(State::Basic);
            self.head.push(self.n + p);
            self.rows.push(row.clone());
        }
        self.m = m1;
        self.binv = binv;
        self.rebuild_cols();
    }

    fn remove_rows(&mut self, rows: &[usize]) -> Vec<usize> {
        let mut del: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&i| i < self.m && self.state[self.slack(i)] == State::Basic)
            .collect();
        del.sort_unstable();
        del.dedup();
        for &i in del.iter().rev() {
            let m = self.m;
            let s = self.n + i;
            let p = self.head.iter().position(|&j| j == s).unwrap();
            let mut binv = Vec::with_capacity((m - 1) * (m - 1));
            for pp in 0..m {
                if pp == p {
                    continue;
                }
                for ii in 0..m {
                    if ii != i {
                        binv.push(self.binv[pp * m + ii]);
                    }
                }
            }
            self.binv = binv;
            self.head.remove(p);
            for j in self.head.iter_mut() {
                if *j > s {
                    *j -= 1;
                }
            }
            self.rows.remove(i);
            self.lo.remove(s);
            self.hi.remove(s);
            self.cost.remove(s);
            self.state.remove(s);
            self.m -= 1;
        }
        self.rebuild_cols();
        del
    }

    fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        assert!(var < self.n && lo <= hi);
        self.lo[var] = lo;
        self.hi[var] = hi;
    }

    fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lo[var], self.hi[var])
    }

    fn solve(&mut self, iteration_cap: usize) -> LpResult {
        let n = self.n;
        let total = n + self.m;
        for j in 0..total {
            if self.lo[j] > self.hi[j] + TOL_FEAS {
                return self.result(LpStatus::Infeasible, 0);
            }
        }
        let mut iterations = 0;
        let mut stalled = 0;
        let mut last_obj = f64::NEG_INFINITY;
        let mut skip: Vec<bool> = vec![false; self.m];
        loop {
            let d = self.reduced_costs();
            self.restore_dual_feasibility(&d);
            let x = self.values();
            let obj = self.objective(&x);
            if obj > last_obj + 1e-12 {
                stalled = 0;
                last_obj = obj;
            } else {
                stalled += 1;
            }
            let bland = stalled > STALL_LIMIT;

            // leaving row
            let mut leave: Option<(usize, f64)> = None;
            for (p, &j) in self.head.iter().enumerate() {
                if skip[p] {
                    continue;
                }
                let inf = if x[j] < self.lo[j] - TOL_PRIMAL {
                    self.lo[j] - x[j]
                } else if x[j] > self.hi[j] + TOL_PRIMAL {
                    x[j] - self.hi[j]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((bp, binf)) => {
                        if bland {
                            j < self.head[bp]
                        } else {
                            inf > binf
                        }
                    }
                };
                if better {
                    leave = Some((p, inf));
                }
            }
            let Some((r, _)) = leave else {
                self.total_iterations += iterations;
                return self.result(LpStatus::Optimal, iterations);
            };
            if iterations >= iteration_cap {
                self.total_iterations += iterations;
                return self.result(LpStatus::IterationLimit, iterations);
            }
            let jr = self.head[r];
            let below = x[jr] < self.lo[jr];
            // alpha_j = rho . A'_j
            let m = self.m;
            let rho = &self.binv[r * m..(r + 1) * m];
            let mut alpha = vec![0.0; total];
            for j in 0..n {
                if self.state[j] == State::Basic {
                    continue;
                }
                let mut s = 0.0;
                for &(i, a) in &self.cols[j] {
                    s += rho[i] * a;
                }
                alpha[j] = s;
            }
            for i in 0..m {
                if self.state[n + i] != State::Basic {
                    alpha[n + i] = -rho[i];
                }
            }
            let eligible = |j: usize, tol: f64, st: &[State], lo: &[f64], hi: &[f64]| -> bool {
                if st[j] == State::Basic || hi[j] <= lo[j] {
                    return false;
                }
                let a = if below { -alpha[j] } else { alpha[j] };
                match st[j] {
                    State::Lower => a > tol,
                    State::Upper => a < -tol,
                    State::Basic => false,
                }
            };
            let mut entering = None;
            for tol in [TOL_PIVOT, 1e-12] {
                let cands: Vec<usize> = (0..total)
                    .filter(|&j| eligible(j, tol, &self.state, &self.lo, &self.hi))
                    .collect();
                if cands.is_empty() {
                    continue;
                }
                let ratio = |j: usize| -> f64 {
                    let dj = match self.state[j] {
                        State::Lower => d[j].max(0.0),
                        _ => (-d[j]).max(0.0),
                    };
                    dj / alpha[j].abs()
                };
                if bland {
                    let tmin = cands.iter().map(|&j| ratio(j)).fold(f64::INFINITY, f64::min);
                    entering = cands.iter().copied().find(|&j| ratio(j) <= tmin + 1e-12);
                } else {
                    // Harris two-pass
                    let bound = cands
                        .iter()
                        .map(|&j| {
                            let dj = match self.state[j] {
                                State::Lower => d[j].max(0.0),
                                _ => (-d[j]).max(0.0),
                            };
                            (dj + TOL_DUAL) / alpha[j].abs()
                        })
                        .fold(f64::INFINITY, f64::min);
                    let mut best: Option<usize> = None;
                    for &j in &cands {
                        if ratio(j) <= bound && best.is_none_or(|b| alpha[j].abs() > alpha[b].abs()) {
                            best = Some(j);
                        }
                    }
                    entering = best;
                }
                break;
            }
            let Some(q) = entering else {
                // Farkas check on row r: can x_jr reach its bound at all?
                let mut reach = x[jr];
                for j in 0..total {
                    if self.state[j] == State::Basic {
                        continue;
                    }
                    let range = self.hi[j] - self.lo[j];
                    let a = alpha[j];
                    // dx_jr = -a * dx_j
                    let gain = match self.state[j] {
                        State::Lower => (if below { -a } else { a }).max(0.0) * range,
                        _ => (if below { a } else { -a }).max(0.0) * range,
                    };
                    reach += if below { gain } else { -gain };
                }
                let gap = if below { self.lo[jr] - reach } else { reach - self.hi[jr] };
                if gap > TOL_FEAS {
                    self.total_iterations += iterations;
                    return self.result(LpStatus::Infeasible, iterations);
                }
                skip[r] = true;
                continue;
            };
            skip.iter_mut().for_each(|s| *s = false);
            let leaving_state = if below { State::Lower } else { State::Upper };
            self.pivot(r, q, leaving_state);
            iterations += 1;
        }
    }

    fn basis(&self) -> Basis {
        Basis {
            structural: self.state[..self.n].to_vec(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| (r.fingerprint(), self.state[self.n + i]))
                .collect(),
        }
    }

    fn set_basis(&mut self, basis: &Basis) -> bool {
        if basis.structural.len() != self.n {
            return false;
        }
        let saved = (self.state.clone(), self.head.clone(), self.binv.clone(), self.since_refactor);
        let mut state = basis.structural.clone();
        for r in &self.rows {
            state.push(*basis.rows.get(&r.fingerprint()).unwrap_or(&State::Basic));
        }
        let head: Vec<usize> = (0..state.len()).filter(|&j| state[j] == State::Basic).collect();
        if head.len() != self.m {
            return false;
        }
        self.state = state;
        self.head = head;
        if self.refactor() {
            true
        } else {
            (self.state, self.head, self.binv, self.since_refactor) = saved;
            false
        }
    }

    fn row_slack_is_basic(&self, row: usize) -> bool {
        self.state[self.n + row] == State::Basic
    }
}

/// Writes `problem` in CPLEX LP text format.  `names` labels variables.
pub fn write_lp_format(problem: &LpProblem, names: &dyn Fn(usize) -> String) -> String {
    let mut s = String::from("\\ generated by gmdtsp\nMinimize\n obj:");
    let term = |s: &mut String, a: f64, v: usize, first: bool| {
        if a < 0.0 {
            write!(s, " - {} {}", -a, names(v)).unwrap();
        } else if first {
            write!(s, " {} {}", a, names(v)).unwrap();
        } else {
            write!(s, " + {} {}", a, names(v)).unwrap();
        }
    };
    let mut first = true;
    for (j, &c) in problem.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut s, c, j, first);
            first = false;
        }
    }
    if first {
        s.push_str(" 0");
    }
    s.push_str("\nSubject To\n");
    for (i, r) in problem.rows.iter().enumerate() {
        write!(s, " {}{}:", r.class.label(), i).unwrap();
        for (t, &(v, a)) in r.coeffs().iter().enumerate() {
            term(&mut s, a, v, t == 0);
        }
        let op = match r.sense {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        writeln!(s, " {} {}", op, r.rhs).unwrap();
    }
    s.push_str("Bounds\n");
    for j in 0..problem.num_vars() {
        writeln!(s, " {} <= {} <= {}", problem.lower[j], names(j), problem.upper[j]).unwrap();
    }
    s.push_str("End\n");
    s
}
