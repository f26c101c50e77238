//! Exhaustive reference solvers for small instances.
//!
//! `optimize` minimizes an arbitrary linear function of `(x, y)` over all
//! feasible solutions: Held-Karp gives the best single depot cycle for each
//! target set, and a subset-partition DP combines cycles.  Depots may host any
//! number of cycles, as in the formulation.

use crate::instance::Instance;
use crate::model::{CutRow, Cycle, IntegerSolution, Sense, VariableMap};

/// Largest target count the oracle accepts.
pub const MAX_TARGETS: usize = 12;

const INF: f64 = f64::INFINITY;

/// Minimizes `wx . x + wy . y` and returns the value with an optimal cycle set.
pub fn optimize(inst: &Instance, map: &VariableMap, wx: &[f64], wy: &[f64]) -> Option<(f64, Vec<Cycle>)> {
    let n = inst.num_targets();
    let k = inst.num_depots();
    assert!(n <= MAX_TARGETS, "oracle limited to {MAX_TARGETS} targets");
    let full = 1usize << n;
    let w = |u: usize, v: usize| wx[map.x(u, v)];
    // best[U] = (value, depot, order) of the cheapest single cycle on U
    let mut best: Vec<(f64, usize, usize)> = vec![(INF, 0, 0); full];
    let mut paths: Vec<Vec<f64>> = Vec::new();
    for d in 0..k {
        // dp[mask * n + last]
        let mut dp = vec![INF; full * n];
        for t in 0..n {
            dp[(1 << t) * n + t] = w(d, k + t);
        }
        for mask in 1..full {
            for last in 0..n {
                let cur = dp[mask * n + last];
                if cur == INF || mask >> last & 1 == 0 {
                    continue;
                }
                for nxt in 0..n {
                    if mask >> nxt & 1 == 1 {
                        continue;
                    }
                    let m2 = mask | 1 << nxt;
                    let v = cur + w(k + last, k + nxt);
                    if v < dp[m2 * n + nxt] {
                        dp[m2 * n + nxt] = v;
                    }
                }
            }
        }
        for mask in 1..full {
            let val = if mask.count_ones() == 1 {
                let t = mask.trailing_zeros() as usize;
                2.0 * w(d, k + t)
            } else {
                (0..n)
                    .filter(|&l| mask >> l & 1 == 1)
                    .map(|l| dp[mask * n + l] + w(k + l, d))
                    .fold(INF, f64::min)
            };
            if val < best[mask].0 {
                best[mask] = (val, d, 0);
            }
        }
        paths.push(dp);
    }
    // F[S]: best partition of S into cycles
    let mut f = vec![INF; full];
    let mut pick = vec![0usize; full];
    f[0] = 0.0;
    for s in 1..full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let u = sub | low;
            let v = best[u].0 + f[s ^ u];
            if v < f[s] {
                f[s] = v;
                pick[s] = u;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut opt: Option<(f64, usize)> = None;
    for s in 0..full {
        let covers = inst.clusters().iter().all(|c| c.iter().any(|&t| s >> t & 1 == 1));
        if !covers || f[s] == INF {
            continue;
        }
        let val = f[s] + (0..n).filter(|&t| s >> t & 1 == 1).map(|t| wy[t]).sum::<f64>();
        if opt.is_none_or(|(b, _)| val < b) {
            opt = Some((val, s));
        }
    }
    let (val, mut s) = opt?;
    let mut cycles = Vec::new();
    while s != 0 {
        let u = pick[s];
        let d = best[u].1;
        cycles.push(Cycle {
            depot: d,
            targets: trace(inst, map, wx, &paths[d], u, d),
        });
        s ^= u;
    }
    Some((val, cycles))
}

fn trace(inst: &Instance, map: &VariableMap, wx: &[f64], dp: &[f64], u: usize, d: usize) -> Vec<usize> {
    let n = inst.num_targets();
    let k = inst.num_depots();
    let w = |a: usize, b: usize| wx[map.x(a, b)];
    if u.count_ones() == 1 {
        return vec![u.trailing_zeros() as usize];
    }
    let mut last = (0..n)
        .filter(|&l| u >> l & 1 == 1)
        .min_by(|&a, &b| (dp[u * n + a] + w(k + a, d)).total_cmp(&(dp[u * n + b] + w(k + b, d))))
        .unwrap();
    let mut mask = u;
    let mut seq = vec![last];
    while mask.count_ones() > 1 {
        let prev_mask = mask ^ (1 << last);
        let target = dp[mask * n + last];
        let prev = (0..n)
            .filter(|&p| prev_mask >> p & 1 == 1)
            .min_by(|&a, &b| {
                let ea = (dp[prev_mask * n + a] + w(k + a, k + last) - target).abs();
                let eb = (dp[prev_mask * n + b] + w(k + b, k + last) - target).abs();
                ea.total_cmp(&eb)
            })
            .unwrap();
        seq.push(prev);
        mask = prev_mask;
        last = prev;
    }
    seq.reverse();
    seq
}

/// Optimal cost and solution.
pub fn solve(inst: &Instance) -> Option<IntegerSolution> {
    let map = VariableMap::new(inst);
    let wx = map.objective(inst);
    let (_, cycles) = optimize(inst, &map, &wx[..map.num_edges()], &vec![0.0; inst.num_targets()])?;
    Some(IntegerSolution::from_cycles(inst, &map, cycles))
}

pub fn optimal_cost(inst: &Instance) -> Option<i64> {
    solve(inst).map(|s| s.cost)
}

/// Minimum of the row's slack over all feasible solutions.
pub fn min_slack(inst: &Instance, map: &VariableMap, row: &CutRow) -> f64 {
    let ne = map.num_edges();
    let mut w = vec![0.0; map.num_vars()];
    for &(v, a) in row.coeffs() {
        w[v] = a;
    }
    let lo = |w: &[f64]| optimize(inst, map, &w[..ne], &w[ne..]).map(|r| r.0).unwrap_or(INF);
    match row.sense {
        Sense::Ge => lo(&w) - row.rhs,
        Sense::Le => {
            let neg: Vec<f64> = w.iter().map(|a| -a).collect();
            row.rhs + lo(&neg)
        }
        Sense::Eq => {
            let neg: Vec<f64> = w.iter().map(|a| -a).collect();
            (lo(&w) - row.rhs).min(row.rhs + lo(&neg))
        }
    }
}

/// Calls `f` on every feasible solution (cycle order and orientation fixed
/// canonically).  Meant for at most six or so targets.
pub fn for_each_solution(inst: &Instance, mut f: impl FnMut(&[Cycle])) {
    let n = inst.num_targets();
    for s in 1usize..1 << n {
        let covers = inst.clusters().iter().all(|c| c.iter().any(|&t| s >> t & 1 == 1));
        if covers {
            let mut acc = Vec::new();
            partitions(inst, s, &mut acc, &mut f);
        }
    }
}

fn partitions(inst: &Instance, s: usize, acc: &mut Vec<Cycle>, f: &mut impl FnMut(&[Cycle])) {
    if s == 0 {
        f(acc);
        return;
    }
    let low = s & s.wrapping_neg();
    let rest = s ^ low;
    let mut sub = rest;
    loop {
        let block = sub | low;
        let members: Vec<usize> = (0..inst.num_targets()).filter(|&t| block >> t & 1 == 1).collect();
        for order in cyclic_orders(&members) {
            for d in 0..inst.num_depots() {
                acc.push(Cycle {
                    depot: d,
                    targets: order.clone(),
                });
                partitions(inst, s ^ block, acc, f);
                acc.pop();
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
}

/// Orders of `members` up to reversal.
fn cyclic_orders(members: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm = members.to_vec();
    permute(&mut perm, 0, &mut out);
    out.retain(|p| p.len() < 2 || p[0] < p[p.len() - 1]);
    out
}

fn permute(v: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == v.len() {
        out.push(v.clone());
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, out);
        v.swap(i, j);
    }
}
