//! Brute-force maxima of GSEC and GPEC violations at a point.

use gmdtsp::instance::Instance;
use gmdtsp::model::{FractionalPoint, VariableMap};
use gmdtsp::maxflow::EPS_SUPP;
use rand::Rng;

/// Random point on a quarter grid.  Edges at unvisited targets stay zero so
/// the support graph sees every nonzero value.
pub fn random_point(rng: &mut impl Rng, inst: &Instance, map: &VariableMap) -> FractionalPoint {
    let n = inst.num_targets();
    let k = inst.num_depots();
    let mut v = vec![0.0; map.num_vars()];
    for t in 0..n {
        v[map.y(t)] = rng.gen_range(0..=4) as f64 / 4.0;
    }
    let density = rng.gen_range(0.2..0.7);
    for e in 0..map.num_edges() {
        let (a, b) = map.endpoints(e);
        let live = |u: usize| u < k || v[map.y(u - k)] > 0.0;
        if live(a) && live(b) && rng.gen_bool(density) {
            let top = if map.is_depot_edge(e) { 8 } else { 4 };
            v[e] = rng.gen_range(1..=top) as f64 / 4.0;
        }
    }
    FractionalPoint::new(v)
}

fn cut(inst: &Instance, map: &VariableMap, p: &FractionalPoint, s: usize) -> f64 {
    let k = inst.num_depots();
    let inside = |u: usize| u >= k && s >> (u - k) & 1 == 1;
    (0..map.num_edges())
        .filter(|&e| p.values[e] > EPS_SUPP)
        .filter(|&e| {
            let (a, b) = map.endpoints(e);
            inside(a) != inside(b)
        })
        .map(|e| p.values[e])
        .sum()
}

fn mu(inst: &Instance, s: usize) -> usize {
    inst.clusters().iter().filter(|c| c.iter().all(|&t| s >> t & 1 == 1)).count()
}

/// Largest violation over both GSEC forms and every target set.
pub fn gsec_max(inst: &Instance, map: &VariableMap, p: &FractionalPoint) -> f64 {
    let n = inst.num_targets();
    let mut best = f64::NEG_INFINITY;
    for s in 1usize..1 << n {
        let c = cut(inst, map, p, s);
        if mu(inst, s) > 0 {
            best = best.max(2.0 - c);
        }
        for i in (0..n).filter(|&i| s >> i & 1 == 1) {
            best = best.max(2.0 * p.y(map, i) - c);
        }
    }
    best
}

/// Largest GPEC violation over ordered depot splits, paths ends and sets.
pub fn gpec_max(inst: &Instance, map: &VariableMap, p: &FractionalPoint) -> f64 {
    let n = inst.num_targets();
    let k = inst.num_depots();
    let mut best = f64::NEG_INFINITY;
    for j in 0..n {
        for kk in j + 1..n {
            for split in 1usize..(1 << k) - 1 {
                let l: f64 = (0..k)
                    .map(|d| if split >> d & 1 == 1 { p.x(map, d, k + j) } else { p.x(map, d, k + kk) })
                    .sum();
                let rest = ((1usize << n) - 1) & !(1 << j) & !(1 << kk);
                let mut s = rest;
                while s > 0 {
                    let c = cut(inst, map, p, s | 1 << j | 1 << kk);
                    if mu(inst, s) > 0 {
                        best = best.max(l + 1.0 - c);
                    }
                    for i in (0..n).filter(|&i| s >> i & 1 == 1) {
                        best = best.max(l + p.y(map, i) - c);
                    }
                    s = (s - 1) & rest;
                }
            }
        }
    }
    best
}
