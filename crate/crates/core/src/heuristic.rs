//! LP-rounding primal heuristic: round visits, then build depot tours with
//! nearest neighbour, 2-opt and inter-depot moves.

use crate::instance::Instance;
use crate::model::{check_feasible, Cycle, FractionalPoint, IntegerSolution, VariableMap};

/// Targets with `y* >= 0.5`, plus the best target of any cluster left empty.
pub fn round_selection(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Vec<usize> {
    let n = inst.num_targets();
    let mut sel: Vec<bool> = (0..n).map(|t| point.y(map, t) >= 0.5).collect();
    for c in inst.clusters() {
        if c.iter().any(|&t| sel[t]) {
            continue;
        }
        let mut best = c[0];
        for &t in c {
            if point.y(map, t) > point.y(map, best) || (point.y(map, t) == point.y(map, best) && t < best) {
                best = t;
            }
        }
        sel[best] = true;
    }
    (0..n).filter(|&t| sel[t]).collect()
}

fn tour_cost(inst: &Instance, d: usize, tour: &[usize]) -> i64 {
    Cycle {
        depot: d,
        targets: tour.to_vec(),
    }
    .cost(inst)
}

fn nearest_neighbour(inst: &Instance, d: usize, targets: &[usize]) -> Vec<usize> {
    let k = inst.num_depots();
    let mut left = targets.to_vec();
    let mut tour = Vec::with_capacity(left.len());
    let mut cur = d;
    while !left.is_empty() {
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by_key(|&(_, &t)| (inst.c(cur, k + t), t))
            .unwrap();
        let t = left.remove(pos);
        tour.push(t);
        cur = k + t;
    }
    tour
}

/// 2-opt over the closed walk `d, tour..., d`.
fn two_opt(inst: &Instance, d: usize, tour: &mut [usize]) {
    let k = inst.num_depots();
    let m = tour.len();
    if m < 3 {
        return;
    }
    let vert = |tour: &[usize], i: usize| if i == 0 || i == m + 1 { d } else { k + tour[i - 1] };
    let mut improved = true;
    while improved {
        improved = false;
        // positions 0..=m+1 in the closed walk; reverse positions i+1..=j
        for i in 0..m {
            for j in i + 2..=m {
                let (a, b) = (vert(tour, i), vert(tour, i + 1));
                let (c, e) = (vert(tour, j), vert(tour, j + 1));
                let delta = inst.c(a, c) + inst.c(b, e) - inst.c(a, b) - inst.c(c, e);
                if delta < 0 {
                    tour[i..j].reverse();
                    improved = true;
                }
            }
        }
    }
}

/// Cheapest insertion of `t` into the tour of depot `d`.
fn best_insertion(inst: &Instance, d: usize, tour: &[usize], t: usize) -> (i64, usize) {
    let base = tour_cost(inst, d, tour);
    let mut best = (i64::MAX, 0);
    let mut trial = tour.to_vec();
    for pos in 0..=tour.len() {
        trial.insert(pos, t);
        let delta = tour_cost(inst, d, &trial) - base;
        if delta < best.0 {
            best = (delta, pos);
        }
        trial.remove(pos);
    }
    best
}

fn inter_depot(inst: &Instance, tours: &mut [Vec<usize>]) -> bool {
    let k = tours.len();
    let mut any = false;
    let mut improved = true;
    while improved {
        improved = false;
        // relocate
        'relocate: for a in 0..k {
            for pos in 0..tours[a].len() {
                let t = tours[a][pos];
                let mut without = tours[a].clone();
                without.remove(pos);
                let gain = tour_cost(inst, a, &tours[a]) - tour_cost(inst, a, &without);
                for b in 0..k {
                    if b == a {
                        continue;
                    }
                    let (delta, at) = best_insertion(inst, b, &tours[b], t);
                    if delta < gain {
                        tours[a] = without;
                        tours[b].insert(at, t);
                        improved = true;
                        any = true;
                        break 'relocate;
                    }
                }
            }
        }
        if improved {
            continue;
        }
        // swap
        'swap: for a in 0..k {
            for b in a + 1..k {
                let before = tour_cost(inst, a, &tours[a]) + tour_cost(inst, b, &tours[b]);
                for pa in 0..tours[a].len() {
                    for pb in 0..tours[b].len() {
                        let mut ta = tours[a].clone();
                        let mut tb = tours[b].clone();
                        std::mem::swap(&mut ta[pa], &mut tb[pb]);
                        if tour_cost(inst, a, &ta) + tour_cost(inst, b, &tb) < before {
                            tours[a] = ta;
                            tours[b] = tb;
                            improved = true;
                            any = true;
                            break 'swap;
                        }
                    }
                }
            }
        }
    }
    any
}

/// Builds a solution visiting exactly the selected targets.
pub fn mdtsp_construct_improve(inst: &Instance, map: &VariableMap, sel: &[usize]) -> IntegerSolution {
    let k = inst.num_depots();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &t in sel {
        let d = (0..k).min_by_key(|&d| (inst.c(d, k + t), d)).unwrap();
        groups[d].push(t);
    }
    let mut tours: Vec<Vec<usize>> = (0..k).map(|d| nearest_neighbour(inst, d, &groups[d])).collect();
    loop {
        for (d, tour) in tours.iter_mut().enumerate() {
            two_opt(inst, d, tour);
        }
        if !inter_depot(inst, &mut tours) {
            break;
        }
    }
    let cycles = tours
        .into_iter()
        .enumerate()
        .filter(|(_, t)| !t.is_empty())
        .map(|(depot, targets)| Cycle { depot, targets })
        .collect();
    IntegerSolution::from_cycles(inst, map, cycles)
}

/// Heuristic solution from an LP point; an integral feasible point is
/// returned as is.
pub fn run_heuristic(point: &FractionalPoint, inst: &Instance, map: &VariableMap) -> Option<IntegerSolution> {
    if point.is_integral() {
        let x: Vec<u8> = point.values[..map.num_edges()].iter().map(|v| v.round() as u8).collect();
        let y: Vec<u8> = point.values[map.num_edges()..].iter().map(|v| v.round() as u8).collect();
        if let Ok(sol) = check_feasible(inst, map, &x, &y) {
            return Some(sol);
        }
    }
    let sel = round_selection(point, inst, map);
    let sol = mdtsp_construct_improve(inst, map, &sel);
    match check_feasible(inst, map, &sol.x, &sol.y) {
        Ok(checked) => Some(checked),
        Err(v) => {
            log::error!("heuristic produced an infeasible solution: {v}");
            None
        }
    }
}
