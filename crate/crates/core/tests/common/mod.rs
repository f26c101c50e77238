#![allow(dead_code)]

pub mod exhaustive;

use gmdtsp::instance::{euc_2d, Instance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random partition of `0..n` into `m` nonempty blocks.
pub fn partition(rng: &mut impl Rng, n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = order[..m].iter().map(|&t| vec![t]).collect();
    for &t in &order[m..] {
        let b = rng.gen_range(0..m);
        blocks[b].push(t);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Costs {
    Euclid,
    Matrix,
    /// Integer L1 distances, so the triangle inequality holds exactly.
    Manhattan,
}

pub fn random_instance(seed: u64, n: usize, m: usize, k: usize, costs: Costs) -> Instance {
    let mut r = rng(seed);
    let clusters = partition(&mut r, n, m);
    let nv = n + k;
    let mut w = vec![vec![0i64; nv]; nv];
    match costs {
        Costs::Euclid | Costs::Manhattan => {
            let pts: Vec<(i64, i64)> = (0..nv).map(|_| (r.gen_range(0..100), r.gen_range(0..100))).collect();
            for u in 0..nv {
                for v in 0..nv {
                    let (a, b) = (pts[u], pts[v]);
                    w[u][v] = if costs == Costs::Euclid {
                        euc_2d((a.0 as f64, a.1 as f64), (b.0 as f64, b.1 as f64))
                    } else {
                        (a.0 - b.0).abs() + (a.1 - b.1).abs()
                    };
                }
            }
        }
        Costs::Matrix => {
            for u in 0..nv {
                for v in u + 1..nv {
                    let c = r.gen_range(1..=100);
                    w[u][v] = c;
                    w[v][u] = c;
                }
            }
        }
    }
    Instance::new(
        format!("rand{seed}-{n}t{m}c{k}d"),
        (1..=k).collect(),
        (k + 1..=nv).collect(),
        clusters,
        |u, v| w[u][v],
    )
    .expect("generated instance is valid")
}

/// Triangle-inequality instance where some targets copy another member of
/// their cluster, so dominance must fire.
pub fn duplicated_instance(seed: u64, n: usize, m: usize, k: usize) -> Instance {
    let mut r = rng(seed ^ 0xD0D0);
    let clusters = partition(&mut r, n, m);
    let nv = n + k;
    let mut pts: Vec<(i64, i64)> = (0..nv).map(|_| (r.gen_range(0..60), r.gen_range(0..60))).collect();
    let mut copied = false;
    for c in &clusters {
        if c.len() >= 2 && (!copied || r.gen_bool(0.5)) {
            pts[k + c[1]] = pts[k + c[0]];
            copied = true;
        }
    }
    assert!(copied, "no cluster with two members");
    Instance::new(
        format!("dup{seed}"),
        (1..=k).collect(),
        (k + 1..=nv).collect(),
        clusters,
        |u, v| (pts[u].0 - pts[v].0).abs() + (pts[u].1 - pts[v].1).abs(),
    )
    .unwrap()
}

/// The 200-instance oracle corpus: 3..=9 targets, 2..=4 clusters, 2..=3
/// depots, alternating Euclidean and random-matrix costs.
pub fn corpus() -> Vec<Instance> {
    (0..200u64)
        .map(|i| {
            let n = 3 + (i % 7) as usize;
            let m = (2 + ((i / 7) % 3) as usize).min(n);
            let k = 2 + ((i / 21) % 2) as usize;
            let costs = if i % 2 == 0 { Costs::Euclid } else { Costs::Matrix };
            random_instance(1000 + i, n, m, k, costs)
        })
        .collect()
}

pub fn library(name: &str) -> String {
    let path = format!("{}/../../data/{name}.gtsp", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}
