//! Removal of dominated targets on instances with the triangle inequality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("dominance is only defined on triangle-inequality instances")]
    NotTriangle,
    #[error("targets {0} and {1} lie in different clusters")]
    DifferentClusters(usize, usize),
    #[error("a target cannot dominate itself")]
    SameTarget,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLog {
    /// `(removed id, dominating id)` in removal order, file vertex ids.
    pub removed: Vec<(usize, usize)>,
    pub original_size: usize,
    pub reduced_size: usize,
}

/// Whether target `i` is dominated by target `j` of the same cluster.
pub fn is_dominated(inst: &Instance, i: usize, j: usize) -> Result<bool, PreprocessError> {
    if !inst.triangle() {
        return Err(PreprocessError::NotTriangle);
    }
    if i == j {
        return Err(PreprocessError::SameTarget);
    }
    if inst.cluster_of(i) != inst.cluster_of(j) {
        return Err(PreprocessError::DifferentClusters(i, j));
    }
    Ok(dominated(inst, i, j))
}

fn dominated(inst: &Instance, i: usize, j: usize) -> bool {
    let k = inst.num_depots();
    let (vi, vj) = (k + i, k + j);
    let h = inst.cluster_of(i);
    let others: Vec<usize> = (0..inst.num_targets())
        .filter(|&t| inst.cluster_of(t) != h)
        .map(|t| k + t)
        .collect();
    for d in 0..k {
        if inst.c(d, vi) < inst.c(d, vj) {
            return false;
        }
        for &p in &others {
            if inst.c(d, vi) + inst.c(vi, p) < inst.c(d, vj) + inst.c(vj, p) {
                return false;
            }
        }
    }
    for &p in &others {
        for &q in &others {
            if inst.c(p, vi) + inst.c(vi, q) < inst.c(p, vj) + inst.c(vj, q) {
                return false;
            }
        }
    }
    true
}

/// Repeatedly drops the lowest-index dominated target until none is left.
/// Mutually dominating pairs keep the lower index; no cluster is emptied.
pub fn reduce(inst: &Instance) -> (Instance, ReductionLog) {
    let mut log = ReductionLog {
        removed: Vec::new(),
        original_size: inst.num_targets(),
        reduced_size: inst.num_targets(),
    };
    if !inst.triangle() {
        return (inst.clone(), log);
    }
    let mut cur = inst.clone();
    loop {
        let mut hit = None;
        'scan: for i in 0..cur.num_targets() {
            let c = cur.cluster(cur.cluster_of(i));
            if c.len() < 2 {
                continue;
            }
            for &j in c {
                if j != i && dominated(&cur, i, j) && (j < i || !dominated(&cur, j, i)) {
                    hit = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((i, j)) = hit else { break };
        log.removed.push((cur.target_ids()[i], cur.target_ids()[j]));
        let keep: Vec<usize> = (0..cur.num_targets()).filter(|&t| t != i).collect();
        cur = cur.restrict_targets(&keep);
    }
    log.reduced_size = cur.num_targets();
    (cur, log)
}
