//! Per-run report and the two summary table rows derived from it.

use serde::{Deserialize, Serialize};

use crate::bnc::{Outcome, SolverStats, Status};
use crate::instance::Instance;
use crate::model::SolutionFile;
use crate::preprocess::ReductionLog;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub depots: usize,
    pub targets: usize,
    pub clusters: usize,
    pub status: Status,
    /// Best cost found; the optimum when `status` is optimal.
    pub objective: Option<i64>,
    pub preprocess: Option<ReductionLog>,
    pub stats: SolverStats,
    pub solution: Option<SolutionFile>,
}

impl RunReport {
    pub fn new(inst: &Instance, outcome: &Outcome, preprocess: Option<ReductionLog>) -> RunReport {
        RunReport {
            name: inst.name().to_string(),
            depots: inst.num_depots(),
            targets: inst.num_targets(),
            clusters: inst.num_clusters(),
            status: outcome.status,
            objective: outcome.solution.as_ref().map(|s| s.cost),
            preprocess,
            stats: outcome.stats.clone(),
            solution: outcome.solution.as_ref().map(|s| SolutionFile::from_solution(inst, s)),
        }
    }

    pub fn bounds_row(&self) -> BoundsRow {
        let opt = self.objective;
        let pct = |v: f64| opt.filter(|&o| o != 0).map(|o| 100.0 * v / o as f64);
        let s = &self.stats;
        BoundsRow {
            name: self.name.clone(),
            opt,
            lb: s.root_lb,
            pct_lb: pct(s.root_lb),
            ub: s.heuristic_ub,
            pct_ub: s.heuristic_ub.and_then(|u| pct(u as f64)),
            sec1: s.sec1,
            sec2: s.sec2,
            pec4: s.pec4,
            pec: s.pec,
            comb: s.comb,
            nodes: s.nodes,
        }
    }

    pub fn timing_row(&self) -> TimingRow {
        let s = &self.stats;
        TimingRow {
            name: self.name.clone(),
            total_t: s.total_time,
            sep_t: s.sep_time,
            sec_t: s.sec_time,
            pec4_t: s.pec4_time,
            pec_t: s.pec_time,
            comb_t: s.comb_time,
            pct_pec: if s.sep_time > 0.0 { 100.0 * s.pec_time / s.sep_time } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub name: String,
    pub opt: Option<i64>,
    #[serde(rename = "LB")]
    pub lb: f64,
    #[serde(rename = "%LB")]
    pub pct_lb: Option<f64>,
    #[serde(rename = "UB")]
    pub ub: Option<i64>,
    #[serde(rename = "%UB")]
    pub pct_ub: Option<f64>,
    pub sec1: usize,
    pub sec2: usize,
    #[serde(rename = "4pec")]
    pub pec4: usize,
    pub pec: usize,
    pub comb: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub name: String,
    #[serde(rename = "total-t")]
    pub total_t: f64,
    #[serde(rename = "sep-t")]
    pub sep_t: f64,
    #[serde(rename = "sec-t")]
    pub sec_t: f64,
    #[serde(rename = "4pec-t")]
    pub pec4_t: f64,
    #[serde(rename = "pec-t")]
    pub pec_t: f64,
    #[serde(rename = "comb-t")]
    pub comb_t: f64,
    #[serde(rename = "%pec")]
    pub pct_pec: f64,
}
