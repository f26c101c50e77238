//! Exact branch-and-cut for the generalized multiple-depot TSP.

pub mod instance;
pub mod lp;
pub mod model;
pub mod maxflow;
pub mod separation;
pub mod oracle;
pub mod preprocess;
pub mod heuristic;
pub mod bnc;
pub mod report;
