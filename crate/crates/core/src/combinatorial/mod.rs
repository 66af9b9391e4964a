//! Graph problems solved by (1+1)-style algorithms, with classical exact
//! oracles to stop runs and to check their results.

mod dsu;
mod euler;
mod graph;
mod mst;
mod sssp;

pub use dsu::DisjointSets;
pub use euler::{euler_bound, euler_bound_internal, euler_surrogate_hitting_time, euler_surrogate_process};
pub use graph::{Edge, WeightedGraph, MAX_WEIGHT};
pub use mst::{
    is_spanning_tree, kruskal, maximum_spanning_tree, mst_bound, mst_config, mst_drift_check,
    mst_fitness, mst_run, random_spanning_tree, MstDriftReport, MstProblem, TreeStart,
};
pub use sssp::{
    dijkstra, shortest_path_tree, sssp_bound, sssp_drift_check, sssp_fitness, sssp_run,
    PredecessorTree, SsspConfig, SsspDriftReport, SsspInit, SsspProblem,
};
