//! Subgraph-sampling heuristic for Chimera instances.

mod heuristic;
mod subset;

pub use heuristic::{
    inner, outer_collection, run_heuristic, run_parallel, HeuristicConfig, HeuristicRun,
    ParallelOutcome, RestartPolicy, Sampler, TracePoint,
};
pub use subset::{subset_nodes, SubsetSpec};
