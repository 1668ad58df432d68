//! Exact transformations between Ising, MaxCut and QUBO, and the
//! dominated-field preprocessing rule.

mod maxcut;
mod preprocess;
mod qubo;

pub use maxcut::{
    cut_value, ising_to_maxcut, maxcut_solution_to_spins, maxcut_to_ising, CutVector,
    MaxCutInstance, WeightedEdge,
};
pub use preprocess::{preprocess_dominated_fields, Preprocessed};
pub use qubo::{qubo_to_ising, QuboInstance, QuboIsing};
