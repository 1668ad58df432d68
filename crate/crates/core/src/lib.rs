//! Ising ground states on Chimera graphs: topology, exact transformations,
//! exact and heuristic solvers, instance generators and a benchmark harness.

pub mod bench;
pub mod chimera;
pub mod cli;
pub mod error;
pub mod exact;
pub mod format;
pub mod instances;
pub mod ising;
pub mod report;
pub mod rng;
pub mod selby;
pub mod transforms;

#[cfg(test)]
mod testutil;

pub use chimera::{ChimeraCoord, ChimeraGraph, FaultList, Granularity, Side};
pub use error::{Error, Result};
pub use ising::{Coupling, IsingBuilder, IsingInstance, SpinConfig, Topology};
pub use report::{SolveReport, Status};
pub use rng::PortableRng;
