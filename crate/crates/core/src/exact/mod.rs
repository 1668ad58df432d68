//! Exact ground states: exhaustive enumeration for tiny instances and a
//! boundary dynamic program for Chimera-structured ones.

mod brute;
mod dp;
mod sweep;

use std::time::Instant;

pub use brute::{brute_force, brute_force_min, DEFAULT_BRUTE_CAP};
pub use dp::{solve_dp, ConditionalProblem, DpSolution, TieBreak, DEFAULT_WIDTH_CAP};
pub use sweep::{build_sweep, SweepDecomposition, SweepHint, SweepStep};

use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::report::SolveReport;

/// Ground state of the whole instance by dynamic programming.
///
/// A sweep wider than `cap` yields a `capped` report rather than an error.
pub fn solve_exact(inst: &IsingInstance, cap: usize) -> Result<SolveReport> {
    let start = Instant::now();
    let p = ConditionalProblem::full(inst);
    let d = build_sweep(inst, p.subset(), &SweepHint::Auto);
    match solve_dp(&p, &d, &TieBreak::all_up(inst.len()), cap) {
        Ok(sol) => Ok(
            SolveReport::optimal("dp", sol.energy, inst.scale(), sol.spins)
                .with_elapsed(start.elapsed()),
        ),
        Err(e @ Error::WidthOverCap { .. }) => {
            Ok(
                SolveReport::capped("dp", inst.scale(), e.to_string())
                    .with_elapsed(start.elapsed()),
            )
        }
        Err(e) => Err(e),
    }
}
