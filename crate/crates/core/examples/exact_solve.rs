//! Solve a random C_4 instance exactly and check it against the energy of
//! the returned spins.
//!
//! cargo run --release --example exact_solve

use std::time::Instant;

use chimera_ising::exact::solve_exact;
use chimera_ising::instances::{gen_rfr, FaultPolicy};

fn main() -> chimera_ising::Result<()> {
    let inst = gen_rfr(4, &FaultPolicy::machine(), 11)?;
    let start = Instant::now();
    let report = solve_exact(&inst, 20)?;
    let energy = report.energy.expect("exact solve returns an energy");
    let spins = report.spins.as_ref().expect("exact solve returns spins");
    assert_eq!(inst.energy(spins)?, energy);
    println!(
        "ground state {energy} (x1/{}) in {:.2?}",
        inst.scale(),
        start.elapsed()
    );
    Ok(())
}
