//! Embed a random K_16 Ising problem into C_4 with chains, solve the
//! physical instance and decode the logical answer.
//!
//! cargo run --release --example clique_embedding

use chimera_ising::exact::{brute_force_min, solve_exact};
use chimera_ising::instances::{gen_k64_ising, ChainCheck, EmbedOutcome};

fn main() -> chimera_ising::Result<()> {
    for seed in 0..5 {
        match gen_k64_ising(4, 0.25, seed, ChainCheck::Integrity)? {
            EmbedOutcome::Rejected { reason } => println!("seed {seed}: rejected, {reason}"),
            EmbedOutcome::Embedded(emb) => {
                let report = solve_exact(&emb.physical, 20)?;
                let (logical, spins) = emb.logical_energy(report.spins.as_ref().expect("spins"))?;
                let (brute, _) = brute_force_min(&emb.logical, 16)?;
                println!(
                    "seed {seed}: physical {} with offset {} -> logical {logical} (brute force {brute}), spins {}",
                    report.energy.expect("energy"),
                    emb.offset,
                    chimera_ising::format::spins_to_string(&spins).trim()
                );
            }
        }
    }
    Ok(())
}
