//! Run the subgraph-sampling heuristic with several seeds on a C_4
//! instance and compare with the exact optimum.
//!
//! cargo run --release --example selby_heuristic

use std::time::Duration;

use chimera_ising::exact::solve_exact;
use chimera_ising::instances::{gen_selby, FaultPolicy};
use chimera_ising::selby::{run_parallel, HeuristicConfig};

fn main() -> chimera_ising::Result<()> {
    let inst = gen_selby(4, &FaultPolicy::none(), 3)?;
    let exact = solve_exact(&inst, 20)?.energy.expect("optimum");
    let cfg = HeuristicConfig {
        w: 3,
        time_limit: Duration::from_secs(10),
        target: Some(exact),
        ..HeuristicConfig::default()
    };
    let seeds: Vec<u64> = (1..=4).collect();
    let out = run_parallel(&inst, &cfg, &seeds, 1)?;
    for run in &out.runs {
        println!(
            "seed {}: energy {} after {} passes",
            run.seed, run.energy, run.passes
        );
    }
    let tally = out.tally(Some(exact));
    println!("exact {exact}, hit {}/{}", tally.hits, tally.runs);
    Ok(())
}
