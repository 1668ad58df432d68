//! Benchmark three solvers on a batch of small instances and print the
//! per-family summary CSV.
//!
//! cargo run --release --example bench_batch

use chimera_ising::bench::{
    run_batch, summarize, summary_csv, BenchConfig, BenchInstance, SolverKind,
};
use chimera_ising::instances::{gen_mgw, gen_rfr, FaultPolicy};

fn main() -> chimera_ising::Result<()> {
    let mut batch = Vec::new();
    for seed in 0..5 {
        for (family, inst) in [
            ("mgw", gen_mgw(2, &FaultPolicy::machine(), seed)?),
            ("rfr", gen_rfr(2, &FaultPolicy::machine(), seed)?),
        ] {
            batch.push(BenchInstance {
                id: format!("{family}-{seed}"),
                family: family.into(),
                instance: inst,
                reference: None,
            });
        }
    }
    let mut cfg = BenchConfig {
        solvers: vec![SolverKind::Dp, SolverKind::Brute, SolverKind::Selby],
        ..BenchConfig::default()
    };
    cfg.heuristic.max_passes = Some(3);
    let records = run_batch(&batch, &cfg);
    print!("{}", summary_csv(&summarize(&records))?);
    Ok(())
}
