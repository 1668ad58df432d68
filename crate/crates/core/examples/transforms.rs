//! Move a small problem between the QUBO, Ising and MaxCut forms and
//! simplify it with dominated-field preprocessing.
//!
//! cargo run --example transforms

use chimera_ising::exact::brute_force_min;
use chimera_ising::transforms::{
    cut_value, ising_to_maxcut, preprocess_dominated_fields, qubo_to_ising, CutVector, QuboInstance,
};

fn main() -> chimera_ising::Result<()> {
    // maximise x0 + x1 + x2 - 2 x0 x1 - 2 x1 x2
    let q = vec![vec![0, -2, 0], vec![0, 0, -2], vec![0, 0, 0]];
    let qubo = QuboInstance::from_dense(&q, vec![1, 1, 1], 1)?;
    let qi = qubo_to_ising(&qubo)?;
    let (energy, spins) = brute_force_min(&qi.ising, 24)?;
    let x = chimera_ising::transforms::QuboIsing::assignment(&spins);
    println!("qubo optimum {} at {x:?}", qi.qubo_value(energy));

    let mc = ising_to_maxcut(&qi.ising);
    let cut = cut_value(&mc, &CutVector::from_spins(&mc, &spins)?)?;
    println!(
        "maxcut: {} nodes, cut {cut}, energy back {}",
        mc.nodes(),
        mc.energy_from_cut(cut)
    );

    let p = preprocess_dominated_fields(&qi.ising);
    println!(
        "preprocessing fixed {} of {} spins",
        p.fixed_count(),
        qi.ising.len()
    );
    Ok(())
}
