//! Generate one instance of each Chimera family and print its size.
//!
//! cargo run --example generate_instances

use chimera_ising::instances::{generate, Family, Generated, GeneratorSpec};

fn main() -> chimera_ising::Result<()> {
    for family in [
        Family::Mgw,
        Family::Rfr,
        Family::Selby,
        Family::Mis,
        Family::K64MaxCut,
    ] {
        let k = if family.is_embedded() { 16 } else { 4 };
        let spec = GeneratorSpec::new(family, k, 7);
        match generate(&spec)? {
            Generated::Rejected { reason } => println!("{family}: rejected ({reason})"),
            g => {
                let inst = g.instance().expect("accepted instance");
                println!(
                    "{family}: {} spins, {} couplings",
                    inst.len(),
                    inst.couplings().len()
                );
            }
        }
    }
    Ok(())
}
