//! Dominated-field fixing.
//!
//! If `|h_i| >= Σ_j |J_ij|`, then `s_i = -sign(h_i)` is optimal whatever the
//! neighbours do. Fixed spins are folded into their neighbours' fields and the
//! rule is applied again until nothing changes.

use crate::ising::{Coupling, IsingInstance, SpinConfig};

#[derive(Clone, Debug)]
pub struct Preprocessed {
    /// `Some(spin)` for every fixed node.
    pub fixed: Vec<Option<i8>>,
    /// The remaining problem, same indexing, fixed nodes inactive.
    pub reduced: IsingInstance,
    /// Energy numerator contributed by the fixed spins.
    pub constant: i64,
}

impl Preprocessed {
    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().filter(|f| f.is_some()).count()
    }

    /// Merge a configuration of the reduced instance with the fixed spins.
    pub fn expand(&self, reduced: &[i8]) -> SpinConfig {
        let spins = self
            .fixed
            .iter()
            .zip(reduced)
            .map(|(f, &s)| f.unwrap_or(s))
            .collect();
        SpinConfig::new(spins).expect("spins are ±1")
    }
}

/// `s_i = -sign(h_i)`, with `h_i = 0` mapping to `+1`.
fn dominant_spin(h: i64) -> i8 {
    if h > 0 {
        -1
    } else {
        1
    }
}

pub fn preprocess_dominated_fields(inst: &IsingInstance) -> Preprocessed {
    let n = inst.len();
    let mut fields = inst.fields().to_vec();
    let mut fixed: Vec<Option<i8>> = vec![None; n];
    let mut constant = 0i64;
    let mut changed = true;
    while changed {
        changed = false;
        for i in inst.active_nodes() {
            if fixed[i].is_some() {
                continue;
            }
            let bound: i64 = inst
                .neighbors(i)
                .iter()
                .filter(|(j, _)| fixed[*j].is_none())
                .map(|(_, w)| w.abs())
                .sum();
            if fields[i].abs() < bound {
                continue;
            }
            let s = dominant_spin(fields[i]);
            fixed[i] = Some(s);
            constant += fields[i] * i64::from(s);
            for &(j, w) in inst.neighbors(i) {
                if fixed[j].is_none() {
                    fields[j] += w * i64::from(s);
                }
            }
            changed = true;
        }
    }

    let mut active = inst.active_mask().to_vec();
    for (i, f) in fixed.iter().enumerate() {
        if f.is_some() {
            active[i] = false;
            fields[i] = 0;
        }
    }
    let couplings: Vec<Coupling> = inst
        .couplings()
        .iter()
        .filter(|c| active[c.a] && active[c.b])
        .copied()
        .collect();
    let reduced =
        IsingInstance::from_parts(inst.topology(), inst.scale(), active, fields, couplings);
    Preprocessed {
        fixed,
        reduced,
        constant,
    }
}
