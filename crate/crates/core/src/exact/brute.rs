//! Exhaustive enumeration in Gray-code order.
//!
//! When the interaction graph is bipartite (always the case on Chimera) only
//! the smaller colour class is enumerated: with those spins fixed, every spin of
//! the other class sees a fixed local field `f_b` and is set to `-sign(f_b)`,
//! contributing `-|f_b|`. The sum `Σ |f_b|` is maintained incrementally.

use std::collections::VecDeque;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ising::{IsingInstance, SpinConfig};
use crate::report::SolveReport;

pub const DEFAULT_BRUTE_CAP: usize = 24;

/// Two-colouring of the active nodes along nonzero couplings, if one exists.
fn two_coloring(inst: &IsingInstance) -> Option<Vec<Option<bool>>> {
    let mut color: Vec<Option<bool>> = vec![None; inst.len()];
    for start in inst.active_nodes() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for &(v, w) in inst.neighbors(u) {
                if w == 0 {
                    continue;
                }
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(color)
}

/// Ground-state energy numerator and one minimizing configuration.
///
/// Inactive nodes are reported as `+1`. Among equal energies the first state in
/// Gray-code order wins, so the result is deterministic.
pub fn brute_force_min(inst: &IsingInstance, cap: usize) -> Result<(i64, SpinConfig)> {
    inst.check_overflow()?;
    match two_coloring(inst) {
        Some(color) => bipartite(inst, &color, cap),
        None => plain(inst, cap),
    }
}

pub fn brute_force(inst: &IsingInstance) -> Result<SolveReport> {
    let start = Instant::now();
    let (energy, spins) = brute_force_min(inst, DEFAULT_BRUTE_CAP)?;
    Ok(SolveReport::optimal("brute", energy, inst.scale(), spins).with_elapsed(start.elapsed()))
}

fn plain(inst: &IsingInstance, cap: usize) -> Result<(i64, SpinConfig)> {
    let nodes: Vec<usize> = inst.active_nodes().collect();
    if nodes.len() > cap {
        return Err(Error::AboveCap {
            spins: nodes.len(),
            cap,
        });
    }
    let mut s = vec![1i8; inst.len()];
    // local[i] = h_i + Σ_j J_ij s_j
    let mut local: Vec<i64> = (0..inst.len())
        .map(|i| inst.field(i) + inst.neighbors(i).iter().map(|&(_, w)| w).sum::<i64>())
        .collect();
    let mut energy = inst.energy(&s)?;
    let mut best = (energy, 0u64);
    for step in 1u64..1 << nodes.len() {
        let bit = step.trailing_zeros() as usize;
        let v = nodes[bit];
        energy -= 2 * i64::from(s[v]) * local[v];
        s[v] = -s[v];
        for &(u, w) in inst.neighbors(v) {
            local[u] += 2 * w * i64::from(s[v]);
        }
        if energy < best.0 {
            best = (energy, step ^ (step >> 1));
        }
    }
    let mut spins = vec![1i8; inst.len()];
    for (b, &v) in nodes.iter().enumerate() {
        if best.1 >> b & 1 == 1 {
            spins[v] = -1;
        }
    }
    Ok((best.0, SpinConfig::new(spins)?))
}

fn bipartite(
    inst: &IsingInstance,
    color: &[Option<bool>],
    cap: usize,
) -> Result<(i64, SpinConfig)> {
    let class = |c: bool| -> Vec<usize> {
        inst.active_nodes()
            .filter(|&i| color[i] == Some(c))
            .collect()
    };
    let (a, b) = (class(false), class(true));
    let (enumerated, closed) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if enumerated.len() > cap {
        return Err(Error::AboveCap {
            spins: enumerated.len(),
            cap,
        });
    }
    let mut s = vec![1i8; inst.len()];
    // With every enumerated spin at +1.
    let mut f: Vec<i64> = vec![0; inst.len()];
    for &v in &closed {
        f[v] = inst.field(v)
            + inst
                .neighbors(v)
                .iter()
                .filter(|&&(_, w)| w != 0)
                .map(|&(_, w)| w)
                .sum::<i64>();
    }
    let mut abs_sum: i64 = closed.iter().map(|&v| f[v].abs()).sum();
    let mut linear: i64 = enumerated.iter().map(|&v| inst.field(v)).sum();
    let mut best = (linear - abs_sum, 0u64);
    for step in 1u64..1 << enumerated.len() {
        let bit = step.trailing_zeros() as usize;
        let v = enumerated[bit];
        linear -= 2 * i64::from(s[v]) * inst.field(v);
        s[v] = -s[v];
        for &(u, w) in inst.neighbors(v) {
            if w != 0 {
                abs_sum -= f[u].abs();
                f[u] += 2 * w * i64::from(s[v]);
                abs_sum += f[u].abs();
            }
        }
        let energy = linear - abs_sum;
        if energy < best.0 {
            best = (energy, step ^ (step >> 1));
        }
    }

    let mut spins = vec![1i8; inst.len()];
    for (b, &v) in enumerated.iter().enumerate() {
        if best.1 >> b & 1 == 1 {
            spins[v] = -1;
        }
    }
    for &v in &closed {
        let field = inst.field(v)
            + inst
                .neighbors(v)
                .iter()
                .map(|&(u, w)| w * i64::from(spins[u]))
                .sum::<i64>();
        spins[v] = if field > 0 { -1 } else { 1 };
    }
    let spins = SpinConfig::new(spins)?;
    debug_assert_eq!(inst.energy(&spins)?, best.0);
    Ok((best.0, spins))
}
