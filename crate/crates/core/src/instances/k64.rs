//! Random dense logical problems embedded with the clique embedding.
//!
//! The logical graph is `G(4k, p)`. Pairs are visited in lexicographic order;
//! each draws its edge indicator and, for the Ising family, then its sign.
//! Ising fields are drawn afterwards in node order.

use crate::chimera::ChimeraGraph;
use crate::error::{Error, Result};
use crate::ising::{IsingBuilder, IsingInstance};
use crate::rng::PortableRng;

use super::embedding::{embed, ChainCheck, CliqueEmbedding, EmbedOutcome};
use super::families::GAMMA;

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "edge probability {p} is not in (0, 1)"
        )))
    }
}

/// `±1` couplings on `G(n, p)`, fields uniform over `{-|N(i)|+1, ..., |N(i)|-1}`.
///
/// Since `|h_i| < |N(i)| = Σ_j |J_ij|`, no node is fixable by dominated-field
/// preprocessing. Weights are numerators over `γ = 10`.
pub fn logical_ising(n: usize, p: f64, seed: u64) -> Result<IsingInstance> {
    check_p(p)?;
    let mut rng = PortableRng::new(seed);
    let mut b = IsingBuilder::general(n, GAMMA);
    let mut degree = vec![0i64; n];
    for a in 0..n {
        for c in a + 1..n {
            if rng.bernoulli(p) {
                let j = if rng.coin() { 1 } else { -1 };
                b.coupling(a, c, j)?;
                degree[a] += 1;
                degree[c] += 1;
            }
        }
    }
    for (i, &d) in degree.iter().enumerate() {
        if d > 0 {
            b.field(i, rng.range_inclusive(1 - d, d - 1))?;
        }
    }
    b.build()
}

/// Unit couplings on `G(n, p)` and no field: minimizing `Σ s_i s_j` is max cut.
pub fn logical_maxcut(n: usize, p: f64, seed: u64) -> Result<IsingInstance> {
    check_p(p)?;
    let mut rng = PortableRng::new(seed);
    let mut b = IsingBuilder::general(n, GAMMA);
    for a in 0..n {
        for c in a + 1..n {
            if rng.bernoulli(p) {
                b.coupling(a, c, 1)?;
            }
        }
    }
    b.build()
}

/// Cut size of a max-cut logical instance from its energy numerator: `(|E| - Σ s_i s_j) / 2`.
pub fn cut_size(logical: &IsingInstance, energy: i64) -> i64 {
    (logical.couplings().len() as i64 - energy) / 2
}

fn embed_on_clique(logical: IsingInstance, k: usize, check: ChainCheck) -> Result<EmbedOutcome> {
    let embedding = CliqueEmbedding::standard(k)?;
    let graph = ChimeraGraph::fault_free(k)?;
    embed(&logical, &embedding, &graph, check)
}

/// `K_{4k}` Ising problem on fault-free `C_k`; `k = 16` gives the 64-node family.
pub fn gen_k64_ising(k: usize, p: f64, seed: u64, check: ChainCheck) -> Result<EmbedOutcome> {
    embed_on_clique(logical_ising(4 * k, p, seed)?, k, check)
}

/// `K_{4k}` max-cut problem on fault-free `C_k`.
pub fn gen_k64_maxcut(k: usize, p: f64, seed: u64, check: ChainCheck) -> Result<EmbedOutcome> {
    embed_on_clique(logical_maxcut(4 * k, p, seed)?, k, check)
}
