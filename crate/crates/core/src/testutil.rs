//! Naive oracles shared by unit tests. Deliberately independent of the solvers.

use crate::ising::IsingInstance;
use crate::rng::PortableRng;

/// All `2^n` spin vectors in binary counting order; bit `i` set means `s_i = -1`.
pub fn all_spins(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u64..1 << n).map(move |m| {
        (0..n)
            .map(|i| if m >> i & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// Minimum energy by recomputing the full sum for every vector.
pub fn naive_ground_energy(inst: &IsingInstance) -> i64 {
    let n = inst.len();
    assert!(n <= 22, "naive oracle is for tiny instances");
    all_spins(n)
        .map(|s| {
            let mut e = 0i64;
            for i in 0..n {
                e += inst.field(i) * s[i] as i64;
                for &(j, w) in inst.neighbors(i) {
                    if i < j {
                        e += w * (s[i] * s[j]) as i64;
                    }
                }
            }
            e
        })
        .min()
        .unwrap()
}

pub fn random_spins(rng: &mut PortableRng, n: usize) -> Vec<i8> {
    (0..n).map(|_| if rng.coin() { 1 } else { -1 }).collect()
}

/// Dense random instance on `n` nodes with weights in `-scale..=scale`.
pub fn random_general(
    rng: &mut PortableRng,
    n: usize,
    density: f64,
    scale: i64,
    with_field: bool,
) -> IsingInstance {
    let mut b = crate::ising::IsingBuilder::general(n, scale);
    for i in 0..n {
        for j in i + 1..n {
            if rng.bernoulli(density) {
                b.coupling(i, j, rng.range_inclusive(-scale, scale))
                    .unwrap();
            }
        }
        if with_field {
            b.field(i, rng.range_inclusive(-scale, scale)).unwrap();
        }
    }
    b.build().unwrap()
}
