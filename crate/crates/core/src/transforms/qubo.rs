//! QUBO to Ising.
//!
//! The QUBO is `max { xᵀQx + qᵀx : x ∈ {0,1}^n }` with `Q` strictly upper
//! triangular. Substituting `x_i = (1 + s_i)/2` gives
//! `4 f(x) = K + Σ Q_ij s_i s_j + Σ_i s_i (Σ_{j<i} Q_ji + Σ_{j>i} Q_ij + 2 q_i)`
//! with `K = Σ Q_ij + 2 Σ q_i`. The Ising side minimizes, so the emitted weights
//! are the negated coefficients and the optimum is `f* = (K - H(s*)) / 4`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ising::{IsingBuilder, IsingInstance};

/// A QUBO with integer numerators over `scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuboInstance {
    n: usize,
    scale: i64,
    quadratic: BTreeMap<(usize, usize), i64>,
    linear: Vec<i64>,
}

impl QuboInstance {
    /// From a dense matrix; only the strict upper triangle may be nonzero.
    pub fn from_dense(q: &[Vec<i64>], linear: Vec<i64>, scale: i64) -> Result<Self> {
        let n = linear.len();
        if q.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.len(),
            });
        }
        let mut quadratic = BTreeMap::new();
        for (i, row) in q.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                if j <= i {
                    return Err(Error::NotUpperTriangular { row: i, col: j });
                }
                quadratic.insert((i, j), v);
            }
        }
        Ok(Self {
            n,
            scale: scale.max(1),
            quadratic,
            linear,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// `xᵀQx + qᵀx` as a numerator over `scale`.
    pub fn value(&self, x: &[bool]) -> Result<i64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let quad: i64 = self
            .quadratic
            .iter()
            .filter(|(&(i, j), _)| x[i] && x[j])
            .map(|(_, &v)| v)
            .sum();
        let lin: i64 = self
            .linear
            .iter()
            .zip(x)
            .filter(|(_, &xi)| xi)
            .map(|(v, _)| v)
            .sum();
        Ok(quad + lin)
    }
}

/// The Ising instance for a QUBO and the constant `K` for value recovery.
#[derive(Clone, Debug)]
pub struct QuboIsing {
    pub ising: IsingInstance,
    pub constant: i64,
}

impl QuboIsing {
    /// QUBO value `(K - H(s)) / 4` of the assignment `x_i = (s_i + 1)/2`, as a
    /// numerator over the QUBO scale. Exact: the division never leaves a remainder.
    pub fn qubo_value(&self, energy: i64) -> i64 {
        let four_f = self.constant - energy;
        debug_assert_eq!(four_f % 4, 0);
        four_f / 4
    }

    pub fn assignment(s: &[i8]) -> Vec<bool> {
        s.iter().map(|&si| si == 1).collect()
    }
}

pub fn qubo_to_ising(q: &QuboInstance) -> Result<QuboIsing> {
    let mut fields: Vec<i64> = q.linear.iter().map(|&v| 2 * v).collect();
    let mut b = IsingBuilder::general(q.n, q.scale);
    for (&(i, j), &v) in &q.quadratic {
        fields[i] += v;
        fields[j] += v;
        b.coupling(i, j, -v)?;
    }
    for (i, h) in fields.into_iter().enumerate() {
        b.field(i, -h)?;
    }
    let constant = q.quadratic.values().sum::<i64>() + 2 * q.linear.iter().sum::<i64>();
    Ok(QuboIsing {
        ising: b.build()?,
        constant,
    })
}
