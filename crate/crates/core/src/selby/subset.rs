//! The low-treewidth induced subgraphs `H(w, x, i, j)`.
//!
//! Orientation 0 removes the h-nodes (right side, carrying the horizontal
//! couplers) of every cell in a column `c ≡ i (mod w+1)`, except in row `j`.
//! Rightmost-column cells have no rightward coupler, so their right-side nodes
//! are never removed. Orientation 1 is the transpose: v-nodes of rows
//! `r ≡ i (mod w+1)` except in column `j`.

use serde::{Deserialize, Serialize};

use crate::chimera::{ChimeraCoord, FaultList, Side};
use crate::error::{Error, Result};
use crate::exact::SweepHint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub w: usize,
    pub orientation: u8,
    pub i: usize,
    pub j: usize,
}

impl SubsetSpec {
    pub fn new(k: usize, w: usize, orientation: u8, i: usize, j: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::OutOfRange("w must be at least 1".into()));
        }
        if orientation > 1 {
            return Err(Error::OutOfRange(format!(
                "orientation {orientation} is not 0 or 1"
            )));
        }
        if i > w {
            return Err(Error::OutOfRange(format!(
                "residue i = {i} exceeds w = {w}"
            )));
        }
        if j >= k {
            return Err(Error::OutOfRange(format!(
                "exempt index j = {j} is not below k = {k}"
            )));
        }
        Ok(Self {
            w,
            orientation,
            i,
            j,
        })
    }

    pub fn hint(&self) -> SweepHint {
        SweepHint::Selby {
            orientation: self.orientation,
            w: self.w,
            i: self.i,
            j: self.j,
        }
    }

    /// Whether the qubit belongs to the subset on a fault-free grid.
    pub fn contains(&self, k: usize, c: &ChimeraCoord) -> bool {
        self.contains_with(k, c, true)
    }

    fn contains_with(&self, k: usize, c: &ChimeraCoord, exempt: bool) -> bool {
        let (line, across, side) = match self.orientation {
            0 => (c.col, c.row, Side::Right),
            _ => (c.row, c.col, Side::Left),
        };
        let removed = c.side == side
            && line + 1 < k
            && line % (self.w + 1) == self.i
            && (!exempt || across != self.j);
        !removed
    }

    /// Node mask over `0..8k^2` given the working-qubit mask.
    pub fn mask(&self, k: usize, working: &[bool]) -> Vec<bool> {
        self.mask_with(k, working, true)
    }

    /// The mask with the exempt row (column) cut as well, which splits the
    /// subset into independent blocks.
    pub fn trimmed_mask(&self, k: usize, working: &[bool]) -> Vec<bool> {
        self.mask_with(k, working, false)
    }

    fn mask_with(&self, k: usize, working: &[bool], exempt: bool) -> Vec<bool> {
        (0..8 * k * k)
            .map(|v| {
                working[v]
                    && self.contains_with(k, &ChimeraCoord::from_index(k, v).unwrap(), exempt)
            })
            .collect()
    }
}

/// Sorted node indices of `H(w, x, i, j)` on `C_k` minus the faulty qubits.
pub fn subset_nodes(k: usize, spec: &SubsetSpec, faults: &FaultList) -> Result<Vec<usize>> {
    SubsetSpec::new(k, spec.w, spec.orientation, spec.i, spec.j)?;
    let mut working = vec![true; 8 * k * k];
    for c in &faults.nodes {
        if !c.is_valid(k) {
            return Err(Error::InvalidCoordinate {
                coord: c.to_string(),
                k,
            });
        }
        working[c.index(k)] = false;
    }
    let mask = spec.mask(k, &working);
    Ok((0..mask.len()).filter(|&v| mask[v]).collect())
}
