//! Ising to MaxCut and back.
//!
//! Each coupling `J_ij` becomes an edge weight `c_ij`, each nonzero field `h_i`
//! an edge `c_iv` to the extra field node `v`. Because `s_i s_j = 1 - 2 x_ij`,
//! `H(s) = Σ c - 2 c(δ(W))` where `W` is the set of nodes with spin `-1`
//! relative to `v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingBuilder, IsingInstance, SpinConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub a: usize,
    pub b: usize,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCutInstance {
    nodes: usize,
    scale: i64,
    edges: Vec<WeightedEdge>,
    field_node: Option<usize>,
}

impl MaxCutInstance {
    /// Edges must be sorted by `(a, b)` with `a < b < nodes` and unique.
    pub fn new(
        nodes: usize,
        scale: i64,
        mut edges: Vec<WeightedEdge>,
        field_node: Option<usize>,
    ) -> Result<Self> {
        for e in &mut edges {
            if e.a == e.b || e.a.max(e.b) >= nodes {
                return Err(Error::InvalidInstance(format!(
                    "edge {}-{} is not valid for {nodes} nodes",
                    e.a, e.b
                )));
            }
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
        }
        edges.sort_unstable_by_key(|e| (e.a, e.b));
        if edges
            .windows(2)
            .any(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b))
        {
            return Err(Error::InvalidInstance("duplicate edge".into()));
        }
        if let Some(v) = field_node {
            if v >= nodes {
                return Err(Error::NodeOutOfRange {
                    node: v,
                    len: nodes,
                });
            }
        }
        Ok(Self {
            nodes,
            scale: scale.max(1),
            edges,
            field_node,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn field_node(&self) -> Option<usize> {
        self.field_node
    }

    /// `Σ c_e`, the constant in `H = Σ c - 2 cut`.
    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Index of `(a, b)` in [`edges`](Self::edges).
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by(|e| (e.a, e.b).cmp(&key)).ok()
    }

    /// The Ising energy numerator corresponding to a cut value.
    pub fn energy_from_cut(&self, cut: i64) -> i64 {
        self.total_weight() - 2 * cut
    }
}

/// A cut `δ(W)` given by its side set and its characteristic vector over the edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutVector {
    pub side: Vec<bool>,
    pub x: Vec<bool>,
}

impl CutVector {
    /// The cut `δ(W)` of `W = {i : side[i]}`.
    pub fn from_side(inst: &MaxCutInstance, side: Vec<bool>) -> Result<Self> {
        if side.len() != inst.nodes {
            return Err(Error::DimensionMismatch {
                expected: inst.nodes,
                got: side.len(),
            });
        }
        let x = inst.edges.iter().map(|e| side[e.a] != side[e.b]).collect();
        Ok(Self { side, x })
    }

    /// Side set `W = {i : s_i != s_v}`; without a field node, `v` is node 0.
    pub fn from_spins(inst: &MaxCutInstance, spins: &[i8]) -> Result<Self> {
        let reference = inst.field_node.unwrap_or(0);
        let mut side = vec![false; inst.nodes];
        let ising_len = inst.nodes - usize::from(inst.field_node.is_some());
        if spins.len() != ising_len {
            return Err(Error::DimensionMismatch {
                expected: ising_len,
                got: spins.len(),
            });
        }
        let ref_spin = if inst.field_node.is_some() {
            1
        } else {
            spins.first().copied().unwrap_or(1)
        };
        for (i, &s) in spins.iter().enumerate() {
            side[i] = s != ref_spin;
        }
        side[reference] = false;
        Self::from_side(inst, side)
    }
}

/// Weight of the cut. Rejects vectors with `x != χ(δ(W))`.
pub fn cut_value(inst: &MaxCutInstance, cut: &CutVector) -> Result<i64> {
    if cut.side.len() != inst.nodes {
        return Err(Error::DimensionMismatch {
            expected: inst.nodes,
            got: cut.side.len(),
        });
    }
    if cut.x.len() != inst.edges.len() {
        return Err(Error::InconsistentCut(format!(
            "characteristic vector has {} entries for {} edges",
            cut.x.len(),
            inst.edges.len()
        )));
    }
    let mut value = 0;
    for (e, &x) in inst.edges.iter().zip(&cut.x) {
        if x != (cut.side[e.a] != cut.side[e.b]) {
            return Err(Error::InconsistentCut(format!(
                "x({}, {}) = {} does not match the side set",
                e.a,
                e.b,
                u8::from(x)
            )));
        }
        if x {
            value += e.weight;
        }
    }
    Ok(value)
}

/// Node `i` of the Ising instance keeps index `i`; the field node, present only
/// when some field is nonzero, gets index `inst.len()`.
pub fn ising_to_maxcut(inst: &IsingInstance) -> MaxCutInstance {
    let n = inst.len();
    let field = inst.has_field().then_some(n);
    let mut edges: Vec<WeightedEdge> = inst
        .couplings()
        .iter()
        .filter(|c| c.weight != 0)
        .map(|c| WeightedEdge {
            a: c.a,
            b: c.b,
            weight: c.weight,
        })
        .collect();
    for (i, &h) in inst.fields().iter().enumerate() {
        if h != 0 {
            edges.push(WeightedEdge {
                a: i,
                b: n,
                weight: h,
            });
        }
    }
    edges.sort_unstable_by_key(|e| (e.a, e.b));
    MaxCutInstance {
        nodes: n + usize::from(field.is_some()),
        scale: inst.scale(),
        edges,
        field_node: field,
    }
}

/// Inverse of [`ising_to_maxcut`]: the field node is removed (nodes above it
/// shift down by one) and its edge weights become fields.
pub fn maxcut_to_ising(mc: &MaxCutInstance) -> Result<IsingInstance> {
    let n = mc.nodes - usize::from(mc.field_node.is_some());
    let map = |i: usize| match mc.field_node {
        Some(v) if i > v => i - 1,
        _ => i,
    };
    let mut b = IsingBuilder::general(n, mc.scale);
    for e in &mc.edges {
        match mc.field_node {
            Some(v) if e.a == v => b.field(map(e.b), e.weight)?,
            Some(v) if e.b == v => b.field(map(e.a), e.weight)?,
            _ => b.coupling(map(e.a), map(e.b), e.weight)?,
        };
    }
    b.build()
}

/// `s_i = +1` iff node `i` is on the same side as the field node (`s_i = 1 - 2 x_iv`).
/// Without a field node, node 0 plays its role and gets `s_0 = +1`.
///
/// `expect_field` states whether the caller's instance has a field node; a
/// mismatch is rejected.
pub fn maxcut_solution_to_spins(
    inst: &MaxCutInstance,
    cut: &CutVector,
    expect_field: bool,
) -> Result<SpinConfig> {
    cut_value(inst, cut)?;
    match (inst.field_node, expect_field) {
        (Some(v), true) => {
            let spins = (0..inst.nodes)
                .filter(|&i| i != v)
                .map(|i| if cut.side[i] == cut.side[v] { 1 } else { -1 })
                .collect();
            SpinConfig::new(spins)
        }
        (None, false) => {
            let reference = cut.side.first().copied().unwrap_or(false);
            let spins = cut
                .side
                .iter()
                .map(|&s| if s == reference { 1 } else { -1 })
                .collect();
            SpinConfig::new(spins)
        }
        (None, true) => Err(Error::InvalidInstance(
            "MaxCut instance has no field node".into(),
        )),
        (Some(_), false) => Err(Error::InvalidInstance(
            "MaxCut instance has a field node but none was expected".into(),
        )),
    }
}
