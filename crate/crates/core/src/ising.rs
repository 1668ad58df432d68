//! Ising instances and spin configurations.
//!
//! All weights are integer numerators over a common denominator (`scale`), so
//! `H(s) = Σ J_ij s_i s_j + Σ h_i s_i` is computed exactly as an integer over
//! `scale`. For the study's instances `scale = γ = 10`.

use std::collections::BTreeMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::chimera::{chimera_couplers, ChimeraGraph, Granularity};
use crate::error::{Error, Result};

/// Node layout of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    General,
    /// Node `i` is the Chimera qubit with linear index `i` in `C_k`.
    Chimera {
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling {
    pub a: usize,
    pub b: usize,
    pub weight: i64,
}

/// A vector in `{-1, +1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInstance(format!(
                "spin {pos} is {}, expected +1 or -1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn set(&mut self, i: usize, up: bool) {
        self.0[i] = if up { 1 } else { -1 };
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

impl Deref for SpinConfig {
    type Target = [i8];

    fn deref(&self) -> &[i8] {
        &self.0
    }
}

impl TryFrom<Vec<i8>> for SpinConfig {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinConfig> for Vec<i8> {
    fn from(s: SpinConfig) -> Self {
        s.0
    }
}

/// Fields `h`, couplings `J` and the node layout.
///
/// Inactive nodes (faulty or unused qubits) carry no weight; their spins never
/// affect the energy and solvers leave them at `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingInstance {
    topology: Topology,
    scale: i64,
    active: Vec<bool>,
    fields: Vec<i64>,
    couplings: Vec<Coupling>,
    adjacency: Vec<Vec<(usize, i64)>>,
}

impl IsingInstance {
    /// Callers guarantee sorted, unique `a < b` couplings between active nodes.
    pub(crate) fn from_parts(
        topology: Topology,
        scale: i64,
        active: Vec<bool>,
        fields: Vec<i64>,
        couplings: Vec<Coupling>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); active.len()];
        for c in &couplings {
            adjacency[c.a].push((c.b, c.weight));
            adjacency[c.b].push((c.a, c.weight));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            topology,
            scale,
            active,
            fields,
            couplings,
            adjacency,
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn chimera_k(&self) -> Option<usize> {
        match self.topology {
            Topology::Chimera { k } => Some(k),
            Topology::General => None,
        }
    }

    /// Number of spin slots (inactive nodes included).
    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// The granularity the weights respect, if every `|weight| <= scale`.
    pub fn granularity(&self) -> Option<Granularity> {
        let ok = self.fields.iter().all(|h| h.abs() <= self.scale)
            && self.couplings.iter().all(|c| c.weight.abs() <= self.scale);
        if ok {
            Granularity::new(self.scale).ok()
        } else {
            None
        }
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.active[i])
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn fields(&self) -> &[i64] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> i64 {
        self.fields[i]
    }

    /// Couplings sorted by `(a, b)` with `a < b`; zero weights may be present.
    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// `(neighbor, J)` pairs of node `i`, zero-weight couplings included.
    pub fn neighbors(&self, i: usize) -> &[(usize, i64)] {
        &self.adjacency[i]
    }

    pub fn has_field(&self) -> bool {
        self.fields.iter().any(|&h| h != 0)
    }

    pub fn coupling(&self, a: usize, b: usize) -> Option<i64> {
        let key = (a.min(b), a.max(b));
        self.couplings
            .binary_search_by(|c| (c.a, c.b).cmp(&key))
            .ok()
            .map(|i| self.couplings[i].weight)
    }

    /// `Σ |J| + Σ |h|` as a numerator; bounds `|H(s)|` for every `s`.
    pub fn abs_weight_sum(&self) -> i128 {
        self.couplings
            .iter()
            .map(|c| c.weight.abs() as i128)
            .sum::<i128>()
            + self.fields.iter().map(|h| h.abs() as i128).sum::<i128>()
    }

    pub(crate) fn check_overflow(&self) -> Result<()> {
        let bound = self.abs_weight_sum();
        if bound > (i64::MAX / 4) as i128 {
            return Err(Error::Overflow(bound));
        }
        Ok(())
    }

    /// Exact energy numerator `H(s) * scale`.
    pub fn energy(&self, s: &[i8]) -> Result<i64> {
        if s.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: s.len(),
            });
        }
        let pair: i64 = self
            .couplings
            .iter()
            .map(|c| c.weight * i64::from(s[c.a]) * i64::from(s[c.b]))
            .sum();
        let lin: i64 = self
            .fields
            .iter()
            .zip(s)
            .map(|(&h, &si)| h * i64::from(si))
            .sum();
        Ok(pair + lin)
    }

    pub fn energy_value(&self, s: &[i8]) -> Result<f64> {
        Ok(self.energy(s)? as f64 / self.scale as f64)
    }

    /// Same couplings with replaced fields.
    pub fn with_fields(&self, fields: Vec<i64>) -> Result<Self> {
        let mut b = IsingBuilder::from_instance(self);
        for (i, h) in fields.into_iter().enumerate() {
            b.field(i, h)?;
        }
        b.build()
    }

    /// Count of nodes and edges once transformed into a MaxCut instance: the
    /// active qubits plus the field node if any field is nonzero, and the nonzero
    /// couplings plus the nonzero fields.
    pub fn maxcut_size(&self) -> (usize, usize) {
        let nonzero_h = self.fields.iter().filter(|&&h| h != 0).count();
        let nonzero_j = self.couplings.iter().filter(|c| c.weight != 0).count();
        (
            self.active_count() + usize::from(nonzero_h > 0),
            nonzero_j + nonzero_h,
        )
    }
}

/// Incremental construction of an [`IsingInstance`] with validation.
#[derive(Clone, Debug)]
pub struct IsingBuilder {
    topology: Topology,
    scale: i64,
    active: Vec<bool>,
    fields: Vec<i64>,
    couplings: BTreeMap<(usize, usize), i64>,
    allowed: Option<Vec<(usize, usize)>>,
}

impl IsingBuilder {
    pub fn general(n: usize, scale: i64) -> Self {
        Self {
            topology: Topology::General,
            scale: scale.max(1),
            active: vec![true; n],
            fields: vec![0; n],
            couplings: BTreeMap::new(),
            allowed: None,
        }
    }

    /// Spins on the qubits of `graph`; faulty qubits start inactive and couplings
    /// must be working couplers. The field node of `graph`, if any, is ignored.
    pub fn chimera(graph: &ChimeraGraph, scale: i64) -> Self {
        let k = graph.k();
        Self {
            topology: Topology::Chimera { k },
            scale: scale.max(1),
            active: graph.qubit_mask(),
            fields: vec![0; graph.qubit_slots()],
            couplings: BTreeMap::new(),
            allowed: Some(graph.couplers().collect()),
        }
    }

    /// Chimera layout without a graph; couplings are checked against fault-free `C_k`.
    pub fn chimera_k(k: usize, scale: i64) -> Self {
        let n = 8 * k * k;
        Self {
            topology: Topology::Chimera { k },
            scale: scale.max(1),
            active: vec![true; n],
            fields: vec![0; n],
            couplings: BTreeMap::new(),
            allowed: Some(chimera_couplers(k)),
        }
    }

    pub fn from_instance(inst: &IsingInstance) -> Self {
        Self {
            topology: inst.topology,
            scale: inst.scale,
            active: inst.active.clone(),
            fields: inst.fields.clone(),
            couplings: inst
                .couplings
                .iter()
                .map(|c| ((c.a, c.b), c.weight))
                .collect(),
            allowed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.active.len() {
            return Err(Error::NodeOutOfRange {
                node: i,
                len: self.active.len(),
            });
        }
        Ok(())
    }

    pub fn field(&mut self, i: usize, h: i64) -> Result<&mut Self> {
        self.check_node(i)?;
        if h != 0 && !self.active[i] {
            return Err(Error::InvalidInstance(format!(
                "field on inactive node {i}"
            )));
        }
        self.fields[i] = h;
        Ok(self)
    }

    pub fn coupling(&mut self, a: usize, b: usize, j: i64) -> Result<&mut Self> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::InvalidInstance(format!("self-coupling on node {a}")));
        }
        let key = (a.min(b), a.max(b));
        if let Some(allowed) = &self.allowed {
            if allowed.binary_search(&key).is_err() {
                return Err(Error::NotAnEdge(format!("coupling {}-{}", key.0, key.1)));
            }
        }
        if !self.active[a] || !self.active[b] {
            return Err(Error::InvalidInstance(format!(
                "coupling {}-{} touches an inactive node",
                key.0, key.1
            )));
        }
        self.couplings.insert(key, j);
        Ok(self)
    }

    /// Mark a node as unused. It must carry no weight.
    pub fn deactivate(&mut self, i: usize) -> Result<&mut Self> {
        self.check_node(i)?;
        if self.fields[i] != 0 || self.couplings.keys().any(|&(a, b)| a == i || b == i) {
            return Err(Error::InvalidInstance(format!(
                "cannot deactivate node {i}: it carries weight"
            )));
        }
        self.active[i] = false;
        Ok(self)
    }

    pub fn build(self) -> Result<IsingInstance> {
        let couplings = self
            .couplings
            .into_iter()
            .map(|((a, b), weight)| Coupling { a, b, weight })
            .collect();
        Ok(IsingInstance::from_parts(
            self.topology,
            self.scale,
            self.active,
            self.fields,
            couplings,
        ))
    }
}
