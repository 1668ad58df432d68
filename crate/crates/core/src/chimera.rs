//! Chimera graph topology.
//!
//! `C_k` is a `k x k` grid of `K_{4,4}` cells. Qubit `(row, col, side, unit)` has
//! the linear index `row*8k + col*8 + side*4 + unit`; when the field node is
//! present it takes index `8k^2`.
//!
//! Left-side nodes carry the vertical couplers (to the same unit in the cell
//! below), right-side nodes the horizontal couplers (to the same unit in the
//! cell to the right). Every cell is bipartite between its sides, and because
//! inter-cell couplers join equal sides, the two colour classes of the whole
//! graph are `side XOR (row + col) mod 2`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left = 0,
    Right = 1,
}

impl Side {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Side> {
        match i {
            0 => Some(Side::Left),
            1 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "0" | "L" | "l" | "left" => Ok(Side::Left),
            "1" | "R" | "r" | "right" => Ok(Side::Right),
            other => Err(format!("bad side `{other}` (expected 0/1 or L/R)")),
        }
    }
}

/// Position of a qubit inside `C_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChimeraCoord {
    pub row: usize,
    pub col: usize,
    pub side: Side,
    pub unit: usize,
}

impl ChimeraCoord {
    pub fn new(row: usize, col: usize, side: Side, unit: usize) -> Self {
        Self {
            row,
            col,
            side,
            unit,
        }
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.row < k && self.col < k && self.unit < 4
    }

    pub fn index(&self, k: usize) -> usize {
        self.row * 8 * k + self.col * 8 + self.side.index() * 4 + self.unit
    }

    pub fn from_index(k: usize, index: usize) -> Option<Self> {
        if index >= 8 * k * k {
            return None;
        }
        let row = index / (8 * k);
        let rem = index % (8 * k);
        let col = rem / 8;
        let side = Side::from_index((rem % 8) / 4)?;
        Some(Self::new(row, col, side, rem % 4))
    }

    /// Colour in the global bipartition.
    pub fn color(&self) -> bool {
        (self.side.index() + self.row + self.col) % 2 == 1
    }

    /// Swap the roles of rows and columns. Maps left (vertical) nodes onto right
    /// (horizontal) nodes, so it is an automorphism of `C_k`.
    pub fn transpose(&self) -> Self {
        Self::new(self.col, self.row, self.side.flip(), self.unit)
    }
}

impl fmt::Display for ChimeraCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.row,
            self.col,
            self.side.index(),
            self.unit
        )
    }
}

/// All couplers of the fault-free `C_k` as sorted index pairs, in canonical order.
pub fn chimera_couplers(k: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(24 * k * k);
    for row in 0..k {
        for col in 0..k {
            for a in 0..4 {
                let left = ChimeraCoord::new(row, col, Side::Left, a).index(k);
                for b in 0..4 {
                    let right = ChimeraCoord::new(row, col, Side::Right, b).index(k);
                    edges.push((left, right));
                }
            }
            for unit in 0..4 {
                if row + 1 < k {
                    let a = ChimeraCoord::new(row, col, Side::Left, unit).index(k);
                    let b = ChimeraCoord::new(row + 1, col, Side::Left, unit).index(k);
                    edges.push((a, b));
                }
                if col + 1 < k {
                    let a = ChimeraCoord::new(row, col, Side::Right, unit).index(k);
                    let b = ChimeraCoord::new(row, col + 1, Side::Right, unit).index(k);
                    edges.push((a, b));
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Faulty qubits and couplers of a machine.
///
/// Text format, one entry per line, `#` starts a comment:
///
/// ```text
/// node r c s u
/// coupler r1 c1 s1 u1 r2 c2 s2 u2
/// ```
///
/// The side `s` is `0`/`L` (left, vertical couplers) or `1`/`R` (right,
/// horizontal couplers).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultList {
    pub nodes: BTreeSet<ChimeraCoord>,
    pub couplers: BTreeSet<(ChimeraCoord, ChimeraCoord)>,
}

impl FaultList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, c: ChimeraCoord) {
        self.nodes.insert(c);
    }

    pub fn add_coupler(&mut self, a: ChimeraCoord, b: ChimeraCoord) {
        let pair = if a <= b { (a, b) } else { (b, a) };
        self.couplers.insert(pair);
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.couplers.is_empty()
    }

    /// An example fault list for a 2048-qubit `C_16` machine: 17 broken qubits and
    /// 2 broken couplers, 5 of the qubits in the north-west `C_8` quarter.
    ///
    /// field node, graph sizes of 508/1951 on the `C_8` corner and 2032/7950 overall.
    /// field node, the published sizes 508/1951 (`C_8` corner) and 2032/7950.
    pub fn illustrative_c16() -> Self {
        const NODES: [(usize, usize, Side, usize); 17] = [
            (0, 5, Side::Right, 2),
            (0, 1, Side::Left, 0),
            (3, 6, Side::Left, 3),
            (5, 2, Side::Right, 1),
            (6, 7, Side::Right, 0),
            (0, 11, Side::Left, 1),
            (2, 15, Side::Right, 3),
            (15, 9, Side::Left, 2),
            (12, 15, Side::Right, 0),
            (9, 3, Side::Left, 3),
            (10, 0, Side::Right, 2),
            (11, 10, Side::Left, 0),
            (12, 6, Side::Right, 1),
            (13, 13, Side::Left, 2),
            (14, 4, Side::Left, 1),
            (15, 8, Side::Right, 3),
            (15, 15, Side::Left, 0),
        ];
        let mut list = FaultList::new();
        for (r, c, s, u) in NODES {
            list.add_node(ChimeraCoord::new(r, c, s, u));
        }
        list.add_coupler(
            ChimeraCoord::new(8, 8, Side::Left, 1),
            ChimeraCoord::new(8, 8, Side::Right, 2),
        );
        list.add_coupler(
            ChimeraCoord::new(10, 12, Side::Right, 3),
            ChimeraCoord::new(10, 13, Side::Right, 3),
        );
        list
    }

    /// Keep the faults that lie inside the north-west `C_k` corner.
    pub fn restrict_to(&self, k: usize) -> Self {
        FaultList {
            nodes: self
                .nodes
                .iter()
                .filter(|c| c.is_valid(k))
                .copied()
                .collect(),
            couplers: self
                .couplers
                .iter()
                .filter(|(a, b)| a.is_valid(k) && b.is_valid(k))
                .copied()
                .collect(),
        }
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut list = FaultList::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let coord = |t: &[&str]| -> std::result::Result<ChimeraCoord, String> {
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| format!("expected a non-negative integer, found `{s}`"))
                };
                Ok(ChimeraCoord::new(
                    num(t[0])?,
                    num(t[1])?,
                    t[2].parse()?,
                    num(t[3])?,
                ))
            };
            let err = |m: String| Error::parse(path, lineno + 1, m);
            match toks[0] {
                "node" if toks.len() == 5 => list.add_node(coord(&toks[1..5]).map_err(err)?),
                "coupler" if toks.len() == 9 => {
                    let a = coord(&toks[1..5]).map_err(err)?;
                    let b = coord(&toks[5..9]).map_err(err)?;
                    list.add_coupler(a, b);
                }
                "node" | "coupler" => {
                    return Err(err(format!("wrong number of fields for `{}`", toks[0])))
                }
                other => return Err(err(format!("unknown entry `{other}`"))),
            }
        }
        Ok(list)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let fmt = |c: &ChimeraCoord| format!("{} {} {} {}", c.row, c.col, c.side.index(), c.unit);
        for c in &self.nodes {
            out.push_str(&format!("node {}\n", fmt(c)));
        }
        for (a, b) in &self.couplers {
            out.push_str(&format!("coupler {} {}\n", fmt(a), fmt(b)));
        }
        out
    }
}

/// `C_k` with faulty elements removed and an optional field node.
#[derive(Clone, Debug)]
pub struct ChimeraGraph {
    k: usize,
    with_field: bool,
    working: Vec<bool>,
    faults: FaultList,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl ChimeraGraph {
    pub fn build(k: usize, faults: &FaultList, with_field: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange(
                "Chimera size k must be at least 1".into(),
            ));
        }
        let check = |c: &ChimeraCoord| {
            if c.is_valid(k) {
                Ok(())
            } else {
                Err(Error::InvalidCoordinate {
                    coord: c.to_string(),
                    k,
                })
            }
        };
        let qubits = 8 * k * k;
        let mut working = vec![true; qubits];
        for c in &faults.nodes {
            check(c)?;
            working[c.index(k)] = false;
        }
        let mut broken = BTreeSet::new();
        for (a, b) in &faults.couplers {
            check(a)?;
            check(b)?;
            let (x, y) = (a.index(k), b.index(k));
            broken.insert((x.min(y), x.max(y)));
        }
        let couplers = chimera_couplers(k);
        for pair in &broken {
            if couplers.binary_search(pair).is_err() {
                return Err(Error::NotAnEdge(format!(
                    "faulty coupler {}-{}",
                    ChimeraCoord::from_index(k, pair.0).unwrap(),
                    ChimeraCoord::from_index(k, pair.1).unwrap()
                )));
            }
        }

        let slots = qubits + usize::from(with_field);
        let mut adjacency = vec![Vec::new(); slots];
        let mut edges = Vec::new();
        for &(a, b) in &couplers {
            if working[a] && working[b] && !broken.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
        if with_field {
            edges.extend((0..qubits).filter(|&q| working[q]).map(|q| (q, qubits)));
        }
        edges.sort_unstable();
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        if with_field {
            working.push(true);
        }
        Ok(Self {
            k,
            with_field,
            working,
            faults: faults.clone(),
            adjacency,
            edges,
        })
    }

    pub fn fault_free(k: usize) -> Result<Self> {
        Self::build(k, &FaultList::new(), false)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn faults(&self) -> &FaultList {
        &self.faults
    }

    pub fn qubit_slots(&self) -> usize {
        8 * self.k * self.k
    }

    /// Number of node indices, including faulty qubits and the field node.
    pub fn node_slots(&self) -> usize {
        self.working.len()
    }

    /// Number of working nodes (field node included when present).
    pub fn node_count(&self) -> usize {
        self.working.iter().filter(|&&w| w).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted edge list, field edges included.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Working Chimera couplers (field edges excluded).
    pub fn couplers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let q = self.qubit_slots();
        self.edges.iter().copied().filter(move |&(_, b)| b < q)
    }

    pub fn field_node(&self) -> Option<usize> {
        self.with_field.then(|| self.qubit_slots())
    }

    pub fn is_working(&self, v: usize) -> bool {
        self.working.get(v).copied().unwrap_or(false)
    }

    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        if v >= self.node_slots() {
            return Err(Error::NodeOutOfRange {
                node: v,
                len: self.node_slots(),
            });
        }
        if !self.working[v] {
            return Err(Error::FaultyNode(v));
        }
        Ok(&self.adjacency[v])
    }

    pub fn coord(&self, v: usize) -> Option<ChimeraCoord> {
        ChimeraCoord::from_index(self.k, v)
    }

    pub fn index(&self, c: ChimeraCoord) -> Result<usize> {
        if !c.is_valid(self.k) {
            return Err(Error::InvalidCoordinate {
                coord: c.to_string(),
                k: self.k,
            });
        }
        Ok(c.index(self.k))
    }

    /// Working qubit mask over `0..8k^2` (the field node is not included).
    pub fn qubit_mask(&self) -> Vec<bool> {
        self.working[..self.qubit_slots()].to_vec()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (x, y) = (a.min(b), a.max(b));
        self.edges.binary_search(&(x, y)).is_ok()
    }
}

/// The hardware granularity `Γ = {-1, -1 + 1/γ, ..., 1 - 1/γ, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Granularity {
    gamma: i64,
}

impl Granularity {
    pub const STUDY: Granularity = Granularity { gamma: 10 };

    pub fn new(gamma: i64) -> Result<Self> {
        if gamma < 1 {
            return Err(Error::OutOfRange(format!(
                "granularity must be a positive integer, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    /// Members of `Γ` as numerators over `γ`, ascending.
    pub fn numerators(&self) -> impl Iterator<Item = i64> {
        -self.gamma..=self.gamma
    }

    pub fn len(&self) -> usize {
        2 * self.gamma as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_numerator(&self, num: i64) -> bool {
        num.abs() <= self.gamma
    }

    /// Nearest member of `Γ` as a numerator. Values outside `[-1, 1]` clamp to
    /// the ends; exact midpoints round away from zero.
    pub fn snap_numerator(&self, x: f64) -> i64 {
        let g = self.gamma as f64;
        (x * g).round().clamp(-g, g) as i64
    }

    pub fn snap(&self, x: f64) -> f64 {
        self.snap_numerator(x) as f64 / self.gamma as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_bijection() {
        for k in 1..5 {
            for i in 0..8 * k * k {
                let c = ChimeraCoord::from_index(k, i).unwrap();
                assert!(c.is_valid(k));
                assert_eq!(c.index(k), i);
            }
            assert!(ChimeraCoord::from_index(k, 8 * k * k).is_none());
        }
    }

    #[test]
    fn counts_match_closed_forms() {
        for k in 1..=8 {
            let g = ChimeraGraph::fault_free(k).unwrap();
            assert_eq!(g.node_count(), 8 * k * k);
            assert_eq!(g.edge_count(), 24 * k * k - 8 * k);
            let f = ChimeraGraph::build(k, &FaultList::new(), true).unwrap();
            assert_eq!(f.node_count(), 8 * k * k + 1);
            assert_eq!(f.edge_count(), 32 * k * k - 8 * k);
        }
        let g = ChimeraGraph::fault_free(4).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (128, 352));
        let g = ChimeraGraph::build(16, &FaultList::new(), true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2049, 8064));
        let g = ChimeraGraph::fault_free(1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (8, 16));
    }

    #[test]
    fn neighbor_examples() {
        let g = ChimeraGraph::fault_free(1).unwrap();
        let v = ChimeraCoord::new(0, 0, Side::Left, 2).index(1);
        assert_eq!(g.neighbors(v).unwrap(), &[4, 5, 6, 7]);

        // Interior left node of C_3: four right nodes of its cell plus the cells above and below.
        let g = ChimeraGraph::fault_free(3).unwrap();
        let v = ChimeraCoord::new(1, 1, Side::Left, 0).index(3);
        let n = g.neighbors(v).unwrap();
        assert_eq!(n.len(), 6);
        assert!(n.contains(&ChimeraCoord::new(0, 1, Side::Left, 0).index(3)));
        assert!(n.contains(&ChimeraCoord::new(2, 1, Side::Left, 0).index(3)));
        assert!(n.windows(2).all(|w| w[0] < w[1]));

        let g = ChimeraGraph::build(2, &FaultList::new(), true).unwrap();
        let field = g.field_node().unwrap();
        assert_eq!(field, 32);
        assert_eq!(
            g.neighbors(field).unwrap(),
            (0..32).collect::<Vec<_>>().as_slice()
        );
    }

    #[test]
    fn faulty_nodes_drop_their_degree() {
        let k = 3;
        let full = ChimeraGraph::fault_free(k).unwrap();
        let mut faults = FaultList::new();
        let a = ChimeraCoord::new(1, 1, Side::Left, 0);
        let b = ChimeraCoord::new(0, 2, Side::Right, 3);
        faults.add_node(a);
        faults.add_node(b);
        faults.add_node(a); // duplicates are idempotent
        let g = ChimeraGraph::build(k, &faults, false).unwrap();
        let lost =
            full.neighbors(a.index(k)).unwrap().len() + full.neighbors(b.index(k)).unwrap().len();
        assert_eq!(g.edge_count(), full.edge_count() - lost);
        assert!(matches!(g.neighbors(a.index(k)), Err(Error::FaultyNode(_))));
        assert!(matches!(
            g.neighbors(999),
            Err(Error::NodeOutOfRange { .. })
        ));
        for &(x, y) in g.edges() {
            assert!(g.is_working(x) && g.is_working(y));
        }
    }

    #[test]
    fn faulty_coupler_removed_and_invalid_rejected() {
        let mut faults = FaultList::new();
        faults.add_coupler(
            ChimeraCoord::new(0, 0, Side::Right, 1),
            ChimeraCoord::new(0, 1, Side::Right, 1),
        );
        let g = ChimeraGraph::build(2, &faults, false).unwrap();
        assert_eq!(g.edge_count(), 24 * 4 - 16 - 1);

        let mut bad = FaultList::new();
        bad.add_node(ChimeraCoord::new(2, 0, Side::Left, 0));
        assert!(matches!(
            ChimeraGraph::build(2, &bad, false),
            Err(Error::InvalidCoordinate { .. })
        ));
        let mut not_edge = FaultList::new();
        not_edge.add_coupler(
            ChimeraCoord::new(0, 0, Side::Left, 1),
            ChimeraCoord::new(0, 1, Side::Left, 1),
        );
        assert!(ChimeraGraph::build(2, &not_edge, false).is_err());
    }

    #[test]
    fn two_coloring_is_proper() {
        for k in 1..6 {
            let g = ChimeraGraph::fault_free(k).unwrap();
            for &(a, b) in g.edges() {
                let ca = ChimeraCoord::from_index(k, a).unwrap().color();
                let cb = ChimeraCoord::from_index(k, b).unwrap().color();
                assert_ne!(ca, cb);
            }
        }
    }

    #[test]
    fn transpose_is_automorphism() {
        let k = 4;
        let g = ChimeraGraph::fault_free(k).unwrap();
        for &(a, b) in g.edges() {
            let ta = ChimeraCoord::from_index(k, a).unwrap().transpose().index(k);
            let tb = ChimeraCoord::from_index(k, b).unwrap().transpose().index(k);
            assert!(g.has_edge(ta, tb));
        }
    }

    #[test]
    fn illustrative_faults() {
        let f = FaultList::illustrative_c16();
        assert_eq!(f.nodes.len(), 17);
        assert_eq!(f.couplers.len(), 2);
        assert_eq!(f.restrict_to(8).nodes.len(), 5);
        let g = ChimeraGraph::build(16, &f, false).unwrap();
        assert_eq!(g.node_count(), 2031);
        let g = ChimeraGraph::build(16, &f, true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2032, 7950));
        let g = ChimeraGraph::build(8, &f.restrict_to(8), true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (508, 1951));
    }

    #[test]
    fn fault_file_roundtrip_and_errors() {
        let text = "# broken parts\nnode 0 1 L 2\ncoupler 0 0 R 1 0 1 1 1 # trailing\n\n";
        let f = FaultList::parse(text, Path::new("f.txt")).unwrap();
        assert_eq!(f.nodes.len(), 1);
        assert_eq!(f.couplers.len(), 1);
        assert_eq!(FaultList::parse(&f.to_text(), Path::new("g")).unwrap(), f);
        let err = FaultList::parse("node 1 2 3\n", Path::new("f.txt")).unwrap_err();
        assert!(err.to_string().contains("f.txt:1"));
        let err = FaultList::parse("\nnode 1 2 X 0\n", Path::new("f.txt")).unwrap_err();
        assert!(err.to_string().contains("f.txt:2"));
    }

    #[test]
    fn snapping() {
        let g = Granularity::STUDY;
        assert_eq!(g.len(), 21);
        assert_eq!(g.snap(0.234), 0.2);
        assert_eq!(g.snap(-1.07), -1.0);
        assert_eq!(g.snap(0.25), 0.3);
        assert_eq!(g.snap(-0.25), -0.3);
        assert_eq!(g.snap(3.0), 1.0);
        assert!(Granularity::new(0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn snap_is_idempotent(x in -3.0f64..3.0, gamma in 1i64..40) {
            let g = Granularity::new(gamma).unwrap();
            let num = g.snap_numerator(x);
            proptest::prop_assert!(g.contains_numerator(num));
            let once = g.snap(x);
            proptest::prop_assert_eq!(g.snap(once), once);
            // nearest: no member is strictly closer
            for m in g.numerators() {
                let d = (m as f64 / gamma as f64 - x.clamp(-1.0, 1.0)).abs();
                proptest::prop_assert!(d + 1e-12 >= (once - x.clamp(-1.0, 1.0)).abs());
            }
        }
    }
}
