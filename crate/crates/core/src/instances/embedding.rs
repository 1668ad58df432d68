//! Clique embeddings into `C_k` and the embedded instances built from them.
//!
//! The standard embedding places `K_{4k}` on `C_k`. Logical node `4g + u` owns
//! the right-side qubits with unit `u` in row `g`, columns `0..=g`, and the
//! left-side qubits with unit `u` in column `g`, rows `g..k`. The two halves
//! meet inside cell `(g, g)`, so every chain is a path of `k + 1` qubits. For
//! `g < h` the chains of `4g + u` and `4h + v` meet in cell `(h, g)`; for
//! `g = h` they meet in cell `(g, g)`.
//!
//! Embedding file format: a header line `embedding <k> <n>` followed by one
//! line per logical node listing its chain's physical qubit indices. Blank
//! lines and `#` comments are ignored.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chimera::{ChimeraCoord, ChimeraGraph, Side};
use crate::error::{Error, Result};
use crate::format;
use crate::ising::{IsingBuilder, IsingInstance, SpinConfig};

/// Chain coupling numerator: `-1.0` at `γ = 10`.
pub const CHAIN_WEIGHT: i64 = -10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueEmbedding {
    k: usize,
    chains: Vec<Vec<usize>>,
    chain_weight: i64,
}

/// How strictly an embedded instance is screened before it is emitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainCheck {
    /// Coefficients in range and every chain provably intact in every ground state.
    #[default]
    Integrity,
    /// Coefficients in range only.
    Range,
}

/// An embedding checked against a working graph: spanning-tree chain edges and
/// one designated coupler per logical pair.
#[derive(Clone, Debug)]
pub struct EmbeddingLayout {
    pub trees: Vec<Vec<(usize, usize)>>,
    pub couplers: BTreeMap<(usize, usize), (usize, usize)>,
}

impl CliqueEmbedding {
    /// The half-row/half-column construction of `K_{4k}` on `C_k`.
    pub fn standard(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange(
                "Chimera size k must be at least 1".into(),
            ));
        }
        let mut chains = Vec::with_capacity(4 * k);
        for g in 0..k {
            for u in 0..4 {
                let mut chain: Vec<usize> = (0..=g)
                    .map(|c| ChimeraCoord::new(g, c, Side::Right, u).index(k))
                    .collect();
                chain.extend((g..k).map(|r| ChimeraCoord::new(r, g, Side::Left, u).index(k)));
                chains.push(chain);
            }
        }
        Ok(Self {
            k,
            chains,
            chain_weight: CHAIN_WEIGHT,
        })
    }

    /// `K_64` on `C_16`.
    pub fn k64() -> Self {
        Self::standard(16).expect("k = 16 is valid")
    }

    pub fn from_chains(k: usize, chains: Vec<Vec<usize>>, chain_weight: i64) -> Result<Self> {
        let slots = 8 * k * k;
        let mut owner = vec![None; slots];
        for (a, chain) in chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(Error::BrokenEmbedding(format!("chain {a} is empty")));
            }
            for &q in chain {
                if q >= slots {
                    return Err(Error::NodeOutOfRange {
                        node: q,
                        len: slots,
                    });
                }
                if let Some(b) = owner[q].replace(a) {
                    return Err(Error::BrokenEmbedding(format!(
                        "qubit {q} is in chains {b} and {a}"
                    )));
                }
            }
        }
        if chain_weight >= 0 {
            return Err(Error::OutOfRange(format!(
                "chain weight {chain_weight} must be negative"
            )));
        }
        Ok(Self {
            k,
            chains,
            chain_weight,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn logical_count(&self) -> usize {
        self.chains.len()
    }

    pub fn chain_weight(&self) -> i64 {
        self.chain_weight
    }

    fn owners(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; 8 * self.k * self.k];
        for (a, chain) in self.chains.iter().enumerate() {
            for &q in chain {
                owner[q] = Some(a);
            }
        }
        owner
    }

    /// Check connectivity and full pairwise coverage on `graph`.
    ///
    /// Chains that contain a faulty qubit, or that fall apart because of a
    /// faulty coupler, are all listed in the error.
    pub fn layout(&self, graph: &ChimeraGraph) -> Result<EmbeddingLayout> {
        if graph.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: graph.k(),
            });
        }
        let owner = self.owners();
        let mut broken = Vec::new();
        let mut trees = Vec::with_capacity(self.chains.len());
        for (a, chain) in self.chains.iter().enumerate() {
            if chain.iter().any(|&q| !graph.is_working(q)) {
                broken.push(a);
                trees.push(Vec::new());
                continue;
            }
            // breadth-first spanning tree from the lowest-index qubit
            let root = *chain.iter().min().expect("chains are non-empty");
            let mut seen = vec![root];
            let mut edges = Vec::new();
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &y in graph.neighbors(x)? {
                    if owner.get(y).copied().flatten() == Some(a) && !seen.contains(&y) {
                        seen.push(y);
                        edges.push((x.min(y), x.max(y)));
                        queue.push_back(y);
                    }
                }
            }
            if seen.len() != chain.len() {
                broken.push(a);
            }
            trees.push(edges);
        }
        if !broken.is_empty() {
            let list: Vec<String> = broken.iter().map(usize::to_string).collect();
            return Err(Error::BrokenEmbedding(format!(
                "broken chains: {}",
                list.join(" ")
            )));
        }
        let mut couplers = BTreeMap::new();
        for (x, y) in graph.couplers() {
            if let (Some(a), Some(b)) = (owner[x], owner[y]) {
                if a != b {
                    couplers.entry((a.min(b), a.max(b))).or_insert((x, y));
                }
            }
        }
        let n = self.chains.len();
        let missing = n * n.saturating_sub(1) / 2 - couplers.len();
        if missing > 0 {
            let (a, b) = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .find(|p| !couplers.contains_key(p))
                .expect("a pair is missing");
            return Err(Error::BrokenEmbedding(format!(
                "{missing} logical pairs have no coupler, first ({a}, {b})"
            )));
        }
        Ok(EmbeddingLayout { trees, couplers })
    }

    /// Majority vote per chain; a tie takes the spin of the chain's lowest-index qubit.
    pub fn decode(&self, physical: &[i8]) -> Result<SpinConfig> {
        let slots = 8 * self.k * self.k;
        if physical.len() != slots {
            return Err(Error::DimensionMismatch {
                expected: slots,
                got: physical.len(),
            });
        }
        let spins = self
            .chains
            .iter()
            .map(|chain| {
                let sum: i64 = chain.iter().map(|&q| i64::from(physical[q])).sum();
                match sum.signum() {
                    0 => physical[*chain.iter().min().expect("non-empty")],
                    s => s as i8,
                }
            })
            .collect();
        SpinConfig::new(spins)
    }

    /// The chain-consistent physical configuration; unused qubits are `+1`.
    pub fn encode(&self, logical: &[i8]) -> Result<SpinConfig> {
        if logical.len() != self.chains.len() {
            return Err(Error::DimensionMismatch {
                expected: self.chains.len(),
                got: logical.len(),
            });
        }
        let mut s = vec![1i8; 8 * self.k * self.k];
        for (chain, &spin) in self.chains.iter().zip(logical) {
            for &q in chain {
                s[q] = spin;
            }
        }
        SpinConfig::new(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("embedding {} {}\n", self.k, self.chains.len());
        for chain in &self.chains {
            let line: Vec<String> = chain.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the embedding file format. The chain weight is always [`CHAIN_WEIGHT`].
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (k, n) = match fields.as_slice() {
            ["embedding", k, n] => match (k.parse::<usize>(), n.parse::<usize>()) {
                (Ok(k), Ok(n)) => (k, n),
                _ => return Err(Error::parse(path, hl, "expected `embedding <k> <n>`")),
            },
            _ => return Err(Error::parse(path, hl, "expected `embedding <k> <n>`")),
        };
        let mut chains = Vec::with_capacity(n);
        let mut last = hl;
        for (ln, line) in lines {
            last = ln;
            if chains.len() == n {
                return Err(Error::parse(path, ln, format!("more than {n} chains")));
            }
            let chain = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(path, ln, format!("bad qubit index `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            chains.push(chain);
        }
        if chains.len() != n {
            return Err(Error::parse(
                path,
                last,
                format!("expected {n} chains, found {}", chains.len()),
            ));
        }
        Self::from_chains(k, chains, CHAIN_WEIGHT).map_err(|e| match e {
            e @ Error::Parse { .. } => e,
            e => Error::parse(path, 0, e.to_string()),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&format::read_to_string(path)?, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        format::write_string(path, &self.to_text())
    }
}

/// A logical instance mapped through a clique embedding.
#[derive(Clone, Debug)]
pub struct EmbeddedInstance {
    pub logical: IsingInstance,
    pub physical: IsingInstance,
    pub embedding: CliqueEmbedding,
    /// `physical.energy(encode(s)) = logical.energy(s) + offset` for every `s`.
    pub offset: i64,
}

impl EmbeddedInstance {
    /// Decode physical spins and evaluate the logical energy.
    pub fn logical_energy(&self, physical: &[i8]) -> Result<(i64, SpinConfig)> {
        let s = self.embedding.decode(physical)?;
        Ok((self.logical.energy(&s)?, s))
    }
}

#[derive(Clone, Debug)]
pub enum EmbedOutcome {
    Embedded(Box<EmbeddedInstance>),
    Rejected { reason: String },
}

impl EmbedOutcome {
    pub fn embedded(self) -> Option<EmbeddedInstance> {
        match self {
            EmbedOutcome::Embedded(e) => Some(*e),
            EmbedOutcome::Rejected { .. } => None,
        }
    }
}

/// Split `h` over `len` qubits as evenly as possible, larger shares first.
fn spread(h: i64, len: usize) -> impl Iterator<Item = i64> {
    let len = len as i64;
    let (q, r) = (h.abs() / len, h.abs() % len);
    (0..len).map(move |i| h.signum() * (q + i64::from(i < r)))
}

/// Map `logical` through `embedding` on `graph`.
///
/// Every logical coupling goes on one designated coupler, every field is split
/// evenly along its chain in chain order, and every spanning-tree edge of a
/// chain gets the chain weight.
///
/// The instance is rejected when a coefficient leaves `[-scale, scale]`, or,
/// under [`ChainCheck::Integrity`], when some chain edge could break in a
/// ground state. Cutting a tree edge splits the chain in two sides; if the
/// total `|weight|` attached to the lighter side is below `|chain weight|`,
/// flipping that side repairs the edge and strictly lowers the energy, so no
/// ground state breaks it.
pub fn embed(
    logical: &IsingInstance,
    embedding: &CliqueEmbedding,
    graph: &ChimeraGraph,
    check: ChainCheck,
) -> Result<EmbedOutcome> {
    let n = embedding.logical_count();
    if logical.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: logical.len(),
        });
    }
    let layout = embedding.layout(graph)?;
    let scale = logical.scale();
    let mut b = IsingBuilder::chimera(graph, scale);
    let owner = embedding.owners();
    for (q, o) in owner.iter().enumerate() {
        if o.is_none() && graph.is_working(q) {
            b.deactivate(q)?;
        }
    }

    let mut attached = vec![0i64; graph.qubit_slots()];
    let mut offset = 0i64;
    for tree in &layout.trees {
        for &(x, y) in tree {
            b.coupling(x, y, embedding.chain_weight)?;
            offset += embedding.chain_weight;
        }
    }
    let mut worst = embedding.chain_weight.abs();
    for c in logical.couplings() {
        let (x, y) = layout.couplers[&(c.a, c.b)];
        b.coupling(x, y, c.weight)?;
        attached[x] += c.weight.abs();
        attached[y] += c.weight.abs();
        worst = worst.max(c.weight.abs());
    }
    for (a, chain) in embedding.chains.iter().enumerate() {
        for (&q, h) in chain.iter().zip(spread(logical.field(a), chain.len())) {
            if h != 0 {
                b.field(q, h)?;
            }
            attached[q] += h.abs();
            worst = worst.max(h.abs());
        }
    }
    if worst > scale {
        return Ok(EmbedOutcome::Rejected {
            reason: format!("coefficient {worst} is outside [-{scale}, {scale}]"),
        });
    }
    if check == ChainCheck::Integrity {
        let strength = embedding.chain_weight.abs();
        for (a, tree) in layout.trees.iter().enumerate() {
            if let Some((need, (x, y))) = weakest_edge(tree, &attached) {
                if need >= strength {
                    return Ok(EmbedOutcome::Rejected {
                        reason: format!(
                            "chain {a} edge {x}-{y} carries {need} on its lighter side, chain strength is {strength}"
                        ),
                    });
                }
            }
        }
    }
    Ok(EmbedOutcome::Embedded(Box::new(EmbeddedInstance {
        logical: logical.clone(),
        physical: b.build()?,
        embedding: embedding.clone(),
        offset,
    })))
}

/// The tree edge with the heaviest lighter side, and that side's weight.
fn weakest_edge(tree: &[(usize, usize)], attached: &[i64]) -> Option<(i64, (usize, usize))> {
    if tree.is_empty() {
        return None;
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in tree {
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    let root = *adj.keys().next().expect("non-empty");
    // order vertices so every child comes after its parent
    let mut order = vec![root];
    let mut parent = BTreeMap::from([(root, usize::MAX)]);
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &y in &adj[&x] {
            if y != parent[&x] {
                parent.insert(y, x);
                order.push(y);
            }
        }
        i += 1;
    }
    let total: i64 = order.iter().map(|&q| attached[q]).sum();
    let mut sub: BTreeMap<usize, i64> = order.iter().map(|&q| (q, attached[q])).collect();
    let mut best: Option<(i64, (usize, usize))> = None;
    for &x in order.iter().skip(1).rev() {
        let p = parent[&x];
        let below = sub[&x];
        *sub.get_mut(&p).expect("parent seen") += below;
        let need = below.min(total - below);
        if best.is_none_or(|(b, _)| need > b) {
            best = Some((need, (x.min(p), x.max(p))));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_min;
    use crate::rng::PortableRng;

    #[test]
    fn k64_is_valid() {
        let e = CliqueEmbedding::k64();
        assert_eq!(e.logical_count(), 64);
        let layout = e.layout(&ChimeraGraph::fault_free(16).unwrap()).unwrap();
        assert_eq!(layout.couplers.len(), 2016);
        assert!(e.chains().iter().all(|c| c.len() == 17));
        // a spanning tree of a path of 17 qubits
        assert!(layout.trees.iter().all(|t| t.len() == 16));
    }

    #[test]
    fn faults_on_chains_are_listed() {
        let e = CliqueEmbedding::standard(4).unwrap();
        let mut faults = crate::chimera::FaultList::new();
        // R(2, 1, 3) is in the chain of logical 4*2 + 3
        faults.add_node(ChimeraCoord::new(2, 1, Side::Right, 3));
        // a faulty coupler inside the chain of logical 1
        faults.add_coupler(
            ChimeraCoord::new(0, 0, Side::Left, 1),
            ChimeraCoord::new(1, 0, Side::Left, 1),
        );
        let g = ChimeraGraph::build(4, &faults, false).unwrap();
        match e.layout(&g) {
            Err(Error::BrokenEmbedding(msg)) => assert_eq!(msg, "broken chains: 1 11"),
            other => panic!("{other:?}"),
        }
        // a fault outside every chain is harmless
        let mut faults = crate::chimera::FaultList::new();
        faults.add_node(ChimeraCoord::new(0, 3, Side::Right, 0));
        assert!(e
            .layout(&ChimeraGraph::build(4, &faults, false).unwrap())
            .is_ok());
    }

    #[test]
    fn file_round_trip() {
        let e = CliqueEmbedding::standard(3).unwrap();
        let text = e.to_text();
        assert_eq!(text.lines().count(), 13);
        assert_eq!(CliqueEmbedding::parse(&text, Path::new("e")).unwrap(), e);
        let bad = "embedding 1 2\n0 1\n1 2\n";
        assert!(CliqueEmbedding::parse(bad, Path::new("e")).is_err());
        let short = "embedding 1 2\n0 1\n";
        match CliqueEmbedding::parse(short, Path::new("e")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spread_is_even() {
        assert_eq!(spread(-7, 3).collect::<Vec<_>>(), vec![-3, -2, -2]);
        assert_eq!(spread(2, 4).collect::<Vec<_>>(), vec![1, 1, 0, 0]);
        assert_eq!(spread(0, 2).collect::<Vec<_>>(), vec![0, 0]);
    }

    #[test]
    fn weakest_edge_on_a_path() {
        // path 0-1-2-3 with attached weights 5, 2, 1, 6: cutting 1-2 leaves 7 and 7
        let tree = [(0, 1), (1, 2), (2, 3)];
        assert_eq!(weakest_edge(&tree, &[5, 2, 1, 6]), Some((7, (1, 2))));
    }

    fn random_logical(n: usize, rng: &mut PortableRng) -> IsingInstance {
        let mut b = IsingBuilder::general(n, 10);
        for a in 0..n {
            for c in a + 1..n {
                if rng.bernoulli(0.3) {
                    b.coupling(a, c, if rng.coin() { 1 } else { -1 }).unwrap();
                }
            }
            b.field(a, rng.range_inclusive(-2, 2)).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn consistent_assignments_shift_by_offset() {
        let e = CliqueEmbedding::standard(2).unwrap();
        let g = ChimeraGraph::fault_free(2).unwrap();
        let mut rng = PortableRng::new(5);
        for _ in 0..20 {
            let logical = random_logical(8, &mut rng);
            let emb = embed(&logical, &e, &g, ChainCheck::Range)
                .unwrap()
                .embedded()
                .unwrap();
            assert_eq!(emb.offset, -10 * 8 * 2);
            for _ in 0..20 {
                let s: Vec<i8> = (0..8).map(|_| if rng.coin() { 1 } else { -1 }).collect();
                let phys = e.encode(&s).unwrap();
                assert_eq!(
                    emb.physical.energy(&phys).unwrap(),
                    logical.energy(&s).unwrap() + emb.offset
                );
                assert_eq!(&*e.decode(&phys).unwrap(), &s[..]);
            }
        }
    }

    #[test]
    fn accepted_instances_decode_to_the_optimum() {
        let e = CliqueEmbedding::standard(1).unwrap();
        let g = ChimeraGraph::fault_free(1).unwrap();
        let mut rng = PortableRng::new(11);
        for _ in 0..30 {
            let logical = random_logical(4, &mut rng);
            let emb = embed(&logical, &e, &g, ChainCheck::Integrity)
                .unwrap()
                .embedded()
                .unwrap();
            let (pe, ps) = brute_force_min(&emb.physical, 24).unwrap();
            let (le, _) = brute_force_min(&logical, 24).unwrap();
            assert_eq!(pe, le + emb.offset);
            assert_eq!(emb.logical_energy(&ps).unwrap().0, le);
        }
    }

    #[test]
    fn heavy_chains_rejected() {
        let e = CliqueEmbedding::standard(1).unwrap();
        let g = ChimeraGraph::fault_free(1).unwrap();
        let mut b = IsingBuilder::general(4, 10);
        b.field(0, 19).unwrap();
        b.coupling(0, 1, 1).unwrap();
        let logical = b.build().unwrap();
        // spread 10 + 9 fits the range; the lighter side of the chain edge carries 9 + 1
        assert!(matches!(
            embed(&logical, &e, &g, ChainCheck::Integrity).unwrap(),
            EmbedOutcome::Rejected { .. }
        ));
        assert!(embed(&logical, &e, &g, ChainCheck::Range)
            .unwrap()
            .embedded()
            .is_some());
        let mut b = IsingBuilder::general(4, 10);
        b.field(0, 21).unwrap();
        let over = b.build().unwrap();
        assert!(matches!(
            embed(&over, &e, &g, ChainCheck::Range).unwrap(),
            EmbedOutcome::Rejected { .. }
        ));
    }
}
