//! Vertex orders for the boundary dynamic program.
//!
//! A sweep introduces the nodes of a subset one at a time. A node stays on the
//! boundary from its introduction until its last neighbour has been introduced,
//! at which point it is forgotten. The DP carries one table entry per boundary
//! assignment, so the cost of a sweep is governed by the boundary size.
//!
//! Several Chimera-aware orders are tried and the cheapest is kept per
//! connected component: cell-by-cell column-major and row-major sweeps of the
//! whole grid, and for subsets with removed h-nodes (or v-nodes) a block order
//! that treats every cut column (row) as its own segment and sweeps the blocks
//! between cuts row by row.

use std::collections::VecDeque;

use crate::chimera::{ChimeraCoord, Side};
use crate::ising::IsingInstance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepStep {
    pub node: usize,
    /// Neighbours introduced earlier; each edge is covered by exactly one step.
    pub earlier: Vec<usize>,
    /// Nodes leaving the boundary at this step (may include `node` itself).
    pub forget: Vec<usize>,
    /// Boundary after the step, in table bit order. The new node takes the
    /// slot of a forgotten node when there is one, and remaining gaps are
    /// filled from the top, so most steps leave the other slots in place.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepDecomposition {
    pub steps: Vec<SweepStep>,
    /// Largest boundary.
    pub width: usize,
    /// `Σ 2^(|boundary before| + 1)`: table entries touched by the DP.
    pub cost: f64,
}

impl SweepDecomposition {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks the structural invariants against the instance and subset.
    pub fn check(&self, inst: &IsingInstance, subset: &[bool]) -> Result<(), String> {
        let mut pos = vec![usize::MAX; inst.len()];
        for (t, st) in self.steps.iter().enumerate() {
            if !subset[st.node] || pos[st.node] != usize::MAX {
                return Err(format!(
                    "node {} is outside the subset or repeated",
                    st.node
                ));
            }
            pos[st.node] = t;
        }
        let members = (0..inst.len())
            .filter(|&i| subset[i] && inst.is_active(i))
            .count();
        if members != self.steps.len() {
            return Err("sweep does not cover the subset".into());
        }
        let mut covered = 0usize;
        for st in &self.steps {
            covered += st.earlier.len();
            for &u in &st.earlier {
                if pos[u] >= pos[st.node] {
                    return Err(format!("edge {}-{} covered out of order", u, st.node));
                }
            }
        }
        let edges = inst
            .couplings()
            .iter()
            .filter(|c| subset[c.a] && subset[c.b])
            .count();
        if covered != edges {
            return Err(format!("{covered} edge introductions for {edges} edges"));
        }
        if self.steps.last().is_some_and(|s| !s.boundary.is_empty()) {
            return Err("boundary not empty at the end".into());
        }
        Ok(())
    }
}

/// Extra knowledge about the subset that enables cheaper orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepHint {
    Auto,
    /// Subset with h-nodes (orientation 0) or v-nodes (orientation 1) removed in
    /// every `(w+1)`-th column (row) starting at `i`, except in row (column) `j`.
    Selby {
        orientation: u8,
        w: usize,
        i: usize,
        j: usize,
    },
}

/// Neighbours of `v` inside the subset.
fn sub_neighbors<'a>(
    inst: &'a IsingInstance,
    subset: &'a [bool],
    v: usize,
) -> impl Iterator<Item = usize> + 'a {
    inst.neighbors(v)
        .iter()
        .map(|&(u, _)| u)
        .filter(move |&u| subset[u])
}

fn components(inst: &IsingInstance, subset: &[bool]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; inst.len()];
    let mut out = Vec::new();
    for start in 0..inst.len() {
        if !subset[start] || !inst.is_active(start) || comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[start] = id;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in sub_neighbors(inst, subset, u) {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Steps for a given order of one component.
fn decompose(
    inst: &IsingInstance,
    subset: &[bool],
    order: &[usize],
    pos: &mut [usize],
) -> (Vec<SweepStep>, usize, f64) {
    for (t, &v) in order.iter().enumerate() {
        pos[v] = t;
    }
    let last: Vec<usize> = order
        .iter()
        .map(|&v| {
            sub_neighbors(inst, subset, v)
                .map(|u| pos[u])
                .fold(pos[v], usize::max)
        })
        .collect();
    let mut boundary: Vec<usize> = Vec::new();
    let mut steps = Vec::with_capacity(order.len());
    let mut width = 0;
    let mut cost = 0.0;
    for (t, &v) in order.iter().enumerate() {
        cost += (2.0f64).powi(boundary.len() as i32 + 1);
        let mut earlier: Vec<usize> = sub_neighbors(inst, subset, v)
            .filter(|&u| pos[u] < t)
            .collect();
        earlier.sort_unstable();
        let mut forget = Vec::new();
        let mut holes = Vec::new();
        for (q, &u) in boundary.iter().enumerate() {
            if last[pos[u]] == t {
                forget.push(u);
                holes.push(q);
            }
        }
        if last[t] == t {
            forget.push(v);
        } else if let Some(&q) = holes.first() {
            boundary[q] = v;
            holes.remove(0);
        } else {
            boundary.push(v);
        }
        // holes are ascending, so the top slot is never a pending hole
        while let Some(q) = holes.pop() {
            boundary.swap_remove(q);
        }
        width = width.max(boundary.len());
        steps.push(SweepStep {
            node: v,
            earlier,
            forget,
            boundary: boundary.clone(),
        });
    }
    for &v in order {
        pos[v] = usize::MAX;
    }
    (steps, width, cost)
}

/// Candidate full orders over all node slots; callers filter to the component.
fn candidate_orders(inst: &IsingInstance, hint: &SweepHint) -> Vec<Vec<usize>> {
    let Some(k) = inst.chimera_k() else {
        return general_orders(inst);
    };
    let cell = |r: usize, c: usize, first: Side| -> [usize; 8] {
        let mut out = [0; 8];
        for (n, side) in [first, first.flip()].into_iter().enumerate() {
            for u in 0..4 {
                out[n * 4 + u] = ChimeraCoord::new(r, c, side, u).index(k);
            }
        }
        out
    };
    let mut orders = Vec::new();
    for first in [Side::Left, Side::Right] {
        let col_major: Vec<usize> = (0..k)
            .flat_map(|c| (0..k).flat_map(move |r| cell(r, c, first)))
            .collect();
        let row_major: Vec<usize> = (0..k)
            .flat_map(|r| (0..k).flat_map(move |c| cell(r, c, first)))
            .collect();
        orders.push(col_major);
        orders.push(row_major);
    }
    if let SweepHint::Selby {
        orientation, w, i, ..
    } = *hint
    {
        for order in block_orders(k, w, i) {
            if orientation == 0 {
                orders.push(order);
            } else {
                let t = order
                    .into_iter()
                    .map(|v| ChimeraCoord::from_index(k, v).unwrap().transpose().index(k))
                    .collect();
                orders.push(t);
            }
        }
    }
    orders
}

/// Orders for a subset whose cut columns are `c < k-1` with `c ≡ i (mod w+1)`.
fn block_orders(k: usize, w: usize, i: usize) -> Vec<Vec<usize>> {
    let is_cut = |c: usize| c + 1 < k && c % (w + 1) == i;
    // segments of columns: every cut column alone, maximal runs of the rest
    let mut segments: Vec<(bool, Vec<usize>)> = Vec::new();
    for c in 0..k {
        match segments.last_mut() {
            Some((false, cols)) if !is_cut(c) => cols.push(c),
            _ => segments.push((is_cut(c), vec![c])),
        }
    }
    let mut out = Vec::new();
    for reverse_segments in [false, true] {
        for pattern in 0..4 {
            for first in [Side::Left, Side::Right] {
                let mut order = Vec::with_capacity(8 * k * k);
                let seq: Vec<&(bool, Vec<usize>)> = if reverse_segments {
                    segments.iter().rev().collect()
                } else {
                    segments.iter().collect()
                };
                for (n, (_, cols)) in seq.into_iter().enumerate() {
                    let down = match pattern {
                        0 => true,
                        1 => false,
                        2 => n % 2 == 0,
                        _ => n % 2 == 1,
                    };
                    let rows: Vec<usize> = if down {
                        (0..k).collect()
                    } else {
                        (0..k).rev().collect()
                    };
                    for &r in &rows {
                        for &c in cols {
                            for side in [first, first.flip()] {
                                for u in 0..4 {
                                    order.push(ChimeraCoord::new(r, c, side, u).index(k));
                                }
                            }
                        }
                    }
                }
                out.push(order);
            }
        }
    }
    out
}

fn general_orders(inst: &IsingInstance) -> Vec<Vec<usize>> {
    let natural: Vec<usize> = (0..inst.len()).collect();
    // breadth-first from the lowest index of every component
    let mut seen = vec![false; inst.len()];
    let mut bfs = Vec::with_capacity(inst.len());
    for s in 0..inst.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            bfs.push(u);
            for &(v, _) in inst.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    vec![natural, bfs]
}

/// Cheapest available sweep of the subset (inactive nodes are skipped).
///
/// Per component, candidates are ranked by width and then by cost; components
/// follow each other in order of their smallest node.
pub fn build_sweep(inst: &IsingInstance, subset: &[bool], hint: &SweepHint) -> SweepDecomposition {
    assert_eq!(subset.len(), inst.len(), "subset mask length");
    let member: Vec<bool> = (0..inst.len())
        .map(|i| subset[i] && inst.is_active(i))
        .collect();
    let candidates = candidate_orders(inst, hint);
    let mut comp_of = vec![usize::MAX; inst.len()];
    let comps = components(inst, &member);
    for (id, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = id;
        }
    }
    let mut pos = vec![usize::MAX; inst.len()];
    let mut steps = Vec::new();
    let mut width = 0;
    let mut cost = 0.0;
    for (id, comp) in comps.iter().enumerate() {
        let mut best: Option<(Vec<SweepStep>, usize, f64)> = None;
        for cand in &candidates {
            let order: Vec<usize> = cand.iter().copied().filter(|&v| comp_of[v] == id).collect();
            debug_assert_eq!(order.len(), comp.len());
            let (s, wd, c) = decompose(inst, &member, &order, &mut pos);
            let better = match &best {
                None => true,
                Some((_, bw, bc)) => (wd, c) < (*bw, *bc),
            };
            if better {
                best = Some((s, wd, c));
            }
        }
        let (s, wd, c) = best.expect("at least one candidate order");
        steps.extend(s);
        width = width.max(wd);
        cost += c;
    }
    SweepDecomposition { steps, width, cost }
}
