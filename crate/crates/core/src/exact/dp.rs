//! Boundary dynamic program over a sweep.
//!
//! The table after step `t` holds, for every assignment of the boundary, the
//! least energy of the terms among introduced nodes. Bit `1` means spin `-1`.
//! Forgetting is merged into the introduction, so a step reads `2^(m+1)`
//! combinations of the old boundary and the new spin and writes one entry per
//! assignment of the new boundary.
//!
//! For every forgotten node the step stores which value won (a packed bit
//! table), and the configuration is rebuilt backwards from the empty final
//! boundary.

use crate::error::{Error, Result};
use crate::exact::sweep::SweepDecomposition;
use crate::ising::{IsingBuilder, IsingInstance, SpinConfig};
use crate::rng::PortableRng;

pub const DEFAULT_WIDTH_CAP: usize = 20;

/// Preferred spin per node, used to break ties between equal-energy choices.
///
/// Among minimal choices for the nodes forgotten at one step, the one closest
/// to the preferred spins in binary order wins. A random preference per run
/// makes the returned optimum unique and reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreak {
    preferred: Vec<i8>,
}

impl TieBreak {
    pub fn all_up(n: usize) -> Self {
        Self {
            preferred: vec![1; n],
        }
    }

    pub fn random(n: usize, rng: &mut PortableRng) -> Self {
        Self {
            preferred: (0..n).map(|_| if rng.coin() { 1 } else { -1 }).collect(),
        }
    }

    fn bit(&self, v: usize) -> u64 {
        u64::from(self.preferred.get(v).copied().unwrap_or(1) == -1)
    }
}

/// An instance restricted to a subset `S` with the exterior spins frozen.
///
/// Exterior neighbours act as extra fields: `h'_i = h_i + Σ_{j ∉ S} J_ij s_j`.
#[derive(Clone, Debug)]
pub struct ConditionalProblem<'a> {
    inst: &'a IsingInstance,
    subset: Vec<bool>,
    fields: Vec<i64>,
    exterior: i64,
    base: Vec<i8>,
}

impl<'a> ConditionalProblem<'a> {
    /// Inactive nodes are dropped from the subset.
    pub fn new(inst: &'a IsingInstance, s: &[i8], subset: &[bool]) -> Result<Self> {
        if s.len() != inst.len() || subset.len() != inst.len() {
            return Err(Error::DimensionMismatch {
                expected: inst.len(),
                got: if s.len() != inst.len() {
                    s.len()
                } else {
                    subset.len()
                },
            });
        }
        let subset: Vec<bool> = (0..inst.len())
            .map(|i| subset[i] && inst.is_active(i))
            .collect();
        let mut fields = vec![0i64; inst.len()];
        let mut exterior = 0i64;
        for i in 0..inst.len() {
            if subset[i] {
                fields[i] = inst.field(i)
                    + inst
                        .neighbors(i)
                        .iter()
                        .filter(|(j, _)| !subset[*j])
                        .map(|&(j, w)| w * i64::from(s[j]))
                        .sum::<i64>();
            } else {
                exterior += inst.field(i) * i64::from(s[i]);
            }
        }
        for c in inst.couplings() {
            if !subset[c.a] && !subset[c.b] {
                exterior += c.weight * i64::from(s[c.a]) * i64::from(s[c.b]);
            }
        }
        Ok(Self {
            inst,
            subset,
            fields,
            exterior,
            base: s.to_vec(),
        })
    }

    /// All active nodes free.
    pub fn full(inst: &'a IsingInstance) -> Self {
        let all = vec![true; inst.len()];
        Self::new(inst, &vec![1; inst.len()], &all).expect("dimensions match")
    }

    pub fn instance(&self) -> &IsingInstance {
        self.inst
    }

    pub fn subset(&self) -> &[bool] {
        &self.subset
    }

    pub fn effective_field(&self, i: usize) -> i64 {
        self.fields[i]
    }

    /// Energy of the terms not touching `S`.
    pub fn exterior_energy(&self) -> i64 {
        self.exterior
    }

    /// The folded problem as an instance: nodes outside `S` become inactive.
    pub fn to_instance(&self) -> IsingInstance {
        let mut b = IsingBuilder::general(self.inst.len(), self.inst.scale());
        for c in self.inst.couplings() {
            if self.subset[c.a] && self.subset[c.b] {
                b.coupling(c.a, c.b, c.weight).expect("valid coupling");
            }
        }
        for i in 0..self.inst.len() {
            if self.subset[i] {
                b.field(i, self.fields[i]).expect("valid node");
            }
        }
        for i in 0..self.inst.len() {
            if !self.subset[i] {
                b.deactivate(i).expect("node carries no weight");
            }
        }
        b.build().expect("valid instance")
    }

    fn weight_bound(&self) -> i128 {
        let j: i128 = self
            .inst
            .couplings()
            .iter()
            .filter(|c| self.subset[c.a] && self.subset[c.b])
            .map(|c| c.weight.abs() as i128)
            .sum();
        let h: i128 = (0..self.inst.len())
            .filter(|&i| self.subset[i])
            .map(|i| self.fields[i].abs() as i128)
            .sum();
        j + h + (self.exterior.abs() as i128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpSolution {
    /// Total energy numerator of `spins`.
    pub energy: i64,
    /// Energy of the terms touching `S` (effective fields included).
    pub conditional: i64,
    /// The input configuration with `S` replaced by the conditional optimum.
    pub spins: SpinConfig,
}

/// Winning bits of the forgotten nodes, `width` bits per new-table entry.
struct Packed {
    width: usize,
    data: Vec<u64>,
}

impl Packed {
    fn new(width: usize, entries: usize) -> Self {
        let words = if width == 0 {
            0
        } else {
            (entries * width).div_ceil(64) + 1
        };
        Self {
            width,
            data: vec![0; words],
        }
    }

    #[inline]
    fn set(&mut self, i: usize, val: u64) {
        let bit = i * self.width;
        let (w, off) = (bit / 64, bit % 64);
        self.data[w] |= val << off;
        if off + self.width > 64 {
            self.data[w + 1] |= val >> (64 - off);
        }
    }

    #[inline(always)]
    fn set_bit(&mut self, i: usize) {
        self.or_bit(i, 1);
    }

    #[inline(always)]
    fn or_bit(&mut self, i: usize, bit: u64) {
        debug_assert_eq!(self.width, 1);
        self.data[i >> 6] |= bit << (i & 63);
    }

    #[inline]
    fn get(&self, i: usize) -> u64 {
        if self.width == 0 {
            return 0;
        }
        let bit = i * self.width;
        let (w, off) = (bit / 64, bit % 64);
        let mut v = self.data[w] >> off;
        if off + self.width > 64 {
            v |= self.data[w + 1] << (64 - off);
        }
        v & ((1u64 << self.width) - 1)
    }
}

/// `h_v + Σ J_uv s_u` as a function of the old-boundary index, via byte tables.
struct LocalField {
    base: i64,
    tables: Box<[[i64; 256]; 4]>,
}

/// Largest boundary the byte tables can address.
const MAX_WIDTH: usize = 30;

impl LocalField {
    fn new(base: i64, neighbors: &[(usize, i64)]) -> Self {
        let mut tables = Box::new([[0i64; 256]; 4]);
        for (ch, table) in tables.iter_mut().enumerate() {
            let here: Vec<(usize, i64)> = neighbors
                .iter()
                .filter(|(p, _)| p / 8 == ch)
                .map(|&(p, w)| (p % 8, w))
                .collect();
            if here.is_empty() {
                continue;
            }
            for (byte, slot) in table.iter_mut().enumerate() {
                *slot = here
                    .iter()
                    .map(|&(q, w)| if byte >> q & 1 == 1 { -w } else { w })
                    .sum();
            }
        }
        Self { base, tables }
    }

    #[inline(always)]
    fn at(&self, a: usize) -> i64 {
        let t = &self.tables;
        self.base
            + t[0][a & 255]
            + t[1][(a >> 8) & 255]
            + t[2][(a >> 16) & 255]
            + t[3][(a >> 24) & 255]
    }
}

/// How the old boundary maps onto the new one at a step.
enum StepShape {
    /// Nothing forgotten; the new node takes the next slot.
    Append,
    /// Only the new node is forgotten.
    Absorb,
    /// One old node is forgotten and the new node takes its slot.
    Replace(usize),
    /// `(forgotten, index)` for every old slot and then the new node.
    General(Vec<(bool, usize)>),
}

/// Everything a step needs besides the table.
struct StepPlan {
    shape: StepShape,
    field: i64,
    /// `(old slot, coupling)` of the earlier neighbours.
    nb: Vec<(usize, i64)>,
    pref: u64,
    m: usize,
    xbits: usize,
    bnew: usize,
}

/// Longest run of replace steps handled in one pass.
const MAX_FUSED: usize = 8;

/// Applies consecutive replace steps on distinct slots tile by tile. A tile is
/// every assignment of the touched slots for one assignment of the others, so
/// each butterfly stays inside a tile.
fn replace_run(table: &mut [i64], plans: &[StepPlan], args: &mut [Packed]) {
    let r = plans.len();
    let m = plans[0].m;
    let qs: Vec<usize> = plans
        .iter()
        .map(|pl| match pl.shape {
            StepShape::Replace(q) => q,
            _ => unreachable!(),
        })
        .collect();
    let qmask: usize = qs.iter().map(|&q| 1usize << q).sum();
    let offs: Vec<usize> = (0..1usize << r)
        .map(|k| {
            (0..r)
                .filter(|&s| k >> s & 1 == 1)
                .map(|s| 1usize << qs[s])
                .sum()
        })
        .collect();
    let locals: Vec<LocalField> = plans
        .iter()
        .map(|pl| LocalField::new(pl.field, &pl.nb))
        .collect();
    // the forgotten node and the new node share the slot, so flipping that
    // bit shifts the local field by -2J when they are coupled
    let dqs: Vec<i64> = plans
        .iter()
        .zip(&qs)
        .map(|(pl, &q)| {
            pl.nb
                .iter()
                .find(|&&(s, _)| s == q)
                .map_or(0, |&(_, w)| -2 * w)
        })
        .collect();
    // ties go to x = 1 when the preference is 1: compare doubled values with a
    // bias of one
    let bias: Vec<i64> = plans.iter().map(|pl| pl.pref as i64).collect();
    let mut buf = vec![0i64; 1usize << r];
    let mut base = 0usize;
    for _ in 0..1usize << (m - r) {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = table[base + offs[k]];
        }
        for s in 0..r {
            let bit = 1usize << s;
            let (local, dq, bias) = (&locals[s], dqs[s], bias[s]);
            let arg = &mut args[s];
            for k0 in (0..1usize << r).filter(|k| k & bit == 0) {
                let k1 = k0 | bit;
                let (a0, a1) = (base + offs[k0], base + offs[k1]);
                let l0 = local.at(a0);
                let l1 = l0 + dq;
                let (t0, t1) = (buf[k0], buf[k1]);
                let (u0, u1) = (t0 + l0, t1 + l1);
                let (d0, d1) = (t0 - l0, t1 - l1);
                if 2 * u1 - bias < 2 * u0 {
                    buf[k0] = u1;
                    arg.set_bit(a0);
                } else {
                    buf[k0] = u0;
                }
                if 2 * d1 - bias < 2 * d0 {
                    buf[k1] = d1;
                    arg.set_bit(a1);
                } else {
                    buf[k1] = d0;
                }
            }
        }
        for (k, &b) in buf.iter().enumerate() {
            table[base + offs[k]] = b;
        }
        base = ((base | qmask) + 1) & !qmask;
    }
}

/// Exact conditional optimum over the subset of `p`.
pub fn solve_dp(
    p: &ConditionalProblem<'_>,
    d: &SweepDecomposition,
    tie: &TieBreak,
    cap: usize,
) -> Result<DpSolution> {
    if d.width > cap.min(MAX_WIDTH) {
        return Err(Error::WidthOverCap {
            width: d.width,
            cap: cap.min(MAX_WIDTH),
        });
    }
    let bound = p.weight_bound();
    if bound > (i64::MAX / 4) as i128 {
        return Err(Error::Overflow(bound));
    }
    let inst = p.inst;
    let n = inst.len();

    // First pass: slot bookkeeping only.
    let mut slot = vec![usize::MAX; n];
    let mut boundary: Vec<usize> = Vec::new();
    let mut plans: Vec<StepPlan> = Vec::with_capacity(d.steps.len());
    let mut xnodes: Vec<Vec<usize>> = Vec::with_capacity(d.steps.len());
    for st in &d.steps {
        let v = st.node;
        let m = boundary.len();
        let nb: Vec<(usize, i64)> = inst
            .neighbors(v)
            .iter()
            .filter(|(u, _)| p.subset[*u] && slot[*u] != usize::MAX)
            .map(|&(u, w)| (slot[u], w))
            .collect();
        debug_assert_eq!(nb.len(), st.earlier.len());

        let v_forgotten = st.forget.contains(&v);
        let mut x_old: Vec<usize> = st
            .forget
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| slot[u])
            .collect();
        x_old.sort_unstable();
        let mut xs: Vec<usize> = x_old.iter().map(|&q| boundary[q]).collect();
        if v_forgotten {
            xs.push(v);
        }
        let pref: u64 = xs.iter().enumerate().map(|(i, &u)| tie.bit(u) << i).sum();

        // new slot of every old slot (usize::MAX if forgotten) and of v
        let new_slot = |u: usize| {
            st.boundary
                .iter()
                .position(|&b| b == u)
                .unwrap_or(usize::MAX)
        };
        let moved: Vec<usize> = boundary.iter().map(|&u| new_slot(u)).collect();
        let v_slot = new_slot(v);
        let stays = |skip: Option<usize>| (0..m).all(|q| Some(q) == skip || moved[q] == q);
        let shape = match (x_old.as_slice(), v_forgotten) {
            ([], false) if v_slot == m && stays(None) => StepShape::Append,
            ([], true) if stays(None) => StepShape::Absorb,
            (&[q], false) if v_slot == q && stays(Some(q)) => StepShape::Replace(q),
            _ => {
                let mut dest: Vec<(bool, usize)> = (0..m)
                    .map(|q| match x_old.binary_search(&q) {
                        Ok(i) => (true, i),
                        Err(_) => (false, moved[q]),
                    })
                    .collect();
                dest.push(if v_forgotten {
                    (true, x_old.len())
                } else {
                    (false, v_slot)
                });
                StepShape::General(dest)
            }
        };
        plans.push(StepPlan {
            shape,
            field: p.fields[v],
            nb,
            pref,
            m,
            xbits: xs.len(),
            bnew: st.boundary.len(),
        });
        xnodes.push(xs);

        for &u in &st.forget {
            slot[u] = usize::MAX;
        }
        for (i, &u) in st.boundary.iter().enumerate() {
            slot[u] = i;
        }
        boundary.clone_from(&st.boundary);
    }

    // Second pass: the tables. Runs of replace steps on distinct slots share
    // one pass over the table.
    let mut table: Vec<i64> = vec![0];
    let mut spare: Vec<i64> = Vec::new();
    let mut args: Vec<Packed> = plans
        .iter()
        .map(|pl| Packed::new(pl.xbits, 1usize << pl.bnew))
        .collect();
    let mut t = 0;
    while t < plans.len() {
        let mut end = t;
        let mut qmask = 0usize;
        while end < plans.len() && end - t < MAX_FUSED {
            match plans[end].shape {
                StepShape::Replace(q) if qmask >> q & 1 == 0 => qmask |= 1 << q,
                _ => break,
            }
            end += 1;
        }
        if end > t {
            replace_run(&mut table, &plans[t..end], &mut args[t..end]);
            t = end;
            continue;
        }
        let pl = &plans[t];
        let arg = &mut args[t];
        let local = LocalField::new(pl.field, &pl.nb);
        let m = pl.m;
        match &pl.shape {
            StepShape::Append => {
                table.resize(1usize << (m + 1), 0);
                let (lo, hi) = table.split_at_mut(1usize << m);
                for (a, (t, u)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let l = local.at(a);
                    *u = *t - l;
                    *t += l;
                }
            }
            StepShape::Absorb => {
                for (a, t) in table.iter_mut().enumerate() {
                    let l = local.at(a);
                    let down_wins = if pl.pref == 0 { l > 0 } else { l >= 0 };
                    if down_wins {
                        *t -= l;
                        arg.set_bit(a);
                    } else {
                        *t += l;
                    }
                }
            }
            StepShape::Replace(_) => unreachable!("handled as a run"),
            StepShape::General(dest) => {
                spare.clear();
                spare.resize(1usize << pl.bnew, i64::MAX);
                general_step(&table, &mut spare, arg, &local, dest, pl.pref);
                std::mem::swap(&mut table, &mut spare);
            }
        }
        t += 1;
    }
    debug_assert!(boundary.is_empty());
    let conditional = table[0];

    let mut bits = vec![0u8; n];
    for (t, st) in d.steps.iter().enumerate().rev() {
        let idx: usize = st
            .boundary
            .iter()
            .enumerate()
            .map(|(i, &u)| usize::from(bits[u]) << i)
            .sum();
        let f = args[t].get(idx);
        for (q, &u) in xnodes[t].iter().enumerate() {
            bits[u] = (f >> q & 1) as u8;
        }
    }
    let mut spins = p.base.clone();
    for st in &d.steps {
        spins[st.node] = 1 - 2 * bits[st.node] as i8;
    }
    Ok(DpSolution {
        energy: conditional + p.exterior,
        conditional,
        spins: SpinConfig::new(spins)?,
    })
}

/// Any forget pattern: map every combined index (old boundary, new spin at
/// the top bit) to its new-table index and forgotten bits with byte tables.
/// `dest[pos]` is `(forgotten, index)` for each combined bit.
fn general_step(
    table: &[i64],
    next: &mut [i64],
    arg: &mut Packed,
    local: &LocalField,
    dest: &[(bool, usize)],
    pref: u64,
) {
    let bits = dest.len();
    let m = bits - 1;
    let chunks = bits.div_ceil(8);
    let mut maps = vec![[(0usize, 0u64); 256]; chunks];
    for (ch, map) in maps.iter_mut().enumerate() {
        for (byte, entry) in map.iter_mut().enumerate() {
            for q in 0..8 {
                let pos = ch * 8 + q;
                if pos >= bits || byte >> q & 1 == 0 {
                    continue;
                }
                match dest[pos] {
                    (true, i) => entry.1 |= 1 << i,
                    (false, i) => entry.0 |= 1 << i,
                }
            }
        }
    }
    let old_mask = (1usize << m) - 1;
    let mut best_rank = vec![u64::MAX; next.len()];
    for c in 0..1usize << bits {
        let a = c & old_mask;
        let l = local.at(a);
        let val = table[a] + if c >> m & 1 == 0 { l } else { -l };
        let (mut idx, mut f) = (0usize, 0u64);
        for (ch, map) in maps.iter().enumerate() {
            let (i, x) = map[(c >> (8 * ch)) & 255];
            idx |= i;
            f |= x;
        }
        let rank = f ^ pref;
        if val < next[idx] || (val == next[idx] && rank < best_rank[idx]) {
            next[idx] = val;
            best_rank[idx] = rank;
        }
    }
    for (idx, &r) in best_rank.iter().enumerate() {
        arg.set(idx, r ^ pref);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{ChimeraGraph, FaultList};
    use crate::exact::brute::brute_force_min;
    use crate::exact::sweep::{build_sweep, SweepHint};
    use crate::testutil::{naive_ground_energy, random_general, random_spins};

    fn random_chimera(
        rng: &mut PortableRng,
        k: usize,
        field: bool,
        faults: &FaultList,
    ) -> IsingInstance {
        let g = ChimeraGraph::build(k, faults, false).unwrap();
        let mut b = IsingBuilder::chimera(&g, 10);
        for (x, y) in g.couplers() {
            b.coupling(x, y, rng.range_inclusive(-10, 10)).unwrap();
        }
        if field {
            for i in 0..g.qubit_slots() {
                if g.is_working(i) {
                    b.field(i, rng.range_inclusive(-10, 10)).unwrap();
                }
            }
        }
        b.build().unwrap()
    }

    fn solve_full(inst: &IsingInstance, tie: &TieBreak) -> DpSolution {
        let p = ConditionalProblem::full(inst);
        let d = build_sweep(inst, p.subset(), &SweepHint::Auto);
        solve_dp(&p, &d, tie, DEFAULT_WIDTH_CAP).unwrap()
    }

    #[test]
    fn packed_bits_round_trip() {
        for width in 1..=7 {
            let mut p = Packed::new(width, 100);
            for i in 0..100 {
                p.set(i, (i as u64 * 37) % (1 << width));
            }
            for i in 0..100 {
                assert_eq!(p.get(i), (i as u64 * 37) % (1 << width));
            }
        }
    }

    #[test]
    fn antiferromagnetic_cell() {
        let g = ChimeraGraph::fault_free(1).unwrap();
        let mut b = IsingBuilder::chimera(&g, 10);
        for (x, y) in g.couplers() {
            b.coupling(x, y, 10).unwrap();
        }
        let inst = b.build().unwrap();
        let sol = solve_full(&inst, &TieBreak::all_up(8));
        assert_eq!(sol.energy, -160);
        assert_eq!(inst.energy(&sol.spins).unwrap(), -160);
    }

    #[test]
    fn matches_brute_force_on_small_grids() {
        let mut rng = PortableRng::new(21);
        for trial in 0..60 {
            let k = 1 + trial % 2;
            let inst = random_chimera(&mut rng, k, trial % 3 != 0, &FaultList::new());
            let tie = TieBreak::random(inst.len(), &mut rng);
            let sol = solve_full(&inst, &tie);
            let (e, _) = brute_force_min(&inst, 24).unwrap();
            assert_eq!(sol.energy, e, "trial {trial}");
            assert_eq!(inst.energy(&sol.spins).unwrap(), e);
        }
    }

    #[test]
    fn general_graphs_match_naive() {
        // dense graphs exercise the general forget pattern
        let mut rng = PortableRng::new(22);
        for trial in 0..30 {
            let inst = random_general(&mut rng, 11, 0.5, 10, trial % 2 == 0);
            let sol = solve_full(&inst, &TieBreak::random(11, &mut rng));
            assert_eq!(sol.energy, naive_ground_energy(&inst));
            assert_eq!(inst.energy(&sol.spins).unwrap(), sol.energy);
        }
    }

    #[test]
    fn conditional_fold_matches_brute_force() {
        let mut rng = PortableRng::new(23);
        let inst = random_chimera(&mut rng, 3, true, &FaultList::new());
        for _ in 0..10 {
            let s = random_spins(&mut rng, inst.len());
            // free half of the cells
            let subset: Vec<bool> = (0..inst.len()).map(|i| (i / 8) % 2 == 0).collect();
            let p = ConditionalProblem::new(&inst, &s, &subset).unwrap();
            let d = build_sweep(&inst, p.subset(), &SweepHint::Auto);
            let sol = solve_dp(&p, &d, &TieBreak::all_up(inst.len()), DEFAULT_WIDTH_CAP).unwrap();
            let folded = p.to_instance();
            let (e, _) = brute_force_min(&folded, 24).unwrap();
            assert_eq!(sol.conditional, e);
            assert_eq!(inst.energy(&sol.spins).unwrap(), sol.energy);
            for i in 0..inst.len() {
                if !subset[i] {
                    assert_eq!(sol.spins[i], s[i]);
                }
            }
            // no random interior assignment does better
            for _ in 0..200 {
                let mut t = s.clone();
                for i in 0..inst.len() {
                    if subset[i] {
                        t[i] = if rng.coin() { 1 } else { -1 };
                    }
                }
                assert!(sol.energy <= inst.energy(&t).unwrap());
            }
        }
    }

    #[test]
    fn faults_and_components() {
        let mut rng = PortableRng::new(24);
        let mut faults = FaultList::new();
        for v in [3usize, 9, 12, 20, 27] {
            faults.add_node(crate::chimera::ChimeraCoord::from_index(2, v).unwrap());
        }
        for _ in 0..10 {
            let inst = random_chimera(&mut rng, 2, true, &faults);
            let sol = solve_full(&inst, &TieBreak::random(inst.len(), &mut rng));
            assert_eq!(sol.energy, brute_force_min(&inst, 24).unwrap().0);
            for v in [3usize, 9, 12, 20, 27] {
                assert_eq!(sol.spins[v], 1);
            }
        }
    }

    #[test]
    fn tie_break_is_deterministic() {
        let mut rng = PortableRng::new(25);
        // zero-field instance: every optimum has a flipped twin
        let inst = random_chimera(&mut rng, 2, false, &FaultList::new());
        let tie = TieBreak::random(inst.len(), &mut rng);
        let a = solve_full(&inst, &tie);
        let b = solve_full(&inst, &tie);
        assert_eq!(a, b);
    }

    #[test]
    fn width_cap_rejects() {
        let mut rng = PortableRng::new(26);
        let inst = random_chimera(&mut rng, 3, false, &FaultList::new());
        let p = ConditionalProblem::full(&inst);
        let d = build_sweep(&inst, p.subset(), &SweepHint::Auto);
        assert!(matches!(
            solve_dp(&p, &d, &TieBreak::all_up(inst.len()), 4),
            Err(Error::WidthOverCap { cap: 4, .. })
        ));
    }

    #[test]
    fn empty_subset_keeps_configuration() {
        let mut rng = PortableRng::new(27);
        let inst = random_chimera(&mut rng, 1, true, &FaultList::new());
        let s = random_spins(&mut rng, 8);
        let p = ConditionalProblem::new(&inst, &s, &[false; 8]).unwrap();
        let d = build_sweep(&inst, p.subset(), &SweepHint::Auto);
        let sol = solve_dp(&p, &d, &TieBreak::all_up(8), 20).unwrap();
        assert_eq!(&*sol.spins, s.as_slice());
        assert_eq!(sol.energy, inst.energy(&s).unwrap());
    }
}
