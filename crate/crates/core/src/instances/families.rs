//! Random Chimera instance families.
//!
//! Every generator draws in the same order: declared faults first (mgw only),
//! then one value per working coupler in ascending `(a, b)` order, then one
//! value per working qubit in index order. Zero draws are not stored.

use serde::{Deserialize, Serialize};

use crate::chimera::{ChimeraCoord, ChimeraGraph, FaultList, Granularity};
use crate::error::{Error, Result};
use crate::ising::{IsingBuilder, IsingInstance};
use crate::rng::PortableRng;

pub const GAMMA: i64 = 10;

/// Which qubits and couplers are treated as broken.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultBase {
    /// Fault-free `C_k`.
    None,
    /// [`FaultList::illustrative_c16`] restricted to the `C_k` corner.
    #[default]
    Machine,
    List(FaultList),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPolicy {
    pub base: FaultBase,
    /// Total number of faulty qubits after adding randomly declared ones.
    pub declared_total: Option<usize>,
}

impl FaultPolicy {
    pub fn none() -> Self {
        Self {
            base: FaultBase::None,
            declared_total: None,
        }
    }

    pub fn machine() -> Self {
        Self::default()
    }

    /// The base list restricted to `C_k`, without random additions.
    pub fn base_list(&self, k: usize) -> FaultList {
        match &self.base {
            FaultBase::None => FaultList::new(),
            FaultBase::Machine => FaultList::illustrative_c16().restrict_to(k),
            FaultBase::List(list) => list.clone(),
        }
    }

    /// The working graph. Random declarations consume draws from `rng`.
    pub fn graph(&self, k: usize, rng: &mut PortableRng) -> Result<ChimeraGraph> {
        let mut list = self.base_list(k);
        if let Some(total) = self.declared_total {
            let base = ChimeraGraph::build(k, &list, false)?;
            let working: Vec<usize> = (0..8 * k * k).filter(|&v| base.is_working(v)).collect();
            let have = 8 * k * k - working.len();
            if total < have {
                return Err(Error::OutOfRange(format!(
                    "{total} declared faulty qubits is fewer than the {have} already faulty"
                )));
            }
            if total - have > working.len() {
                return Err(Error::OutOfRange(format!(
                    "cannot declare {} more faulty qubits: only {} are working",
                    total - have,
                    working.len()
                )));
            }
            for i in rng.sample_distinct(working.len(), total - have) {
                list.add_node(ChimeraCoord::from_index(k, working[i]).expect("valid index"));
            }
        }
        ChimeraGraph::build(k, &list, false)
    }
}

type Draw<'a> = &'a mut dyn FnMut(&mut PortableRng, usize, usize) -> i64;

/// `coupler(rng, a, b)` per working coupler, then `field(rng, v, 0)` per working qubit.
fn fill(
    graph: &ChimeraGraph,
    rng: &mut PortableRng,
    coupler: Draw<'_>,
    field: Draw<'_>,
) -> Result<IsingInstance> {
    let mut b = IsingBuilder::chimera(graph, GAMMA);
    for (x, y) in graph.couplers() {
        let j = coupler(rng, x, y);
        if j != 0 {
            b.coupling(x, y, j)?;
        }
    }
    for v in (0..graph.qubit_slots()).filter(|&v| graph.is_working(v)) {
        let h = field(rng, v, 0);
        if h != 0 {
            b.field(v, h)?;
        }
    }
    b.build()
}

fn pm_one(rng: &mut PortableRng) -> i64 {
    if rng.coin() {
        GAMMA
    } else {
        -GAMMA
    }
}

/// ±1 on every working coupler and every field.
pub fn gen_mgw(k: usize, faults: &FaultPolicy, seed: u64) -> Result<IsingInstance> {
    let mut rng = PortableRng::new(seed);
    let graph = faults.graph(k, &mut rng)?;
    fill(
        &graph,
        &mut rng,
        &mut |r, _, _| pm_one(r),
        &mut |r, _, _| pm_one(r),
    )
}

/// Uniform over the 21 values of `Γ` on every coupler and field.
pub fn gen_rfr(k: usize, faults: &FaultPolicy, seed: u64) -> Result<IsingInstance> {
    let mut rng = PortableRng::new(seed);
    let graph = faults.graph(k, &mut rng)?;
    let mut draw = |r: &mut PortableRng, _, _| r.range_inclusive(-GAMMA, GAMMA);
    fill(&graph, &mut rng, &mut draw.clone(), &mut draw)
}

/// Intra-cell couplers uniform over `{-0.5, ..., 0.5}`, inter-cell couplers
/// uniform over `Γ`, no field.
pub fn gen_selby(k: usize, faults: &FaultPolicy, seed: u64) -> Result<IsingInstance> {
    let mut rng = PortableRng::new(seed);
    let graph = faults.graph(k, &mut rng)?;
    let mut coupler = |r: &mut PortableRng, x: usize, y: usize| {
        let half = if x / 8 == y / 8 { GAMMA / 2 } else { GAMMA };
        r.range_inclusive(-half, half)
    };
    fill(&graph, &mut rng, &mut coupler, &mut |_, _, _| 0)
}

/// `J = 0.1` with probability 1/2, otherwise 0, and `h_i = Σ_j J_ij - 0.2`.
pub fn gen_mis(k: usize, faults: &FaultPolicy, seed: u64) -> Result<IsingInstance> {
    let mut rng = PortableRng::new(seed);
    let graph = faults.graph(k, &mut rng)?;
    let sum = std::cell::RefCell::new(vec![0i64; graph.qubit_slots()]);
    let mut coupler = |r: &mut PortableRng, x: usize, y: usize| {
        let j = i64::from(r.coin());
        let mut sum = sum.borrow_mut();
        sum[x] += j;
        sum[y] += j;
        j
    };
    fill(&graph, &mut rng, &mut coupler, &mut |_, v, _| {
        sum.borrow()[v] - 2
    })
}

/// Scale real weights so the largest magnitude is 1 and snap every weight to
/// `Γ` with the given `gamma`. Weights that snap to zero are dropped.
///
/// `inst` may use any denominator; this is how externally supplied instances
/// with real-valued weights enter the suite.
pub fn rebin(inst: &IsingInstance, gamma: i64) -> Result<IsingInstance> {
    let grid = Granularity::new(gamma)?;
    let max = inst
        .couplings()
        .iter()
        .map(|c| c.weight.abs())
        .chain(inst.fields().iter().map(|h| h.abs()))
        .max()
        .unwrap_or(0);
    let mut b = match inst.chimera_k() {
        Some(k) => IsingBuilder::chimera_k(k, gamma),
        None => IsingBuilder::general(inst.len(), gamma),
    };
    let snap = |w: i64| {
        if max == 0 {
            0
        } else {
            grid.snap_numerator(w as f64 / max as f64)
        }
    };
    for i in 0..inst.len() {
        if !inst.is_active(i) {
            b.deactivate(i)?;
        }
    }
    for c in inst.couplings() {
        let j = snap(c.weight);
        if j != 0 {
            b.coupling(c.a, c.b, j)?;
        }
    }
    for i in inst.active_nodes() {
        let h = snap(inst.field(i));
        if h != 0 {
            b.field(i, h)?;
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::Side;

    fn all_weights(inst: &IsingInstance) -> Vec<i64> {
        inst.couplings()
            .iter()
            .map(|c| c.weight)
            .chain(inst.active_nodes().map(|i| inst.field(i)))
            .collect()
    }

    #[test]
    fn mgw_439_has_440_nodes_with_field() {
        let policy = FaultPolicy {
            base: FaultBase::Machine,
            declared_total: Some(73),
        };
        let inst = gen_mgw(8, &policy, 4711).unwrap();
        assert_eq!(inst.active_count() + 1, 440);
        for w in all_weights(&inst) {
            assert!(w == 10 || w == -10);
        }
        // every working qubit carries a field
        assert_eq!(
            inst.active_nodes().filter(|&i| inst.field(i) != 0).count(),
            439
        );
    }

    #[test]
    fn declared_faults_validated() {
        let policy = FaultPolicy {
            base: FaultBase::Machine,
            declared_total: Some(2),
        };
        assert!(gen_mgw(8, &policy, 1).is_err());
        let policy = FaultPolicy {
            base: FaultBase::None,
            declared_total: Some(9),
        };
        assert!(gen_mgw(1, &policy, 1).is_err());
    }

    #[test]
    fn mgw_mean_near_zero() {
        let mut total = 0i64;
        let mut count = 0i64;
        for seed in 0..210 {
            let inst = gen_mgw(4, &FaultPolicy::none(), seed).unwrap();
            for w in all_weights(&inst) {
                total += w / 10;
                count += 1;
            }
        }
        assert!(count > 100_000, "{count}");
        assert!((total as f64 / count as f64).abs() < 0.02);
    }

    #[test]
    fn rfr_c16_node_count_and_uniformity() {
        let inst = gen_rfr(16, &FaultPolicy::machine(), 7).unwrap();
        assert_eq!(inst.active_count() + 1, 2032);

        // counts include the zeros, which are drawn but not stored
        let mut hist = [0u64; 21];
        let mut draws = 0u64;
        for seed in 0..14 {
            let inst = gen_rfr(16, &FaultPolicy::machine(), seed).unwrap();
            let slots = inst.couplings().len();
            let drawn = 5919 + 2031;
            for w in all_weights(&inst) {
                if w != 0 {
                    hist[(w + 10) as usize] += 1;
                }
            }
            hist[10] +=
                (drawn - slots - inst.active_nodes().filter(|&i| inst.field(i) != 0).count())
                    as u64;
            draws += drawn as u64;
        }
        let p = 1.0 / 21.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in hist.iter().enumerate() {
            assert!(
                (c as f64 - draws as f64 * p).abs() < 3.5 * sigma,
                "value {}: {c}",
                i as i64 - 10
            );
        }
    }

    #[test]
    fn selby_weights() {
        let mut intra = (0i64, 0i64);
        let mut inter = (0i64, 0i64);
        for seed in 0..10 {
            let inst = gen_selby(8, &FaultPolicy::machine(), seed).unwrap();
            assert!(inst.fields().iter().all(|&h| h == 0));
            for c in inst.couplings() {
                if c.a / 8 == c.b / 8 {
                    assert!(c.weight.abs() <= 5);
                    intra = (intra.0 + c.weight.abs(), intra.1 + 1);
                } else {
                    inter = (inter.0 + c.weight.abs(), inter.1 + 1);
                }
            }
        }
        // zeros are dropped from both sets, so the means are over nonzero draws: 3 and 5.5
        let ratio = (inter.0 as f64 / inter.1 as f64) / (intra.0 as f64 / intra.1 as f64);
        assert!((ratio - 5.5 / 3.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn mis_fields() {
        let inst = gen_mis(4, &FaultPolicy::none(), 3).unwrap();
        for i in inst.active_nodes() {
            let sum: i64 = inst.neighbors(i).iter().map(|&(_, j)| j).sum();
            assert_eq!(inst.field(i), sum - 2);
            assert!(inst.neighbors(i).iter().all(|&(_, j)| j == 1));
        }
        let mut found_isolated = false;
        for seed in 0..200 {
            let inst = gen_mis(1, &FaultPolicy::none(), seed).unwrap();
            for i in inst.active_nodes() {
                if inst.neighbors(i).is_empty() {
                    assert_eq!(inst.field(i), -2);
                    found_isolated = true;
                }
            }
        }
        assert!(found_isolated);
    }

    #[test]
    fn mis_degree_six_qubit() {
        // an interior qubit of C_3 has 4 intra-cell and 2 inter-cell couplers
        let v = ChimeraCoord::new(1, 1, Side::Left, 0).index(3);
        let graph = ChimeraGraph::fault_free(3).unwrap();
        assert_eq!(graph.neighbors(v).unwrap().len(), 6);
        let hit = (0..5000).find_map(|seed| {
            let inst = gen_mis(3, &FaultPolicy::none(), seed).unwrap();
            (inst.neighbors(v).len() == 6).then(|| inst.field(v))
        });
        assert_eq!(hit, Some(4));
    }

    #[test]
    fn generators_are_deterministic() {
        let p = FaultPolicy::machine();
        assert_eq!(gen_rfr(4, &p, 9).unwrap(), gen_rfr(4, &p, 9).unwrap());
        assert_ne!(gen_rfr(4, &p, 9).unwrap(), gen_rfr(4, &p, 10).unwrap());
    }

    #[test]
    fn rebin_scales_and_snaps() {
        let mut b = IsingBuilder::general(3, 1000);
        b.coupling(0, 1, -2000).unwrap();
        b.coupling(1, 2, 1049).unwrap();
        b.field(2, 49).unwrap();
        let inst = rebin(&b.build().unwrap(), 10).unwrap();
        assert_eq!(inst.scale(), 10);
        assert_eq!(inst.coupling(0, 1), Some(-10));
        assert_eq!(inst.coupling(1, 2), Some(5));
        // 49/2000 snaps to zero and is dropped
        assert_eq!(inst.field(2), 0);
    }
}
