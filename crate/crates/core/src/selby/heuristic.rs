//! Subgraph sampling.
//!
//! `inner` re-optimizes the spins of one subset exactly with the exterior
//! frozen. `outer` applies `inner` to the ordered collection
//! `H(w,x,y,z), ..., H(w,x,y+w,z), H(w,1-x,y,z), ..., H(w,1-x,y+w,z)` (third
//! argument mod `w+1`) for random `x, y, z`. The driver repeats `outer`,
//! restarting from a perturbed copy of the best configuration (or a fresh
//! random one) until the time budget runs out.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::chimera::ChimeraCoord;
use crate::error::{Error, Result};
use crate::exact::{
    build_sweep, solve_dp, ConditionalProblem, SweepDecomposition, TieBreak, DEFAULT_WIDTH_CAP,
};
use crate::ising::{IsingInstance, SpinConfig};
use crate::report::{SolveReport, SuccessTally};
use crate::rng::PortableRng;
use crate::selby::subset::SubsetSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RestartPolicy {
    /// Redraw the spins of a random fraction of the cells of the best configuration.
    Perturb,
    /// Start every pass from a new uniform random configuration.
    Fresh,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub w: usize,
    pub perturb_frac: f64,
    pub restart: RestartPolicy,
    pub time_limit: Duration,
    /// Stop after this many outer passes even if time remains.
    pub max_passes: Option<usize>,
    /// Stop as soon as this energy numerator is reached.
    pub target: Option<i64>,
    pub seed: u64,
    pub width_cap: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            w: 3,
            perturb_frac: 0.2,
            restart: RestartPolicy::Perturb,
            time_limit: Duration::from_secs(30),
            max_passes: None,
            target: None,
            seed: 4711,
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(Error::OutOfRange("w must be at least 1".into()));
        }
        if !(self.perturb_frac > 0.0 && self.perturb_frac <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "perturbation fraction {} is not in (0, 1]",
                self.perturb_frac
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub elapsed_ms: f64,
    pub pass: usize,
    pub energy: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRun {
    pub seed: u64,
    pub energy: i64,
    pub spins: SpinConfig,
    pub passes: usize,
    /// Best energy so far, after every pass.
    pub pass_best: Vec<i64>,
    /// Every strict improvement of the best energy.
    pub improvements: Vec<TracePoint>,
    /// Inner calls within a pass that raised the energy; zero for a correct solver.
    pub monotonicity_violations: usize,
    pub elapsed_ms: f64,
}

/// Exact re-optimization of the subset `spec`; the rest of `s` is kept.
pub fn inner(
    inst: &IsingInstance,
    s: &SpinConfig,
    spec: &SubsetSpec,
    tie: &TieBreak,
) -> Result<SpinConfig> {
    let k = chimera_k(inst)?;
    let (mask, sweep) = subset_sweep(inst, k, spec, DEFAULT_WIDTH_CAP);
    inner_with(inst, s, &mask, &sweep, tie, DEFAULT_WIDTH_CAP)
}

/// Mask and sweep for `spec`. When the sweep is wider than `cap` (a block of
/// `w+1` columns next to the last column, joined through the exempt row) the
/// exempt connectors are frozen too, so each block is solved on its own.
fn subset_sweep(
    inst: &IsingInstance,
    k: usize,
    spec: &SubsetSpec,
    cap: usize,
) -> (Vec<bool>, SweepDecomposition) {
    let mask = spec.mask(k, inst.active_mask());
    let sweep = build_sweep(inst, &mask, &spec.hint());
    if sweep.width <= cap {
        return (mask, sweep);
    }
    let trimmed = spec.trimmed_mask(k, inst.active_mask());
    let narrower = build_sweep(inst, &trimmed, &spec.hint());
    if narrower.width < sweep.width {
        (trimmed, narrower)
    } else {
        (mask, sweep)
    }
}

fn inner_with(
    inst: &IsingInstance,
    s: &SpinConfig,
    mask: &[bool],
    sweep: &SweepDecomposition,
    tie: &TieBreak,
    cap: usize,
) -> Result<SpinConfig> {
    let p = ConditionalProblem::new(inst, s, mask)?;
    Ok(solve_dp(&p, sweep, tie, cap)?.spins)
}

fn chimera_k(inst: &IsingInstance) -> Result<usize> {
    inst.chimera_k().ok_or_else(|| {
        Error::InvalidInstance("the heuristic needs an instance on a Chimera graph".into())
    })
}

/// The ordered collection of one outer pass.
pub fn outer_collection(w: usize, x: u8, y: usize, z: usize) -> Vec<SubsetSpec> {
    [x, 1 - x]
        .into_iter()
        .flat_map(|o| {
            (0..=w).map(move |t| SubsetSpec {
                w,
                orientation: o,
                i: (y + t) % (w + 1),
                j: z,
            })
        })
        .collect()
}

/// Cached subsets and sweeps for one instance.
pub struct Sampler<'a> {
    inst: &'a IsingInstance,
    k: usize,
    w: usize,
    cap: usize,
    tie: TieBreak,
    cache: HashMap<SubsetSpec, (Vec<bool>, SweepDecomposition)>,
}

impl<'a> Sampler<'a> {
    pub fn new(inst: &'a IsingInstance, w: usize, tie: TieBreak, cap: usize) -> Result<Self> {
        Ok(Self {
            inst,
            k: chimera_k(inst)?,
            w,
            cap,
            tie,
            cache: HashMap::new(),
        })
    }

    pub fn inner(&mut self, s: &SpinConfig, spec: &SubsetSpec) -> Result<SpinConfig> {
        let (inst, k) = (self.inst, self.k);
        let cap = self.cap;
        let (mask, sweep) = self
            .cache
            .entry(*spec)
            .or_insert_with(|| subset_sweep(inst, k, spec, cap));
        inner_with(inst, s, mask, sweep, &self.tie, self.cap)
    }

    /// One outer pass. Returns the final configuration and the energy after
    /// every inner call; stops early (with a shorter list) past `deadline`.
    pub fn outer(
        &mut self,
        s: &SpinConfig,
        rng: &mut PortableRng,
        deadline: Option<Instant>,
    ) -> Result<(SpinConfig, Vec<i64>)> {
        let x = rng.index(2) as u8;
        let y = rng.index(self.w + 1);
        let z = rng.index(self.k);
        let mut cur = s.clone();
        let mut energies = Vec::with_capacity(2 * (self.w + 1));
        for spec in outer_collection(self.w, x, y, z) {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break;
            }
            cur = self.inner(&cur, &spec)?;
            energies.push(self.inst.energy(&cur)?);
        }
        Ok((cur, energies))
    }

    fn random_config(&self, rng: &mut PortableRng) -> SpinConfig {
        let spins = (0..self.inst.len())
            .map(|i| {
                let draw = if rng.coin() { 1 } else { -1 };
                if self.inst.is_active(i) {
                    draw
                } else {
                    1
                }
            })
            .collect();
        SpinConfig::new(spins).expect("spins are ±1")
    }

    fn perturb(&self, s: &SpinConfig, frac: f64, rng: &mut PortableRng) -> SpinConfig {
        let cells = self.k * self.k;
        let count = ((frac * cells as f64).ceil() as usize).clamp(1, cells);
        let mut out = s.clone();
        for cell in rng.sample_distinct(cells, count) {
            let (r, c) = (cell / self.k, cell % self.k);
            for side in [crate::chimera::Side::Left, crate::chimera::Side::Right] {
                for u in 0..4 {
                    let v = ChimeraCoord::new(r, c, side, u).index(self.k);
                    if self.inst.is_active(v) {
                        out.set(v, rng.coin());
                    }
                }
            }
        }
        out
    }
}

/// One seeded run of the heuristic.
pub fn run_heuristic(inst: &IsingInstance, cfg: &HeuristicConfig) -> Result<HeuristicRun> {
    run_until(inst, cfg, Instant::now() + cfg.time_limit)
}

fn run_until(
    inst: &IsingInstance,
    cfg: &HeuristicConfig,
    deadline: Instant,
) -> Result<HeuristicRun> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rng = PortableRng::new(cfg.seed);
    let tie = TieBreak::random(inst.len(), &mut rng);
    let mut sampler = Sampler::new(inst, cfg.w, tie, cfg.width_cap)?;
    let mut cur = sampler.random_config(&mut rng);
    let mut best_e = inst.energy(&cur)?;
    let mut best = cur.clone();
    let ms = |t: Instant| t.duration_since(start).as_secs_f64() * 1e3;
    let mut improvements = vec![TracePoint {
        elapsed_ms: ms(Instant::now()),
        pass: 0,
        energy: best_e,
    }];
    let mut pass_best = Vec::new();
    let mut violations = 0;
    let mut passes = 0;
    let reached = |e: i64| cfg.target.is_some_and(|t| e <= t);

    while Instant::now() < deadline && cfg.max_passes.is_none_or(|m| passes < m) && !reached(best_e)
    {
        let before = inst.energy(&cur)?;
        let (next, energies) = sampler.outer(&cur, &mut rng, Some(deadline))?;
        let mut prev = before;
        for &e in &energies {
            violations += usize::from(e > prev);
            prev = e;
        }
        passes += 1;
        let e = prev;
        if e < best_e {
            best_e = e;
            best = next.clone();
            improvements.push(TracePoint {
                elapsed_ms: ms(Instant::now()),
                pass: passes,
                energy: e,
            });
        }
        pass_best.push(best_e);
        cur = match cfg.restart {
            RestartPolicy::Perturb => sampler.perturb(&best, cfg.perturb_frac, &mut rng),
            RestartPolicy::Fresh => sampler.random_config(&mut rng),
        };
    }
    Ok(HeuristicRun {
        seed: cfg.seed,
        energy: best_e,
        spins: best,
        passes,
        pass_best,
        improvements,
        monotonicity_violations: violations,
        elapsed_ms: ms(Instant::now()),
    })
}

/// Independent runs, one per seed, sharing one wall-clock window.
#[derive(Clone, Debug)]
pub struct ParallelOutcome {
    /// Runs in seed order.
    pub runs: Vec<HeuristicRun>,
    /// Index into `runs` of the best run (lowest energy, earliest seed on ties).
    pub best: usize,
}

impl ParallelOutcome {
    pub fn best_run(&self) -> &HeuristicRun {
        &self.runs[self.best]
    }

    /// Runs that reached `target` (or the best energy when `None`).
    pub fn tally(&self, target: Option<i64>) -> SuccessTally {
        let goal = target.unwrap_or(self.best_run().energy);
        SuccessTally {
            runs: self.runs.len(),
            hits: self.runs.iter().filter(|r| r.energy <= goal).count(),
        }
    }

    pub fn report(&self, scale: i64) -> SolveReport {
        let best = self.best_run();
        let mut r = SolveReport::heuristic("selby", best.energy, scale, best.spins.clone());
        r.success = Some(self.tally(None));
        r.meta.elapsed_ms = self.runs.iter().map(|r| r.elapsed_ms).fold(0.0, f64::max);
        r
    }
}

/// Runs `cfg` once per seed on up to `workers` threads. Every run gets the
/// full `cfg.time_limit`, counted from its own start.
pub fn run_parallel(
    inst: &IsingInstance,
    cfg: &HeuristicConfig,
    seeds: &[u64],
    workers: usize,
) -> Result<ParallelOutcome> {
    if seeds.is_empty() {
        return Err(Error::OutOfRange("at least one seed is required".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<HeuristicRun>>>> =
        Mutex::new((0..seeds.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, seeds.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= seeds.len() {
                    break;
                }
                let run_cfg = HeuristicConfig {
                    seed: seeds[i],
                    ..cfg.clone()
                };
                let out = run_heuristic(inst, &run_cfg);
                results.lock().expect("no poisoned lock")[i] = Some(out);
            });
        }
    });
    let runs: Vec<HeuristicRun> = results
        .into_inner()
        .expect("no poisoned lock")
        .into_iter()
        .map(|r| r.expect("every seed ran"))
        .collect::<Result<_>>()?;
    let best = (0..runs.len())
        .min_by_key(|&i| (runs[i].energy, i))
        .expect("non-empty");
    Ok(ParallelOutcome { runs, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{ChimeraGraph, FaultList};
    use crate::exact::{brute_force_min, solve_exact};
    use crate::ising::IsingBuilder;

    fn random_chimera(seed: u64, k: usize) -> IsingInstance {
        let mut rng = PortableRng::new(seed);
        let g = ChimeraGraph::build(k, &FaultList::new(), false).unwrap();
        let mut b = IsingBuilder::chimera(&g, 10);
        for (x, y) in g.couplers() {
            b.coupling(x, y, rng.range_inclusive(-10, 10)).unwrap();
        }
        for i in 0..g.qubit_slots() {
            b.field(i, rng.range_inclusive(-10, 10)).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn collection_shape_and_cover() {
        let c = outer_collection(3, 1, 2, 0);
        assert_eq!(c.len(), 8);
        assert_eq!(c[0].orientation, 1);
        assert_eq!(c[4].orientation, 0);
        assert_eq!(
            c.iter().map(|s| s.i).collect::<Vec<_>>(),
            vec![2, 3, 0, 1, 2, 3, 0, 1]
        );
        let k = 4;
        let working = vec![true; 8 * k * k];
        for x in 0..2 {
            for y in 0..=3 {
                for z in 0..k {
                    let mut union = vec![false; 8 * k * k];
                    for spec in outer_collection(3, x, y, z) {
                        for (u, m) in union.iter_mut().zip(spec.mask(k, &working)) {
                            *u |= m;
                        }
                    }
                    assert!(union.iter().all(|&u| u));
                }
            }
        }
    }

    #[test]
    fn inner_never_worsens_and_full_subset_is_exact() {
        let inst = random_chimera(3, 2);
        let mut rng = PortableRng::new(1);
        let tie = TieBreak::random(inst.len(), &mut rng);
        let (opt, _) = brute_force_min(&inst, 24).unwrap();
        for _ in 0..10 {
            let s = SpinConfig::new(crate::testutil::random_spins(&mut rng, inst.len())).unwrap();
            for spec in outer_collection(1, 0, 0, 1) {
                let t = inner(&inst, &s, &spec, &tie).unwrap();
                assert!(inst.energy(&t).unwrap() <= inst.energy(&s).unwrap());
            }
            // w >= k removes nothing: the subset is the whole graph
            let all = SubsetSpec::new(2, 3, 0, 3, 0).unwrap();
            let t = inner(&inst, &s, &all, &tie).unwrap();
            assert_eq!(inst.energy(&t).unwrap(), opt);
        }
    }

    #[test]
    fn inner_matches_fold_then_brute_force() {
        let inst = random_chimera(4, 2);
        let mut rng = PortableRng::new(2);
        let tie = TieBreak::all_up(inst.len());
        let spec = SubsetSpec::new(2, 1, 0, 0, 1).unwrap();
        let mask = spec.mask(2, inst.active_mask());
        for _ in 0..5 {
            let s = SpinConfig::new(crate::testutil::random_spins(&mut rng, inst.len())).unwrap();
            let t = inner(&inst, &s, &spec, &tie).unwrap();
            let p = ConditionalProblem::new(&inst, &s, &mask).unwrap();
            let (e, _) = brute_force_min(&p.to_instance(), 24).unwrap();
            assert_eq!(inst.energy(&t).unwrap(), e + p.exterior_energy());
        }
    }

    #[test]
    fn zero_instance_and_zero_budget() {
        let inst = IsingBuilder::chimera_k(2, 10).build().unwrap();
        let run = run_heuristic(
            &inst,
            &HeuristicConfig {
                time_limit: Duration::from_secs(1),
                max_passes: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(run.energy, 0);

        let inst = random_chimera(5, 2);
        let cfg = HeuristicConfig {
            time_limit: Duration::ZERO,
            ..Default::default()
        };
        let run = run_heuristic(&inst, &cfg).unwrap();
        assert_eq!(run.passes, 0);
        assert_eq!(inst.energy(&run.spins).unwrap(), run.energy);
    }

    #[test]
    fn finds_c2_optimum_and_is_deterministic() {
        let inst = random_chimera(6, 2);
        let exact = solve_exact(&inst, 20).unwrap().energy.unwrap();
        let cfg = HeuristicConfig {
            time_limit: Duration::from_secs(60),
            max_passes: Some(20),
            seed: 4711,
            ..Default::default()
        };
        let a = run_heuristic(&inst, &cfg).unwrap();
        let b = run_heuristic(&inst, &cfg).unwrap();
        assert_eq!(a.energy, exact);
        assert_eq!(a.spins, b.spins);
        assert_eq!(a.pass_best, b.pass_best);
        assert_eq!(a.monotonicity_violations, 0);
        assert!(a.pass_best.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn parallel_reduction() {
        let inst = random_chimera(7, 2);
        let cfg = HeuristicConfig {
            max_passes: Some(3),
            ..Default::default()
        };
        let out = run_parallel(&inst, &cfg, &[4711, 4712, 4713], 2).unwrap();
        assert_eq!(out.runs.len(), 3);
        assert_eq!(out.runs[1].seed, 4712);
        let min = out.runs.iter().map(|r| r.energy).min().unwrap();
        assert_eq!(out.best_run().energy, min);
        assert!(out.runs[..out.best].iter().all(|r| r.energy > min));
        let rep = out.report(10);
        assert!(rep.success.unwrap().hits >= 1);
    }

    #[test]
    fn c16_subsets_fit_the_cap() {
        let inst = random_chimera(5, 16);
        for x in 0..2 {
            for i in 0..=3 {
                for j in [0, 7, 15] {
                    let spec = SubsetSpec::new(16, 3, x, i, j).unwrap();
                    let (_, sweep) = subset_sweep(&inst, 16, &spec, DEFAULT_WIDTH_CAP);
                    assert!(sweep.width <= 4 * 3 + 8, "{spec:?}: {}", sweep.width);
                }
            }
        }
    }

    #[test]
    fn needs_chimera_topology() {
        let inst = IsingBuilder::general(3, 10).build().unwrap();
        assert!(run_heuristic(&inst, &HeuristicConfig::default()).is_err());
    }
}
