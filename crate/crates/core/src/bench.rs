//! Benchmark harness: solver runs over instance batches, gaps to the best
//! known energy, time-to-solution, and the per-family summary table.
//!
//! Summary CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `family` | family label of the instances |
//! | `instances` | number of records |
//! | `nodes_min`, `nodes_max`, `nodes_avg` | MaxCut node count (spins plus field node) |
//! | `edges_min`, `edges_max`, `edges_avg` | MaxCut edge count (couplings plus nonzero fields) |
//! | `opt_known` | records where some solver proved optimality |
//! | `best_<solver>` | records where the solver reached the best known energy |
//! | `gap_max_<solver>`, `gap_avg_<solver>` | relative gap in percent over records with a nonzero best |
//!
//! Per-instance JSON records carry `"schema": 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{brute_force_min, solve_exact, DEFAULT_BRUTE_CAP, DEFAULT_WIDTH_CAP};
use crate::ising::IsingInstance;
use crate::report::{SolveReport, Status};
use crate::selby::{run_parallel, HeuristicConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Time to reach a solution with 99% certainty, in the unit of `t_anneal`.
///
/// `p = 1` gives `t_anneal` (one anneal suffices); `p = 0` gives infinity.
pub fn t99(p: f64, t_anneal: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "success probability {p} is not in [0, 1]"
        )));
    }
    Ok(if p == 0.0 {
        f64::INFINITY
    } else if p == 1.0 {
        t_anneal
    } else {
        0.01f64.ln() / (1.0 - p).ln() * t_anneal
    })
}

/// Fraction of runs whose energy is within `tolerance_pct` percent of `best`
/// (exactly `best` when the tolerance is zero).
pub fn success_probability(energies: &[i64], best: i64, tolerance_pct: f64) -> f64 {
    if energies.is_empty() {
        return 0.0;
    }
    let slack = tolerance_pct / 100.0 * best.abs() as f64;
    let hits = energies
        .iter()
        .filter(|&&e| (e - best) as f64 <= slack)
        .count();
    hits as f64 / energies.len() as f64
}

/// Distance of an energy from the best known one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Gap {
    /// `100 (E - E_best) / |E_best|`.
    Percent(f64),
    /// `E - E_best` in energy units, used when `E_best = 0`.
    Absolute(f64),
}

impl Gap {
    pub fn percent(self) -> Option<f64> {
        match self {
            Gap::Percent(p) => Some(p),
            Gap::Absolute(_) => None,
        }
    }
}

/// Gap of `report` to `best` (numerators over the report's gamma).
pub fn gap(report: &SolveReport, best: i64) -> Option<Gap> {
    let e = report.energy.filter(|_| report.has_energy())?;
    let diff = e - best;
    Some(if best == 0 {
        Gap::Absolute(diff as f64 / report.gamma as f64)
    } else {
        Gap::Percent(100.0 * diff as f64 / best.abs() as f64)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Brute,
    Dp,
    Selby,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Brute => "brute",
            SolverKind::Dp => "dp",
            SolverKind::Selby => "selby",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" | "brute_force" => Ok(SolverKind::Brute),
            "dp" | "solve_dp" | "exact" => Ok(SolverKind::Dp),
            "selby" => Ok(SolverKind::Selby),
            _ => Err(Error::OutOfRange(format!("unknown solver `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub solvers: Vec<SolverKind>,
    /// Heuristic settings; its time limit is the per-instance budget.
    pub heuristic: HeuristicConfig,
    /// One heuristic run per seed.
    pub seeds: Vec<u64>,
    /// Instances solved concurrently.
    pub workers: usize,
    /// Heuristic runs per instance solved concurrently.
    pub run_workers: usize,
    pub width_cap: usize,
    pub brute_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solvers: vec![SolverKind::Dp, SolverKind::Selby],
            heuristic: HeuristicConfig::default(),
            seeds: (4711..4719).collect(),
            workers: 1,
            run_workers: 1,
            width_cap: DEFAULT_WIDTH_CAP,
            brute_cap: DEFAULT_BRUTE_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub id: String,
    pub family: String,
    pub instance: IsingInstance,
    /// Energy numerators known from elsewhere, e.g. an earlier run.
    pub reference: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub schema: u32,
    pub id: String,
    pub family: String,
    pub nodes: usize,
    pub edges: usize,
    pub gamma: i64,
    pub reports: Vec<SolveReport>,
    pub reference: Option<i64>,
    /// Minimum over all solver energies and the reference.
    pub best: Option<i64>,
    pub opt_known: bool,
    /// One entry per report, same order.
    pub gaps: Vec<Option<Gap>>,
    /// Set when the batch quarantined this instance after a solver crash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarantined: Option<String>,
}

impl BenchRecord {
    fn new(inst: &BenchInstance, reports: Vec<SolveReport>, quarantined: Option<String>) -> Self {
        let (nodes, edges) = inst.instance.maxcut_size();
        let best = reports
            .iter()
            .filter(|r| r.has_energy())
            .filter_map(|r| r.energy)
            .chain(inst.reference)
            .min();
        let gaps = reports
            .iter()
            .map(|r| best.and_then(|b| gap(r, b)))
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            id: inst.id.clone(),
            family: inst.family.clone(),
            nodes,
            edges,
            gamma: inst.instance.scale(),
            opt_known: reports.iter().any(|r| r.status == Status::Optimal),
            reports,
            reference: inst.reference,
            best,
            gaps,
            quarantined,
        }
    }

    pub fn report(&self, solver: &str) -> Option<(&SolveReport, Option<Gap>)> {
        let i = self.reports.iter().position(|r| r.solver == solver)?;
        Some((&self.reports[i], self.gaps[i]))
    }

    /// JSON without timings, so equal runs give equal text.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        if let Some(reports) = v.get_mut("reports").and_then(|r| r.as_array_mut()) {
            for r in reports {
                if let Some(obj) = r.as_object_mut() {
                    obj.remove("meta");
                }
            }
        }
        serde_json::to_string_pretty(&v).expect("record serializes")
    }
}

/// One solver on one instance. Solver errors become `error` reports.
pub fn run_solver(inst: &IsingInstance, solver: SolverKind, cfg: &BenchConfig) -> SolveReport {
    let start = Instant::now();
    let gamma = inst.scale();
    let out = match solver {
        SolverKind::Brute => match brute_force_min(inst, cfg.brute_cap) {
            Ok((e, s)) => Ok(SolveReport::optimal("brute", e, gamma, s)),
            Err(e @ Error::AboveCap { .. }) => {
                Ok(SolveReport::capped("brute", gamma, e.to_string()))
            }
            Err(e) => Err(e),
        },
        SolverKind::Dp => solve_exact(inst, cfg.width_cap),
        SolverKind::Selby => {
            run_parallel(inst, &cfg.heuristic, &cfg.seeds, cfg.run_workers).map(|o| o.report(gamma))
        }
    };
    match out {
        Ok(r) => r,
        Err(e) => SolveReport::error(solver.name(), gamma, e.to_string()),
    }
    .with_elapsed(start.elapsed())
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "solver panicked".into())
}

/// Run every solver on every instance, up to `cfg.workers` instances at a time.
///
/// Records come back in input order. A panicking solver quarantines its
/// instance's record and the batch carries on.
pub fn run_batch(instances: &[BenchInstance], cfg: &BenchConfig) -> Vec<BenchRecord> {
    run_batch_with(instances, cfg, |_| {})
}

/// [`run_batch`] with a callback invoked on every finished record, e.g. to
/// persist it immediately.
pub fn run_batch_with(
    instances: &[BenchInstance],
    cfg: &BenchConfig,
    on_record: impl Fn(&BenchRecord) + Sync,
) -> Vec<BenchRecord> {
    batch(instances, cfg, &run_solver, &on_record)
}

type SolveFn<'a> = dyn Fn(&IsingInstance, SolverKind, &BenchConfig) -> SolveReport + Sync + 'a;

fn batch(
    instances: &[BenchInstance],
    cfg: &BenchConfig,
    solve: &SolveFn<'_>,
    on_record: &(dyn Fn(&BenchRecord) + Sync),
) -> Vec<BenchRecord> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<BenchRecord>>> = Mutex::new(vec![None; instances.len()]);
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.clamp(1, instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(bi) = instances.get(i) else { break };
                let mut reports = Vec::new();
                let mut quarantined = None;
                for &solver in &cfg.solvers {
                    match catch_unwind(AssertUnwindSafe(|| solve(&bi.instance, solver, cfg))) {
                        Ok(r) => reports.push(r),
                        Err(payload) => {
                            let msg = format!("{solver}: {}", panic_message(payload));
                            reports.push(SolveReport::error(
                                solver.name(),
                                bi.instance.scale(),
                                msg.clone(),
                            ));
                            quarantined = Some(msg);
                            break;
                        }
                    }
                }
                let record = BenchRecord::new(bi, reports, quarantined);
                on_record(&record);
                slots.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: String,
    pub best: usize,
    pub gap_max: Option<f64>,
    pub gap_avg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub instances: usize,
    pub nodes: (usize, usize, f64),
    pub edges: (usize, usize, f64),
    pub opt_known: usize,
    pub solvers: Vec<SolverSummary>,
}

fn min_max_avg(v: impl Iterator<Item = usize> + Clone) -> (usize, usize, f64) {
    let n = v.clone().count();
    if n == 0 {
        return (0, 0, 0.0);
    }
    let sum: usize = v.clone().sum();
    (
        v.clone().min().unwrap_or(0),
        v.max().unwrap_or(0),
        sum as f64 / n as f64,
    )
}

/// One row per family, families in name order, solvers in first-seen order.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut by_family: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_family.entry(&r.family).or_default().push(r);
    }
    let mut solvers: Vec<&str> = Vec::new();
    for r in records {
        for rep in &r.reports {
            if !solvers.contains(&rep.solver.as_str()) {
                solvers.push(&rep.solver);
            }
        }
    }
    by_family
        .into_iter()
        .map(|(family, recs)| {
            let per_solver = solvers
                .iter()
                .map(|&s| {
                    let mut best = 0;
                    let mut gaps = Vec::new();
                    for r in &recs {
                        if let Some((rep, g)) = r.report(s) {
                            if rep.has_energy() && rep.energy == r.best {
                                best += 1;
                            }
                            gaps.extend(g.and_then(Gap::percent));
                        }
                    }
                    SolverSummary {
                        solver: s.to_string(),
                        best,
                        gap_max: gaps.iter().copied().reduce(f64::max),
                        gap_avg: (!gaps.is_empty())
                            .then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
                    }
                })
                .collect();
            SummaryRow {
                family: family.to_string(),
                instances: recs.len(),
                nodes: min_max_avg(recs.iter().map(|r| r.nodes)),
                edges: min_max_avg(recs.iter().map(|r| r.edges)),
                opt_known: recs.iter().filter(|r| r.opt_known).count(),
                solvers: per_solver,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

/// The summary as CSV text with the columns documented at the top of this module.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let solvers: Vec<&str> = rows
        .first()
        .map(|r| r.solvers.iter().map(|s| s.solver.as_str()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = [
        "family",
        "instances",
        "nodes_min",
        "nodes_max",
        "nodes_avg",
        "edges_min",
        "edges_max",
        "edges_avg",
        "opt_known",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for s in &solvers {
        header.push(format!("best_{s}"));
    }
    for s in &solvers {
        header.push(format!("gap_max_{s}"));
        header.push(format!("gap_avg_{s}"));
    }
    let csv_err = |e: csv::Error| Error::OutOfRange(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.family.clone(),
            r.instances.to_string(),
            r.nodes.0.to_string(),
            r.nodes.1.to_string(),
            format!("{:.1}", r.nodes.2),
            r.edges.0.to_string(),
            r.edges.1.to_string(),
            format!("{:.1}", r.edges.2),
            r.opt_known.to_string(),
        ];
        rec.extend(r.solvers.iter().map(|s| s.best.to_string()));
        for s in &r.solvers {
            rec.push(opt(s.gap_max));
            rec.push(opt(s.gap_avg));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::OutOfRange(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write `text` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Default wall-clock budget per instance.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(30);
