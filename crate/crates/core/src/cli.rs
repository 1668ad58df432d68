//! Command-line front end. `run` returns the process exit status: 0 on
//! success, 1 on a usage error, 2 when a solver or file operation fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    run_batch_with, run_solver, summarize, summary_csv, write_atomic, BenchConfig, BenchInstance,
    SolverKind,
};
use crate::chimera::{ChimeraGraph, FaultList};
use crate::error::{Error, Result};
use crate::format;
use crate::instances::{
    embed, generate, rebin, ChainCheck, CliqueEmbedding, EmbedOutcome, Family, FaultBase,
    FaultPolicy, Generated, GeneratorSpec,
};
use crate::ising::IsingInstance;
use crate::report::SolveReport;
use crate::selby::{run_parallel, HeuristicConfig, RestartPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "chimera-ising",
    version,
    about = "Ising ground states on Chimera graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Run solvers over a directory of instances and print the summary table.
    Bench(BenchArgs),
    /// Recompute the energy of a spin configuration.
    Verify(VerifyArgs),
    /// Write, check or apply a clique embedding.
    Embed(EmbedArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Restart {
    Perturb,
    Fresh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Integrity,
    Range,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// mgw, rfr, selby, mis, lga, k64-ising or k64-maxcut.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 4711)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// `none`, `machine`, or a fault-list file.
    #[arg(long, default_value = "machine")]
    pub faults: String,
    /// Total faulty qubits after random declarations.
    #[arg(long)]
    pub declared_faulty: Option<usize>,
    /// Logical edge probability (k64 families).
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, value_enum, default_value_t = CheckArg::Integrity)]
    pub chain_check: CheckArg,
    /// Also write the logical instance (k64 families).
    #[arg(long)]
    pub logical_out: Option<PathBuf>,
    /// Input file to re-bin (lga).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    /// Block width of the sampled subgraphs, in columns.
    #[arg(long, default_value_t = 3)]
    pub w: usize,
    /// Seed range `a..b` (inclusive), a list `a,b,c`, or one seed.
    #[arg(long, default_value = "4711..4718")]
    pub seeds: String,
    /// Wall-clock budget in seconds.
    #[arg(long, alias = "time", default_value_t = 30.0)]
    pub time_limit: f64,
    /// Fraction of cells randomized between passes.
    #[arg(long, default_value_t = 0.2)]
    pub perturb_frac: f64,
    #[arg(long, value_enum, default_value_t = Restart::Perturb)]
    pub restart: Restart,
    #[arg(long)]
    pub max_passes: Option<usize>,
    /// Stop a run once it reaches this energy (numerator over gamma).
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<i64>,
    #[arg(long, default_value_t = crate::exact::DEFAULT_WIDTH_CAP)]
    pub width_cap: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// Exact dynamic program (the default solver).
    #[arg(long, conflicts_with_all = ["brute", "selby"])]
    pub exact: bool,
    /// Exhaustive search (small instances only).
    #[arg(long, conflicts_with = "selby")]
    pub brute: bool,
    /// Subgraph-sampling heuristic over the given seeds.
    #[arg(long)]
    pub selby: bool,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    /// Per-pass trace of every heuristic run, as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the best spin configuration here.
    #[arg(long)]
    pub spins_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Keep wall-clock timings in the JSON output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `.ising` / `.maxcut` files named `<family>-<id>.<ext>`.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, default_value = "dp,selby")]
    pub solvers: String,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    /// Where to write one JSON record per instance.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    /// Spins as `+1 -1 ...` text or a JSON solve report.
    #[arg(long)]
    pub spins: PathBuf,
    /// Fail unless the recomputed energy equals this report's energy.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    /// Use this embedding file instead of the standard construction.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Check the embedding against this fault list.
    #[arg(long)]
    pub faults: Option<PathBuf>,
    /// Write the embedding file.
    #[arg(long)]
    pub write: Option<PathBuf>,
    /// Logical instance to embed (with `--out`) or to decode against (with `--decode`).
    #[arg(long)]
    pub logical: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CheckArg::Integrity)]
    pub chain_check: CheckArg,
    /// Physical spins to decode by majority vote.
    #[arg(long)]
    pub decode: Option<PathBuf>,
}

/// Parse and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Run(Error::io("<stdout>", e)))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Solve(a) => solve(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Embed(a) => embed_cmd(a, out),
    }
}

/// `a..b` (inclusive), `a,b,c` or `a`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("--seeds: cannot parse `{s}`");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(format!("--seeds: empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

fn heuristic_config(a: &HeuristicArgs) -> Result<(HeuristicConfig, Vec<u64>), Failure> {
    let seeds = parse_seeds(&a.seeds).map_err(usage)?;
    if !(a.time_limit.is_finite() && a.time_limit >= 0.0) {
        return Err(usage(format!(
            "--time-limit: {} is not a duration in seconds",
            a.time_limit
        )));
    }
    let cfg = HeuristicConfig {
        w: a.w,
        perturb_frac: a.perturb_frac,
        restart: match a.restart {
            Restart::Perturb => RestartPolicy::Perturb,
            Restart::Fresh => RestartPolicy::Fresh,
        },
        time_limit: Duration::from_secs_f64(a.time_limit),
        max_passes: a.max_passes,
        target: a.target,
        seed: seeds[0],
        width_cap: a.width_cap,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok((cfg, seeds))
}

fn chain_check(c: CheckArg) -> ChainCheck {
    match c {
        CheckArg::Integrity => ChainCheck::Integrity,
        CheckArg::Range => ChainCheck::Range,
    }
}

#[derive(Serialize)]
struct GenStatus<'a> {
    status: &'a str,
    family: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<i64>,
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let family: Family = a
        .family
        .parse()
        .map_err(|e: Error| usage(format!("--family: {e}")))?;
    if family == Family::Lga {
        let input = a.input.ok_or_else(|| usage("--family lga needs --input"))?;
        let inst = rebin(&format::read_ising(&input)?, crate::instances::GAMMA)?;
        format::write_ising(&a.out, &inst)?;
        return status(out, "written", family, a.seed, Some(&a.out), None, None);
    }
    let k = a.k.unwrap_or(if family.is_embedded() { 16 } else { 8 });
    let base = match a.faults.as_str() {
        "none" => FaultBase::None,
        "machine" => FaultBase::Machine,
        path => FaultBase::List(FaultList::read(Path::new(path))?),
    };
    let spec = GeneratorSpec {
        family,
        k,
        seed: a.seed,
        faults: FaultPolicy {
            base,
            declared_total: a.declared_faulty,
        },
        density: a.density.or(family.default_density()),
        chain_check: chain_check(a.chain_check),
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    match generate(&spec)? {
        Generated::Instance(inst) => {
            format::write_ising(&a.out, &inst)?;
            status(out, "written", family, a.seed, Some(&a.out), None, None)
        }
        Generated::Embedded(e) => {
            format::write_ising(&a.out, &e.physical)?;
            if let Some(p) = &a.logical_out {
                format::write_ising(p, &e.logical)?;
            }
            status(
                out,
                "written",
                family,
                a.seed,
                Some(&a.out),
                None,
                Some(e.offset),
            )
        }
        Generated::Rejected { reason } => {
            status(out, "rejected", family, a.seed, None, Some(reason), None)
        }
    }
}

fn status(
    out: &mut dyn Write,
    status: &str,
    family: Family,
    seed: u64,
    path: Option<&Path>,
    reason: Option<String>,
    offset: Option<i64>,
) -> Result<(), Failure> {
    let s = GenStatus {
        status,
        family: family.to_string(),
        seed,
        out: path.map(|p| p.display().to_string()),
        reason,
        offset,
    };
    emit(
        out,
        &(serde_json::to_string(&s).expect("status serializes") + "\n"),
    )
}

fn report_text(r: &SolveReport, fmt: OutputFormat, timings: bool) -> Result<String> {
    Ok(match fmt {
        OutputFormat::Json if timings => {
            serde_json::to_string_pretty(r).expect("report serializes") + "\n"
        }
        OutputFormat::Json => r.canonical_json() + "\n",
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::OutOfRange(format!("csv: {e}"));
            w.write_record([
                "solver",
                "status",
                "energy",
                "gamma",
                "energy_value",
                "lower_bound",
            ])
            .map_err(csv_err)?;
            let status = serde_json::to_value(r.status).expect("status serializes");
            w.write_record([
                r.solver.clone(),
                status.as_str().unwrap_or_default().to_string(),
                r.energy.map(|e| e.to_string()).unwrap_or_default(),
                r.gamma.to_string(),
                r.energy_value().map(|e| format!("{e}")).unwrap_or_default(),
                r.lower_bound.map(|e| e.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
            String::from_utf8(
                w.into_inner()
                    .map_err(|e| Error::OutOfRange(format!("csv: {e}")))?,
            )
            .expect("csv output is utf-8")
        }
    })
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (hcfg, seeds) = heuristic_config(&a.heuristic)?;
    let inst = format::read_ising(&a.instance)?;
    let cfg = BenchConfig {
        heuristic: hcfg.clone(),
        seeds: seeds.clone(),
        run_workers: a.heuristic.workers,
        width_cap: a.heuristic.width_cap,
        ..BenchConfig::default()
    };
    let report = if a.selby {
        let outcome = run_parallel(&inst, &hcfg, &seeds, a.heuristic.workers)?;
        if let Some(path) = &a.trace {
            let text = serde_json::to_string_pretty(&outcome.runs).expect("runs serialize");
            format::write_string(path, &(text + "\n"))?;
        }
        outcome.report(inst.scale())
    } else {
        if a.trace.is_some() {
            return Err(usage("--trace applies to --selby only"));
        }
        let solver = if a.brute {
            SolverKind::Brute
        } else {
            SolverKind::Dp
        };
        run_solver(&inst, solver, &cfg)
    };
    if let Some(msg) = report
        .message
        .as_ref()
        .filter(|_| report.status == crate::report::Status::Error)
    {
        return Err(Failure::Run(Error::InvalidInstance(msg.clone())));
    }
    if let (Some(path), Some(s)) = (&a.spins_out, &report.spins) {
        format::write_string(path, &format::spins_to_string(s))?;
    }
    let text = report_text(&report, a.format, a.timings)?;
    match &a.out {
        Some(path) => format::write_string(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(())
}

/// Family label of `<family>-<id>.<ext>`: everything before the last `-`.
fn family_label(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.rsplit_once('-') {
        Some((family, _)) if !family.is_empty() => family.to_string(),
        _ => stem,
    }
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let solvers = a
        .solvers
        .split(',')
        .map(|s| s.trim().parse::<SolverKind>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| usage(format!("--solvers: {e}")))?;
    let (hcfg, seeds) = heuristic_config(&a.heuristic)?;
    let entries = std::fs::read_dir(&a.dir).map_err(|e| Error::io(&a.dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|x| x.to_str()),
                Some("ising" | "maxcut")
            )
        })
        .collect();
    paths.sort();
    let mut instances = Vec::with_capacity(paths.len());
    for p in &paths {
        instances.push(BenchInstance {
            id: p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            family: family_label(p),
            instance: format::read_ising(p)?,
            reference: None,
        });
    }
    let cfg = BenchConfig {
        solvers,
        heuristic: hcfg,
        seeds,
        workers: a.heuristic.workers,
        run_workers: 1,
        width_cap: a.heuristic.width_cap,
        ..BenchConfig::default()
    };
    if let Some(dir) = &a.records {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let write_errors = std::sync::Mutex::new(Vec::new());
    let records = run_batch_with(&instances, &cfg, |r| {
        if let Some(dir) = &a.records {
            if let Err(e) = write_atomic(
                &dir.join(format!("{}.json", r.id)),
                &(r.canonical_json() + "\n"),
            ) {
                write_errors
                    .lock()
                    .unwrap_or_else(|e| e.into_inner())
                    .push(e);
            }
        }
    });
    if let Some(e) = write_errors
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .next()
    {
        return Err(e.into());
    }
    let rows = summarize(&records);
    let text = match a.format {
        OutputFormat::Csv => summary_csv(&rows)?,
        OutputFormat::Json => {
            serde_json::to_string_pretty(&rows).expect("summary serializes") + "\n"
        }
    };
    match &a.out {
        Some(path) => format::write_string(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyResult {
    energy: i64,
    gamma: i64,
    energy_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches_report: Option<bool>,
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let inst: IsingInstance = format::read_ising(&a.instance)?;
    let spins = format::read_spins(&a.spins)?;
    let energy = inst.energy(&spins)?;
    let claimed = match &a.report {
        Some(p) => {
            let text = format::read_to_string(p)?;
            let r: SolveReport = serde_json::from_str(&text)
                .map_err(|e| Error::parse(p, e.line(), e.to_string()))?;
            Some(
                r.energy
                    .ok_or_else(|| Error::parse(p, 1, "report carries no energy"))?,
            )
        }
        None => None,
    };
    let res = VerifyResult {
        energy,
        gamma: inst.scale(),
        energy_value: energy as f64 / inst.scale() as f64,
        matches_report: claimed.map(|c| c == energy),
    };
    emit(
        out,
        &(serde_json::to_string(&res).expect("result serializes") + "\n"),
    )?;
    match claimed {
        Some(c) if c != energy => Err(Failure::Run(Error::InvalidInstance(format!(
            "recomputed energy {energy} differs from the reported {c}"
        )))),
        _ => Ok(()),
    }
}

fn embed_cmd(a: EmbedArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let embedding = match &a.embedding {
        Some(p) => CliqueEmbedding::read(p)?,
        None => CliqueEmbedding::standard(a.k).map_err(|e| usage(e.to_string()))?,
    };
    let faults = match &a.faults {
        Some(p) => FaultList::read(p)?,
        None => FaultList::new(),
    };
    let graph = ChimeraGraph::build(embedding.k(), &faults, false)?;
    let layout = embedding.layout(&graph)?;
    if let Some(p) = &a.write {
        embedding.write(p)?;
    }
    let logical = a.logical.as_deref().map(format::read_ising).transpose()?;
    let mut summary = serde_json::json!({
        "k": embedding.k(),
        "logical_nodes": embedding.logical_count(),
        "covered_pairs": layout.couplers.len(),
        "chain_lengths": embedding.chains().iter().map(Vec::len).collect::<std::collections::BTreeSet<_>>(),
    });
    if let Some(p) = &a.out {
        let logical = logical
            .as_ref()
            .ok_or_else(|| usage("--out needs --logical"))?;
        match embed(logical, &embedding, &graph, chain_check(a.chain_check))? {
            EmbedOutcome::Embedded(e) => {
                format::write_ising(p, &e.physical)?;
                summary["status"] = "written".into();
                summary["offset"] = e.offset.into();
            }
            EmbedOutcome::Rejected { reason } => {
                summary["status"] = "rejected".into();
                summary["reason"] = reason.into();
            }
        }
    }
    if let Some(p) = &a.decode {
        let physical = format::read_spins(p)?;
        let s = embedding.decode(&physical)?;
        summary["decoded"] = format::spins_to_string(&s).trim_end().into();
        if let Some(l) = &logical {
            summary["logical_energy"] = l.energy(&s)?.into();
        }
    }
    emit(
        out,
        &(serde_json::to_string(&summary).expect("summary serializes") + "\n"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("chimera-ising").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn seeds_parse() {
        assert_eq!(
            parse_seeds("4711..4714").unwrap(),
            vec![4711, 4712, 4713, 4714]
        );
        assert_eq!(parse_seeds("3,1").unwrap(), vec![3, 1]);
        assert_eq!(parse_seeds("9").unwrap(), vec![9]);
        assert!(parse_seeds("5..2").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn family_labels() {
        assert_eq!(family_label(Path::new("d/rfr-7.ising")), "rfr");
        assert_eq!(family_label(Path::new("k64-maxcut-3.ising")), "k64-maxcut");
        assert_eq!(family_label(Path::new("plain.ising")), "plain");
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run_str(&["frobnicate"]).0, 1);
        assert_eq!(
            run_str(&["gen", "--family", "rfr", "--out", "x", "--bogus"]).0,
            1
        );
        let (code, _, err) = run_str(&["gen", "--family", "nope", "--out", "x"]);
        assert_eq!(code, 1);
        assert!(err.contains("--family"));
        let (code, _, err) = run_str(&["solve", "a.ising", "--seeds", "9..1", "--selby"]);
        assert_eq!(code, 1);
        assert!(err.contains("--seeds"));
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_str(&["solve", "/nonexistent/a.ising"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/a.ising"));
    }

    #[test]
    fn embed_reports_coverage() {
        let (code, out, _) = run_str(&["embed", "--k", "16"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["covered_pairs"], 2016);
        assert_eq!(v["chain_lengths"], serde_json::json!([17]));
    }
}
