use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;

use chimera_ising::exact::{
    brute_force_min, build_sweep, solve_dp, solve_exact, ConditionalProblem, SweepHint, TieBreak,
};
use chimera_ising::format;
use chimera_ising::instances::{gen_rfr, ChainCheck, CliqueEmbedding, FaultPolicy};
use chimera_ising::transforms::{ising_to_maxcut, maxcut_to_ising, preprocess_dominated_fields};
use chimera_ising::{ChimeraGraph, FaultList, IsingBuilder, IsingInstance, PortableRng};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chimera-ising"))
}

#[test]
fn rng_matches_reference_vector() {
    let text = std::fs::read_to_string(data("portable_rng_4711.txt")).unwrap();
    let want: Vec<u64> = text.lines().map(|l| l.trim().parse().unwrap()).collect();
    assert_eq!(want.len(), 1000);
    let mut rng = PortableRng::new(4711);
    let got: Vec<u64> = (0..1000).map(|_| rng.next_u64()).collect();
    assert_eq!(got, want);
}

#[test]
fn rfr_matches_reference_generator() {
    let want = std::fs::read_to_string(data("rfr_c2_s7.ising")).unwrap();
    let inst = gen_rfr(2, &FaultPolicy::none(), 7).unwrap();
    assert_eq!(format::ising_to_string(&inst), want);
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// gen, solve and bench in `dir`; returns every primary output.
fn pipeline(dir: &Path) -> Vec<(String, String)> {
    let inst_dir = dir.join("instances");
    std::fs::create_dir_all(&inst_dir).unwrap();
    for (family, seed) in [("rfr", 7), ("mgw", 8), ("selby", 9), ("mis", 10)] {
        let path = inst_dir.join(format!("{family}-{seed}.ising"));
        run_ok(
            bin()
                .args([
                    "gen",
                    "--family",
                    family,
                    "--k",
                    "2",
                    "--seed",
                    &seed.to_string(),
                    "--out",
                ])
                .arg(&path),
        );
    }
    let report = run_ok(
        bin()
            .args(["solve", "--exact"])
            .arg(inst_dir.join("rfr-7.ising")),
    );
    let heuristic = run_ok(
        bin()
            .args(["solve", "--selby", "--seeds", "1..2", "--max-passes", "2"])
            .arg(inst_dir.join("rfr-7.ising")),
    );
    let summary = run_ok(
        bin()
            .args([
                "bench",
                "--solvers",
                "dp,brute,selby",
                "--seeds",
                "1..2",
                "--max-passes",
                "2",
                "--dir",
            ])
            .arg(&inst_dir),
    );
    let mut files: Vec<(String, String)> = std::fs::read_dir(&inst_dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files.push(("report".into(), report));
    files.push(("heuristic".into(), heuristic));
    files.push(("summary".into(), summary));
    files
}

#[test]
fn pipeline_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let x = pipeline(a.path());
    let y = pipeline(b.path());
    assert_eq!(x, y);
    let report: serde_json::Value =
        serde_json::from_str(&x.iter().find(|(n, _)| n == "report").unwrap().1).unwrap();
    assert_eq!(report["status"], "optimal");
    let summary = &x.iter().find(|(n, _)| n == "summary").unwrap().1;
    assert!(summary.starts_with("family,instances,nodes_min"));
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn verify_recomputes_the_reported_energy() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("a.ising");
    let rep = dir.path().join("r.json");
    let spins = dir.path().join("s.txt");
    run_ok(
        bin()
            .args(["gen", "--family", "rfr", "--k", "2", "--seed", "7", "--out"])
            .arg(&inst),
    );
    run_ok(
        bin()
            .args(["solve", "--exact"])
            .arg(&inst)
            .arg("--out")
            .arg(&rep)
            .arg("--spins-out")
            .arg(&spins),
    );
    let out = run_ok(
        bin()
            .arg("verify")
            .arg(&inst)
            .arg("--spins")
            .arg(&spins)
            .arg("--report")
            .arg(&rep),
    );
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["matches_report"], true);

    // a flipped spin no longer matches
    let mut s = format::read_spins(&spins).unwrap();
    s.flip(3);
    std::fs::write(&spins, format::spins_to_string(&s)).unwrap();
    let out = bin()
        .arg("verify")
        .arg(&inst)
        .arg("--spins")
        .arg(&spins)
        .arg("--report")
        .arg(&rep)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.ising");
    std::fs::write(&inst, "ising 2 1 10\nJ 0 5 3\n").unwrap();
    let out = bin().arg("solve").arg(&inst).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.ising:2"), "{err}");
}

#[test]
fn embed_subcommand_writes_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let emb = dir.path().join("k16.emb");
    run_ok(bin().args(["embed", "--k", "4", "--write"]).arg(&emb));
    let back = CliqueEmbedding::read(&emb).unwrap();
    assert_eq!(back, CliqueEmbedding::standard(4).unwrap());

    let faults = dir.path().join("faults.txt");
    std::fs::write(&faults, "node 0 0 R 0\n").unwrap();
    let out = bin()
        .args(["embed", "--k", "4", "--faults"])
        .arg(&faults)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken chains: 0"));
}

#[test]
fn k64_gen_reports_rejection_distinctly() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        bin()
            .args([
                "gen",
                "--family",
                "k64-ising",
                "--density",
                "0.3",
                "--seed",
                "1",
                "--out",
            ])
            .arg(dir.path().join("x.ising")),
    );
    assert!(out.contains("\"status\":\"rejected\""));
    assert!(!dir.path().join("x.ising").exists());
}

fn chimera_instance(k: usize, seed: u64, field: bool) -> IsingInstance {
    let mut rng = PortableRng::new(seed);
    let g = ChimeraGraph::build(k, &FaultList::new(), false).unwrap();
    let mut b = IsingBuilder::chimera(&g, 10);
    for (x, y) in g.couplers() {
        b.coupling(x, y, rng.range_inclusive(-10, 10)).unwrap();
    }
    if field {
        for v in 0..8 * k * k {
            b.field(v, rng.range_inclusive(-10, 10)).unwrap();
        }
    }
    b.build().unwrap()
}

fn spins(n: usize, bits: u64) -> Vec<i8> {
    (0..n)
        .map(|i| if bits >> (i % 64) & 1 == 1 { -1 } else { 1 })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maxcut_round_trip_preserves_energy(seed in any::<u64>(), field in any::<bool>(), bits in any::<u64>()) {
        let inst = chimera_instance(1, seed, field);
        let mc = ising_to_maxcut(&inst);
        let back = maxcut_to_ising(&mc).unwrap();
        let s = spins(8, bits);
        prop_assert_eq!(back.energy(&s).unwrap(), inst.energy(&s).unwrap());
    }

    #[test]
    fn spin_flip_symmetry_without_field(seed in any::<u64>(), bits in any::<u64>()) {
        let inst = chimera_instance(2, seed, false);
        let s = spins(32, bits);
        let neg: Vec<i8> = s.iter().map(|x| -x).collect();
        prop_assert_eq!(inst.energy(&s).unwrap(), inst.energy(&neg).unwrap());
    }

    #[test]
    fn dp_matches_brute_force(seed in any::<u64>(), field in any::<bool>()) {
        let inst = chimera_instance(2, seed, field);
        let (e, _) = brute_force_min(&inst, 24).unwrap();
        let r = solve_exact(&inst, 20).unwrap();
        prop_assert_eq!(r.energy, Some(e));
        prop_assert_eq!(inst.energy(r.spins.as_ref().unwrap()).unwrap(), e);
    }

    #[test]
    fn conditional_optimum_never_worse(seed in any::<u64>(), bits in any::<u64>(), mask in any::<u64>()) {
        let inst = chimera_instance(2, seed, true);
        let s = spins(32, bits);
        let subset: Vec<bool> = (0..32).map(|i| mask >> i & 1 == 1).collect();
        let p = ConditionalProblem::new(&inst, &s, &subset).unwrap();
        let d = build_sweep(&inst, &subset, &SweepHint::Auto);
        let sol = solve_dp(&p, &d, &TieBreak::all_up(32), 20).unwrap();
        let mut merged = s.clone();
        for i in (0..32).filter(|&i| subset[i]) {
            merged[i] = sol.spins[i];
        }
        prop_assert!(inst.energy(&merged).unwrap() <= inst.energy(&s).unwrap());
    }

    #[test]
    fn preprocessing_keeps_the_optimum(seed in any::<u64>()) {
        let mut rng = PortableRng::new(seed);
        let mut b = IsingBuilder::general(10, 10);
        for i in 0..10 {
            for j in i + 1..10 {
                if rng.bernoulli(0.3) {
                    b.coupling(i, j, rng.range_inclusive(-3, 3)).unwrap();
                }
            }
            b.field(i, rng.range_inclusive(-10, 10)).unwrap();
        }
        let inst = b.build().unwrap();
        let p = preprocess_dominated_fields(&inst);
        let (full, _) = brute_force_min(&inst, 24).unwrap();
        let (red, s) = brute_force_min(&p.reduced, 24).unwrap();
        prop_assert_eq!(red + p.constant, full);
        prop_assert_eq!(inst.energy(&p.expand(&s)).unwrap(), full);
    }

    #[test]
    fn generators_are_pure(seed in any::<u64>()) {
        prop_assert_eq!(gen_rfr(2, &FaultPolicy::machine(), seed).unwrap(), gen_rfr(2, &FaultPolicy::machine(), seed).unwrap());
    }

    #[test]
    fn embedded_energy_shifts_by_offset(seed in any::<u64>(), bits in any::<u64>()) {
        let logical = chimera_ising::instances::logical_ising(8, 0.4, seed).unwrap();
        let e = CliqueEmbedding::standard(2).unwrap();
        let g = ChimeraGraph::fault_free(2).unwrap();
        let emb = chimera_ising::instances::embed(&logical, &e, &g, ChainCheck::Range).unwrap().embedded().unwrap();
        let s = spins(8, bits);
        let phys = e.encode(&s).unwrap();
        prop_assert_eq!(emb.physical.energy(&phys).unwrap(), logical.energy(&s).unwrap() + emb.offset);
    }
}
