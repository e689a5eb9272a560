use std::path::{Path, PathBuf};
use std::process::Command;

use evosoft_cli::manifest::{Manifest, MANIFEST_FILE};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = evosoft_cli::run(std::iter::once("evosoft").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    assert_eq!(out.lines().count(), 1, "summary must be one line: {out}");
    serde_json::from_str(&out).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn grow_into(dir: &Path) -> PathBuf {
    ok(&["grow", "--m", "1", "--p", "1", "--q", "1", "--N", "1000", "--seed", "42", "--out", s(dir)]);
    dir.join("edges.txt")
}

#[test]
fn grow_writes_edges_trajectory_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("g1");
    let v = ok(&["grow", "--m", "1", "--p", "1", "--q", "1", "--N", "1000", "--seed", "42", "--out", s(&dir)]);
    assert_eq!(v["command"], "grow");
    assert_eq!(v["nodes"], 1000);
    assert!(v["avg_degree"].as_f64().unwrap() > 1.0);
    let traj = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("n,L,avg_degree\n"));
    let m = Manifest::read(&dir.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.seed, Some(42));
    assert_eq!(m.params["N"], 1000);
    assert!(!m.params.contains_key("out"));
    assert_eq!(m.artifacts.keys().collect::<Vec<_>>(), ["edges.txt", "trajectory.csv"]);
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let (code, _, err) = run(&["grow", "--p", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("p must lie in [0,1]"), "{err}");
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["grow", "--m", "two"]).0, 2);
    let (code, _, err) = run(&["repro", "fig9"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown experiment"), "{err}");
    assert_eq!(run(&["extract", "--root", ".", "--profile", "cobol"]).0, 2);
}

#[test]
fn help_exits_0_on_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("repro"));
    let (code, out, _) = run(&["fds", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--delta-z"));
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["degfit", "--input", s(&tmp.path().join("missing.txt")), "--out", s(tmp.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("missing.txt"), "{err}");
    let short = tmp.path().join("short.csv");
    std::fs::write(&short, "1\n2\n3\n").unwrap();
    let (code, _, err) = run(&["weibull", "--input", s(&short), "--out", s(tmp.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("insufficient data"), "{err}");
}

#[test]
fn config_supplies_flags_and_explicit_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"m": 2, "p": 0.4, "q": 0.25, "N": 500, "seed": 3}"#).unwrap();
    let dir = tmp.path().join("a");
    ok(&["grow", "--config", s(&cfg), "--seed", "9", "--out", s(&dir)]);
    let m = Manifest::read(&dir.join(MANIFEST_FILE)).unwrap();
    assert_eq!((m.params["m"].as_u64(), m.params["N"].as_u64(), m.seed), (Some(2), Some(500), Some(9)));

    std::fs::write(&cfg, r#"{"p": "high"}"#).unwrap();
    assert_eq!(run(&["grow", "--config", s(&cfg)]).0, 2);
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(run(&["grow", "--config", s(&cfg)]).0, 1);
}

#[test]
fn manifest_rerun_reproduces_hashes() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["fds", "--J", "2", "--delta-z", "5", "--innovation-rate", "0.05", "--generations", "300", "--seed", "4", "--out", s(&a)]);
    ok(&["fds", "--config", s(&a.join(MANIFEST_FILE)), "--out", s(&b)]);
    let ma = Manifest::read(&a.join(MANIFEST_FILE)).unwrap();
    let mb = Manifest::read(&b.join(MANIFEST_FILE)).unwrap();
    assert_eq!(ma.artifacts, mb.artifacts);
    assert_eq!(ma.params, mb.params);
    let (code, _, err) = run(&["grow", "--config", s(&a.join(MANIFEST_FILE))]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn degfit_and_motifs_read_grown_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = grow_into(&tmp.path().join("g"));
    let v = ok(&["degfit", "--input", s(&edges), "--kmin", "1", "--out", s(&tmp.path().join("d"))]);
    assert_eq!(v["k_min"], 1.0);
    assert!(v["gamma"].as_f64().unwrap() > 1.0);
    let v = ok(&["degfit", "--input", s(&edges), "--which", "out", "--min-tail", "20", "--out", s(&tmp.path().join("d2"))]);
    assert!(v["ks"].as_f64().unwrap() < 1.0);

    let v = ok(&["motifs", "--input", s(&edges), "--k", "3", "--out", s(&tmp.path().join("m"))]);
    assert_eq!(v["exact"], true);
    assert!(v["classes"].as_u64().unwrap() >= 1);
    let v = ok(&[
        "motifs", "--input", s(&edges), "--k", "3", "--samples", "500", "--null", "10", "--seed", "1", "--out",
        s(&tmp.path().join("m2")),
    ]);
    assert_eq!(v["exact"], false);
    let z = std::fs::read_to_string(tmp.path().join("m2/zscores.csv")).unwrap();
    assert!(z.starts_with("code,edges,observed,null_mean,null_std,z\n"));
}

#[test]
fn extract_with_builtin_and_json_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("src");
    std::fs::create_dir_all(&root).unwrap();
    std::fs::write(root.join("a.c"), "#include \"b.h\"\n#include <stdio.h>\n").unwrap();
    std::fs::write(root.join("b.h"), "// nothing\n").unwrap();
    let v = ok(&["extract", "--root", s(&root), "--out", s(&tmp.path().join("e"))]);
    assert_eq!((v["files"].as_u64(), v["edges"].as_u64(), v["externals"].as_u64()), (Some(2), Some(1), Some(0)));
    let v = ok(&["extract", "--root", s(&root), "--external", "--out", s(&tmp.path().join("e2"))]);
    assert_eq!(v["externals"], 1);

    let profile = serde_json::to_string(&evosoft::depgraph::LangProfile::c()).unwrap();
    let pj = tmp.path().join("profile.json");
    std::fs::write(&pj, profile).unwrap();
    let v = ok(&["extract", "--root", s(&root), "--profile-json", s(&pj), "--out", s(&tmp.path().join("e3"))]);
    assert_eq!(v["edges"], 1);
}

#[test]
fn compete_and_lattice() {
    let tmp = tempfile::tempdir().unwrap();
    let v = ok(&["compete", "--rho0", "0.5,0.3,0.2", "--steps", "5000", "--every", "500", "--out", s(&tmp.path().join("c"))]);
    assert_eq!(v["winner"], 0);
    assert!(v["max_simplex_drift"].as_f64().unwrap() < 1e-9);
    let traj = std::fs::read_to_string(tmp.path().join("c/trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 11);
    assert_eq!(run(&["compete", "--rho0", "0.5,x"]).0, 2);

    let v = ok(&["lattice", "--L", "16", "--capacity", "2", "--steps", "300", "--seed", "1", "--out", s(&tmp.path().join("l"))]);
    assert_eq!(v["final_diversity"], 2);
}

#[test]
fn fds_reports_barrier_and_fixation() {
    let tmp = tempfile::tempdir().unwrap();
    let v = ok(&["fds", "--generations", "200", "--fixation-events", "20", "--delta-z", "9.2", "--out", s(&tmp.path().join("f"))]);
    assert!((v["barrier"].as_f64().unwrap() - 100f64.ln()).abs() < 1e-12);
    assert!(v["fixation_fraction"].as_f64().unwrap() > 0.5);
    let v = ok(&["fds", "--beta", "0", "--J", "1", "--generations", "50", "--out", s(&tmp.path().join("f2"))]);
    assert_eq!(v["barrier"], 0.0);
}

#[test]
fn dgbd_weibull_and_temporal_read_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let ranks = tmp.path().join("ranks.csv");
    let text: String = (1..=30).map(|r| format!("{r},{}\n", evosoft::distfit::dgbd(500.0, 1.2, 0.5, 30, r))).collect();
    std::fs::write(&ranks, format!("rank,count\n{text}")).unwrap();
    let v = ok(&["dgbd", "--input", s(&ranks), "--out", s(&tmp.path().join("d"))]);
    assert!((v["a"].as_f64().unwrap() - 1.2).abs() < 1e-6);

    let xs = evosoft::synth::exponential(&mut evosoft::rng::seeded(1), 500, 0.5);
    let samples = tmp.path().join("t.csv");
    std::fs::write(&samples, xs.iter().map(|x| format!("{x}\n")).collect::<String>()).unwrap();
    let v = ok(&["weibull", "--input", s(&samples), "--out", s(&tmp.path().join("w"))]);
    assert_eq!(v["non_poissonian"], false);

    let mut log = String::from("timestamp,entity\n");
    let mut t = 0.0;
    for (i, x) in xs.iter().enumerate() {
        t += x;
        log.push_str(&format!("{t},{}\n", ["a", "b"][i % 2]));
    }
    log.push_str(&format!("{t},a\n"));
    let events = tmp.path().join("events.csv");
    std::fs::write(&events, log).unwrap();
    let v = ok(&["temporal", "--input", s(&events), "--out", s(&tmp.path().join("t1"))]);
    assert_eq!((v["events"].as_u64(), v["zero_gaps"].as_u64()), (Some(501), Some(1)));
    let v = ok(&["temporal", "--input", s(&events), "--group-by", "entity", "--out", s(&tmp.path().join("t2"))]);
    assert_eq!(v["groups"], 2);
}

#[test]
fn complexity_builds_then_reuses_table() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("code.txt");
    std::fs::write(&input, "int a = 1;\nint b = a;\nint a = 1;\n").unwrap();
    let first = tmp.path().join("c1");
    let v = ok(&["complexity", "--input", s(&input), "--mode", "words", "--incidence", "--out", s(&first)]);
    assert!(v["bdm_bits"].as_f64().unwrap() > 0.0);
    assert!(first.join("incidence.csv").exists());
    let table = first.join("ctm.csv");
    let w = ok(&["complexity", "--input", s(&input), "--mode", "words", "--table", s(&table), "--out", s(&tmp.path().join("c2"))]);
    assert_eq!(v["bdm_bits"], w["bdm_bits"]);
    assert_eq!(run(&["complexity", "--input", s(&input), "--mode", "glyphs"]).0, 2);
}

#[test]
fn repro_accepts_flag_form() {
    let tmp = tempfile::tempdir().unwrap();
    let v = ok(&["repro", "--experiment", "weibull-alpha", "--out", s(&tmp.path().join("r"))]);
    assert_eq!(v["experiment"], "weibull-alpha");
    assert!((v["alpha"].as_f64().unwrap() - 0.6).abs() < 0.05);
}

#[test]
fn fig2d_recipe_emits_plot_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("f2d");
    ok(&["repro", "fig2d", "--out", s(&dir)]);
    let csv = std::fs::read_to_string(dir.join("avg_degree_vs_logN.csv")).unwrap();
    assert!(csv.starts_with("N,lnN,avg_degree,meanfield\n"));
    assert!(csv.lines().count() > 20);
}

#[test]
fn thread_cap_does_not_change_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_evosoft");
    let mut hashes = Vec::new();
    for threads in ["1", "3"] {
        let dir = tmp.path().join(threads);
        let status = Command::new(bin)
            .args(["repro", "fig2b", "--out", s(&dir)])
            .env("EVOSOFT_THREADS", threads)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        hashes.push(Manifest::read(&dir.join(MANIFEST_FILE)).unwrap().artifacts);
    }
    assert_eq!(hashes[0], hashes[1]);
}
