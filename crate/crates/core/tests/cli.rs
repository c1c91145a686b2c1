use std::path::Path;
use std::process::{Command, Output};

use hardy_cert::hardy::{hardy_behavior, Behavior, HardyPoint};
use hardy_cert::io::{read_behavior, read_certificate, write_behavior};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-cert")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn gen(dir: &TempDir, name: &str, r: &str, s: &str) -> String {
    let out = p(dir, name);
    let o = run(&["gen-behavior", "--r", r, "--s", s, "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = gen(&dir, "good.json", "0.5", "0.5");
    let cert = p(&dir, "cert.json");
    let o = run(&["certify", "--in", &good, "--out", &cert]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = read_certificate(Path::new(&cert)).unwrap();
    assert!(c.is_certified());
    let pt = c.point.unwrap();
    assert!((pt.r - 0.5).abs() < 1e-12 && (pt.s - 0.5).abs() < 1e-12);

    let near = gen(&dir, "near.csv", "0.5", "0.00002");
    assert_eq!(code(&run(&["certify", "--in", &near])), 3);
    let edge = p(&dir, "edge.json");
    write_behavior(Path::new(&edge), &hardy_behavior(HardyPoint::new(0.5, 0.0).unwrap()).unwrap()).unwrap();
    assert_eq!(code(&run(&["certify", "--in", &edge])), 3);

    let bad = p(&dir, "bad.json");
    write_behavior(Path::new(&bad), &Behavior::uniform()).unwrap();
    assert_eq!(code(&run(&["certify", "--in", &bad])), 1);
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["gen-behavior", "--r", "1.2", "--s", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("r out of range"), "{}", stderr(&o));

    assert_eq!(code(&run(&["certify", "--in", "/nonexistent/b.json"])), 2);
    assert_eq!(code(&run(&["bogus-subcommand"])), 2);

    let dir = TempDir::new().unwrap();
    let o = run(&["cover", "--grid", "5", "--out", &p(&dir, "c.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn chsh_reports_locality() {
    let dir = TempDir::new().unwrap();
    let half = gen(&dir, "h.json", "0.5", "0.5");
    let o = run(&["chsh", "--in", &half]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("local=false"));
    let edge = p(&dir, "e.json");
    write_behavior(Path::new(&edge), &hardy_behavior(HardyPoint::new(0.0, 0.3).unwrap()).unwrap()).unwrap();
    let o = run(&["chsh", "--in", &edge]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("local=true"));
}

#[test]
fn sweep_writes_masks_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "sweep");
    let o = run(&["sweep", "--N", "4", "--grid", "41", "--delta", "0.02", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("N=4 coverage="), "{line}");
    let summary = std::fs::read_to_string(dir.path().join("sweep/summary.txt")).unwrap();
    assert_eq!(summary.trim(), line.trim());
    for f in ["nu_0001.csv", "nu_0003.json", "union.csv", "union.json"] {
        assert!(dir.path().join("sweep").join(f).exists(), "missing {f}");
    }
    assert!(!dir.path().join("sweep/nu_0004.csv").exists());
}

#[test]
fn regions_and_cover_outputs() {
    let dir = TempDir::new().unwrap();
    let out = p(&dir, "reg");
    let o = run(&["regions", "--grid", "41", "--delta", "0.02", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("equality="));
    for f in ["equality.csv", "concavity.json", "region.csv", "flagged.json", "cover.json"] {
        assert!(dir.path().join("reg").join(f).exists(), "missing {f}");
    }
    let o = run(&["cover", "--nu", "0.5", "--grid", "21", "--out", &p(&dir, "cover.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("facets="));
}

const MIXED: &str = r#"{"blocks":[
  {"i":0,"j":0,"mu":0.5,"r":0.3,"s":0.4},
  {"i":1,"j":1,"mu":0.5,"r":0.6,"s":0.7}]}"#;

const COMMON: &str = r#"{"blocks":[
  {"i":0,"j":0,"mu":0.7,"r":0.4,"s":0.6},
  {"i":0,"j":1,"mu":0.3,"r":0.4,"s":0.6}]}"#;

#[test]
fn mixture_is_rejected_and_common_point_is_extracted() {
    let dir = TempDir::new().unwrap();
    let mixed = p(&dir, "mixed.json");
    std::fs::write(&mixed, MIXED).unwrap();
    let beh = p(&dir, "mix_behavior.json");
    let report = p(&dir, "report.json");
    let o = run(&["blocks", "--model", &mixed, "--behavior", &beh, "--out", &report]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(std::fs::read_to_string(&report).unwrap().contains("\"rejected_mixture\""));
    let o = run(&["certify", "--in", &beh]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert_eq!(code(&run(&["extract", "--model", &mixed])), 1);

    let common = p(&dir, "common.json");
    std::fs::write(&common, COMMON).unwrap();
    let o = run(&["blocks", "--model", &common]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"consistent\""), "{}", stdout(&o));
    let o = run(&["extract", "--model", &common, "--out", &p(&dir, "ext.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("fidelity"));

    let sim = p(&dir, "sim.json");
    assert_eq!(code(&run(&["simulate", "--model", &common, "--out", &sim])), 0);
    assert_eq!(code(&run(&["certify", "--in", &sim])), 0);
}

#[test]
fn simulate_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let sim = p(&dir, "sim.json");
    let o = run(&["simulate", "--r", "0.3", "--s", "0.8", "--phi", "1.1", "--xi", "-0.4", "--out", &sim]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let closed = gen(&dir, "closed.json", "0.3", "0.8");
    let a = read_behavior(Path::new(&sim)).unwrap();
    let b = read_behavior(Path::new(&closed)).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-cert"))
        .env("HARDY_CERT_THREADS", "zero")
        .args(["gen-behavior", "--r", "0.5", "--s", "0.5"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-cert"))
        .env("HARDY_CERT_THREADS", "2")
        .args(["gen-behavior", "--r", "0.5", "--s", "0.5"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
