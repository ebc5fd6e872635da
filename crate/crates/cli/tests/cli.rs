use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.scx"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2limits")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn betti_of_hollow_triangle() {
    let out = stdout(&["betti", path_str(&fixture("hollow_triangle"))]);
    assert_eq!(out.trim(), "p=0 b=1 norm=1/3; p=1 b=1 norm=1/3");
    let out = stdout(&["betti", path_str(&fixture("rp2")), "--p", "1", "--exact"]);
    assert_eq!(out.trim(), "p=1 b=0 norm=0");
}

#[test]
fn spectrum_of_hollow_triangle() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("spectrum.csv");
    let out = stdout(&["spectrum", path_str(&fixture("hollow_triangle")), "--p", "1", "--out", path_str(&csv)]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "eigenvalue,weight\n0,1/3\n3,2/3\n");
    assert!(out.contains("nu({0}) = 1/3"));
    assert!(out.contains("nu(R) = 1"));
    assert!(out.contains("spectral radius = 3"));
}

#[test]
fn torus_convergence_experiment() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("experiment.csv");
    stdout(&["converge", "--family", "torus2d", "--levels", "4,8", "--p", "1", "--out", path_str(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..5], ["n", "|V|", "p", "b_p", "b_p_normalized"]);
    let beta: Vec<&str> = lines.take(2).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(beta, ["0.125", "0.03125"]);
    assert!(text.contains("# trend b_p_normalized nonincreasing"));
    assert!(text.contains("# kernel_mass_bound eps=0.1 value="));
}

#[test]
fn unbounded_degree_is_a_hypothesis_violation() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("e.csv");
    assert_eq!(code(&["converge", "--family", "lm", "--levels", "10,20", "--out", path_str(&csv)]), 4);
    assert!(!csv.exists());
    let args = ["converge", "--family", "lm", "--levels", "10,20", "--truncate", "3", "--out", path_str(&csv)];
    stdout(&args);
    assert!(csv.exists());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.scx");
    std::fs::write(&bad, "0 1\n0 1\n").unwrap();
    assert_eq!(code(&["validate", path_str(&bad)]), 3);
    std::fs::write(&bad, "0 1\n1 one\n").unwrap();
    assert_eq!(code(&["validate", path_str(&bad)]), 2);
    assert_eq!(code(&["betti", path_str(&dir.path().join("missing.scx"))]), 2);
    assert_eq!(code(&["betti"]), 1);
    assert_eq!(code(&["generate", "fixture", "no_such_complex"]), 1);
    assert_eq!(code(&["validate", path_str(&fixture("octahedron"))]), 0);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn generated_complexes_are_valid_and_reproducible() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["torus1d", "--n", "7"],
        vec!["torus2d", "--n", "5"],
        vec!["lm", "--n", "9", "--prob", "0.3", "--seed", "4"],
        vec!["flag", "--n", "12", "--prob", "0.4", "--maxdim", "3", "--seed", "4"],
        vec!["fixture", "rp2"],
    ] {
        let file = dir.path().join("g.scx");
        let mut full = vec!["generate", "--out", path_str(&file)];
        full.extend(&args);
        stdout(&full);
        let first = std::fs::read_to_string(&file).unwrap();
        stdout(&full);
        assert_eq!(std::fs::read_to_string(&file).unwrap(), first, "{args:?}");
        assert!(stdout(&["validate", path_str(&file)]).contains("valid"));
    }
    let torus = stdout(&["generate", "torus2d", "--n", "5"]);
    let file = dir.path().join("t.scx");
    std::fs::write(&file, torus).unwrap();
    assert_eq!(stdout(&["betti", path_str(&file)]).trim(), "p=0 b=1 norm=1/25; p=1 b=2 norm=2/25; p=2 b=1 norm=1/25");
}

#[test]
fn canonical_code_ignores_vertex_names() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.scx");
    let b = dir.path().join("b.scx");
    std::fs::write(&a, "root 0\n0 1 2\n0 3 4\n4 5\n").unwrap();
    std::fs::write(&b, "root 17\n40 17 3\n17 11 9\n9 2\n").unwrap();
    let code_a = stdout(&["canon", path_str(&a)]);
    let code_b = stdout(&["canon", path_str(&b)]);
    let first = |s: &str| s.lines().next().unwrap().to_string();
    assert_eq!(first(&code_a), first(&code_b));
    assert!(code_a.contains("\nroot 0\n"));
    assert_eq!(stdout(&["bs-distance", path_str(&a), path_str(&b)]).trim(), "0");
    let moved = format!("{}:5", path_str(&a));
    assert_eq!(stdout(&["bs-distance", path_str(&a), &moved]).trim(), "1");
}

#[test]
fn measure_distance_between_large_tori_vanishes() {
    let dir = TempDir::new().unwrap();
    let mut measures = Vec::new();
    for n in ["6", "12", "3"] {
        let scx = dir.path().join(format!("t{n}.scx"));
        stdout(&["generate", "--out", path_str(&scx), "torus2d", "--n", n]);
        let json = dir.path().join(format!("t{n}.json"));
        std::fs::write(&json, stdout(&["measure", path_str(&scx)])).unwrap();
        measures.push(json);
    }
    let d = |a: &Path, b: &Path| stdout(&["measure-distance", path_str(a), path_str(b), "--rmax", "2"]);
    assert_eq!(d(&measures[0], &measures[1]).trim(), "0");
    assert_ne!(d(&measures[0], &measures[2]).trim(), "0");
}

#[test]
fn mass_transport_detects_non_unimodular_measure() {
    let dir = TempDir::new().unwrap();
    let uniform = dir.path().join("u.json");
    std::fs::write(&uniform, stdout(&["measure", path_str(&fixture("path3"))])).unwrap();
    let table = stdout(&["mass-transport", path_str(&uniform)]);
    assert_eq!(table.lines().filter(|l| l.ends_with(",true")).count(), 12);

    let end_rooted = dir.path().join("e.json");
    let doc = r#"{"support":[{"weight":"1","maximal_simplices":[[0,1],[1,2]],"root":0}]}"#;
    std::fs::write(&end_rooted, doc).unwrap();
    let table = stdout(&["mass-transport", path_str(&end_rooted), "--battery", "standard"]);
    assert!(table.lines().any(|l| l.ends_with(",false")));
}

#[test]
fn truncation_caps_degree() {
    let out = stdout(&["truncate", path_str(&fixture("star5")), "--degree", "3"]);
    let edges: Vec<&str> = out.lines().filter(|l| l.split_whitespace().count() == 2).collect();
    assert_eq!(edges.len(), 3);
    assert_eq!(out.lines().filter(|l| l.split_whitespace().count() == 1).count(), 2);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let csv = dir.path().join(format!("e{threads}.csv"));
        let run = Command::new(env!("CARGO_BIN_EXE_l2limits"))
            .env("L2LIMITS_THREADS", threads)
            .args(["converge", "--family", "flag", "--levels", "20,40,60", "--c", "3", "--truncate", "4"])
            .args(["--seed", "9", "--out", path_str(&csv)])
            .output()
            .unwrap();
        assert!(run.status.success());
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let bad = Command::new(env!("CARGO_BIN_EXE_l2limits"))
        .env("L2LIMITS_THREADS", "many")
        .args(["betti", path_str(&fixture("edge"))])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
