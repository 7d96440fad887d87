use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qbrst::brst::build_brst_recursive;
use qbrst::format;
use qbrst::Scalar;
use tempfile::TempDir;

fn qbrst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbrst"))
        .args(args)
        .env_remove("QBRST_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn bundled_file(dir: &TempDir, name: &str) -> PathBuf {
    write(dir, &format!("{name}.json"), format::bundled_source(name).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_bundled_and_broken() {
    let dir = TempDir::new().unwrap();
    let sl2 = bundled_file(&dir, "sl2");
    let o = qbrst(&["validate", s(&sl2)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 8);

    let broken = format::bundled_source("sl2").unwrap().replace(r#"[2, 3, 1, "1"]"#, r#"[2, 3, 1, "2"]"#);
    let broken = write(&dir, "broken.json", &broken);
    let o = qbrst(&["validate", s(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL") && l.contains(" at out[")), "{out}");
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let bad = format::bundled_source("sl2").unwrap().replace(r#"[1, 2, 2, "2"]"#, r#"[1, 2, 2, "2 +* q"]"#);
    let bad = write(&dir, "bad.json", &bad);
    let o = qbrst(&["validate", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c entry 1"), "{}", stderr(&o));

    let o = qbrst(&["validate", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = qbrst(&["verify", "--suite", "nonsense", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn heights() {
    let dir = TempDir::new().unwrap();
    for (name, h) in [("sl2", 3), ("hecke2", 2), ("abelian1", 1)] {
        let o = qbrst(&["height", s(&bundled_file(&dir, name))]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("height = {h}")), "{}", stdout(&o));
    }
    let o = qbrst(&["height", s(&bundled_file(&dir, "gl11")), "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("height ≥ 4"));
}

#[test]
fn brst_modes_and_dump() {
    let dir = TempDir::new().unwrap();
    let sl2 = bundled_file(&dir, "sl2");
    let o = qbrst(&["brst", s(&sl2), "--mode", "both"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS brst_recursive_vs_explicit [r=2]"));

    let o = qbrst(&["brst", s(&bundled_file(&dir, "hecke2")), "--mode", "explicit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| l.contains("brst_piece")).all(|l| l.ends_with("0 nonzero entries")));

    let dump = dir.path().join("coeffs.json");
    let o = qbrst(&["brst", s(&sl2), "--mode", "recursive", "--max-degree", "2", "--dump", s(&dump)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let sc = format::bundled("sl2").unwrap();
    let coeffs = build_brst_recursive(&sc, &sc.solve_t_lift().unwrap().t, 2).unwrap();
    let pieces = v["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), coeffs.pieces().len());
    for (p, op) in pieces.iter().zip(coeffs.pieces()) {
        let mut rebuilt = qbrst::LinOp::zeros(3, op.in_legs(), op.out_legs());
        for e in p["entries"].as_array().unwrap() {
            let e = e.as_array().unwrap();
            let idx: Vec<usize> = e[..e.len() - 1].iter().map(|x| x.as_u64().unwrap() as usize - 1).collect();
            let value: Scalar = e.last().unwrap().as_str().unwrap().parse().unwrap();
            let (out, inn) = idx.split_at(op.out_legs());
            rebuilt.set(out, inn, value);
        }
        assert_eq!(&rebuilt, op);
    }
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    let o = qbrst(&["verify", s(&bundled_file(&dir, "sl2")), "--suite", "all", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let hecke = bundled_file(&dir, "hecke2");
    let o = qbrst(&["verify", s(&hecke), "--suite", "all", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = qbrst(&["verify", s(&bundled_file(&dir, "gl11")), "--suite", "grading"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS twisted_yang_baxter"));
}

#[test]
fn q_specialization_is_validated() {
    let dir = TempDir::new().unwrap();
    let o = qbrst(&["verify", s(&bundled_file(&dir, "sl2")), "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let hecke = bundled_file(&dir, "hecke2");
    for bad in ["0", "x"] {
        let o = qbrst(&["verify", s(&hecke), "--suite", "braid", "--q", bad]);
        assert_eq!(o.status.code(), Some(2), "--q {bad}");
    }
    let o = qbrst(&["verify", s(&hecke), "--suite", "braid", "--q", "3/2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sl2 = bundled_file(&dir, "sl2");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (p, threads) in [(&a, "1"), (&b, "0")] {
        let o = Command::new(env!("CARGO_BIN_EXE_qbrst"))
            .args(["verify", s(&sl2), "--suite", "bar", "--max-degree", "2", "--report", s(p)])
            .env("QBRST_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["summary"]["fail"], 0);
    assert!(v["reports"][0]["checks"][0].get("elapsed_seconds").is_none());

    let o = Command::new(env!("CARGO_BIN_EXE_qbrst"))
        .args(["validate", s(&sl2)])
        .env("QBRST_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_round_trips() {
    let o = qbrst(&["export", "gl11"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(format::parse(&stdout(&o)).unwrap(), format::bundled("gl11").unwrap());
}
