use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gmdtsp"));
    c.env("GMDTSP_THREADS", "2");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_consistent_report_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("burma-2.json");
    let lp = dir.path().join("root.lp");
    let out = run(bin()
        .arg("solve")
        .arg(data("3burma14.gtsp"))
        .args(["--depots", "2", "--json"])
        .arg(&rep)
        .arg("--dump-lp")
        .arg(&lp));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&rep);
    assert_eq!(v["status"], "Optimal");
    let opt = v["objective"].as_i64().unwrap();
    assert_eq!(v["stats"]["best_ub"].as_i64(), Some(opt));
    assert!(v["stats"]["root_lb"].as_f64().unwrap() <= opt as f64 + 1e-6);
    assert!(v["stats"]["nodes"].as_u64().unwrap() >= 1);
    assert!(std::fs::read_to_string(&lp).unwrap().contains("\nMinimize\n"));

    let out = run(bin()
        .arg("validate")
        .arg(data("3burma14.gtsp"))
        .args(["--depots", "2", "--solution"])
        .arg(&rep));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("feasible, cost {opt}"));
}

#[test]
fn validate_rejects_a_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    // visits nothing, so no cluster is covered
    std::fs::write(&bad, r#"{"cost": 0, "cycles": []}"#).unwrap();
    let out = run(bin()
        .arg("validate")
        .arg(data("3burma14.gtsp"))
        .args(["--depots", "2", "--solution"])
        .arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn report_aggregates_runs_into_two_tables() {
    let dir = tempfile::tempdir().unwrap();
    for d in 2..=5 {
        let out = run(bin()
            .arg("solve")
            .arg(data("4ulysses16.gtsp"))
            .args(["--depots", &d.to_string(), "--json"])
            .arg(dir.path().join(format!("u{d}.json"))));
        assert_eq!(out.status.code(), Some(0));
    }
    let out = run(bin().arg("report").arg(dir.path()));
    assert_eq!(out.status.code(), Some(0));

    let mut bounds = csv::Reader::from_path(dir.path().join("bounds.csv")).unwrap();
    let header: Vec<String> = bounds.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["name", "opt", "LB", "%LB", "UB", "%UB", "sec1", "sec2", "4pec", "pec", "comb", "nodes"]);
    let rows: Vec<csv::StringRecord> = bounds.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let opt: f64 = r[1].parse().unwrap();
        let lb: f64 = r[2].parse().unwrap();
        let pct: f64 = r[3].parse().unwrap();
        assert!((pct - 100.0 * lb / opt).abs() < 1e-9);
        assert!(pct <= 100.0 + 1e-7);
    }

    let mut timing = csv::Reader::from_path(dir.path().join("timing.csv")).unwrap();
    let header: Vec<String> = timing.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["name", "total-t", "sep-t", "sec-t", "4pec-t", "pec-t", "comb-t", "%pec"]);
    let rows: Vec<csv::StringRecord> = timing.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let sep: f64 = r[2].parse().unwrap();
        let pec: f64 = r[5].parse().unwrap();
        let pct: f64 = r[7].parse().unwrap();
        let want = if sep > 0.0 { 100.0 * pec / sep } else { 0.0 };
        assert!((pct - want).abs() < 1e-9);
    }
}

fn tiny_file(dir: &Path) -> PathBuf {
    let p = dir.join("tiny.gtsp");
    std::fs::write(
        &p,
        "NAME : tiny\nTYPE : GTSP\nDIMENSION : 6\nGTSP_SETS : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n\
         NODE_COORD_SECTION\n1 0 0\n2 10 0\n3 2 1\n4 4 4\n5 9 3\n6 5 0\n\
         GTSP_SET_SECTION:\n1 1 3 -1\n2 2 4 -1\n3 5 6 -1\nEOF\n",
    )
    .unwrap();
    p
}

#[test]
fn oracle_agrees_with_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = tiny_file(dir.path());
    let out = run(bin().arg("oracle").arg(&file).args(["--depots", "2"]));
    assert_eq!(out.status.code(), Some(0));
    let oracle: i64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    let rep = dir.path().join("r.json");
    let out = run(bin().arg("solve").arg(&file).args(["--depots", "2", "--no-preprocess", "--json"]).arg(&rep));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&rep)["objective"].as_i64(), Some(oracle));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // oracle refuses large instances
    let out = run(bin().arg("oracle").arg(data("4gr17.gtsp")).args(["--depots", "2"]));
    assert_eq!(out.status.code(), Some(1));
    // unreadable input
    let out = run(bin().arg("solve").arg(dir.path().join("missing.gtsp")).args(["--depots", "2"]));
    assert_eq!(out.status.code(), Some(1));
    // a zero time limit stops right after the first root LP
    let rep = dir.path().join("t.json");
    let out = run(bin()
        .arg("solve")
        .arg(data("4gr17.gtsp"))
        .args(["--depots", "2", "--time-limit", "0", "--json"])
        .arg(&rep));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&rep)["status"], "TimeLimit");
}
