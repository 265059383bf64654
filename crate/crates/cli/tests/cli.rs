use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn slicerank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicerank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = p(dir, name);
    let mut all = vec!["gen", "--out", &out];
    all.extend(args);
    let o = slicerank(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    PathBuf::from(out)
}

#[test]
fn gen_diagonal_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "d.json", &["--family", "diagonal:2", "--p", "2"]);
    let text = std::fs::read_to_string(&t).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["entries"], serde_json::json!([[0, 0, 0, 1], [1, 1, 1, 1]]));

    let z = gen(dir.path(), "z.json", &["--family", "diagonal:0"]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(z).unwrap()).unwrap();
    assert_eq!(v["dims"], serde_json::json!([0, 0, 0]));
    assert_eq!(v["entries"], serde_json::json!([]));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = p(dir.path(), "a.json");
    let b = p(dir.path(), "b.json");
    let ha = slicerank(&["gen", "--seed", "1", "--p", "3", "--dims", "3,2,4", "--out", &a]);
    let hb = slicerank(&["gen", "--seed", "1", "--p", "3", "--dims", "3,2,4", "--out", &b]);
    assert_eq!(stdout(&ha), stdout(&hb));
    assert!(stdout(&ha).starts_with("sha256="));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn ark_reports_exact_counts() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "d.json", &["--family", "diagonal:2"]);
    let o = slicerank(&["ark", "--in", t.to_str().unwrap(), "--oracle"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["z_count"], "9");
    assert!((v["r"].as_f64().unwrap() - 0.83007).abs() < 1e-5);
    assert_eq!(v["oracle_match"], true);

    let z = gen(dir.path(), "z.json", &["--family", "zero", "--dims", "2,3,1"]);
    let o = slicerank(&["ark", "--in", z.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["r"].as_f64(), Some(0.0));
}

#[test]
fn ark_oracle_on_random_tensors() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let s = seed.to_string();
        let pp = if seed % 2 == 0 { "2" } else { "3" };
        let t = gen(dir.path(), "t.json", &["--seed", &s, "--p", pp, "--dims", "3,2,3"]);
        for axis in ["U", "V", "W"] {
            let o = slicerank(&["ark", "--in", t.to_str().unwrap(), "--oracle", "--ark-axis", axis]);
            assert!(o.status.success(), "seed {seed} axis {axis}");
        }
    }
}

#[test]
fn srk_of_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "d.json", &["--family", "diagonal:3"]);
    let o = slicerank(&["srk", "--in", t.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["slice_rank"], 3);
}

#[test]
fn decompose_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "d.json", &["--family", "diagonal:2"]);
    let cert = p(dir.path(), "c.json");
    let o = slicerank(&["decompose", "--in", t.to_str().unwrap(), "--out", &cert]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "terms=2 ark=0.830 bound=36.6 codim=0 t=7 eff_t=2,0");

    let z = gen(dir.path(), "z.json", &["--family", "zero"]);
    let o = slicerank(&["decompose", "--in", z.to_str().unwrap(), "--out", &cert]);
    assert!(stdout(&o).starts_with("terms=0 "));
}

#[test]
fn round_trip_over_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cert = p(dir.path(), "c.json");
    for seed in 0..8 {
        let s = seed.to_string();
        let t = gen(dir.path(), "t.json", &["--seed", &s, "--p", "3", "--dims", "4,3,2"]);
        let t = t.to_str().unwrap();
        assert!(slicerank(&["decompose", "--in", t, "--out", &cert]).status.success());
        let o = slicerank(&["verify", "--in", t, "--cert", &cert]);
        assert!(o.status.success(), "seed {seed}: {}", stdout(&o));
    }
}

#[test]
fn verify_rejects_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "t.json", &["--seed", "5", "--dims", "3,3,3"]);
    let other = gen(dir.path(), "o.json", &["--seed", "6", "--dims", "3,3,3"]);
    let cert = p(dir.path(), "c.json");
    assert!(slicerank(&["decompose", "--in", t.to_str().unwrap(), "--out", &cert]).status.success());

    let o = slicerank(&["verify", "--in", other.to_str().unwrap(), "--cert", &cert]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recomposition = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "recomposition").unwrap();
    assert_eq!(recomposition["passed"], false);

    // Bound edited below the term count.
    let mut c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    c["transcript"]["certified_bound"] = serde_json::json!(0.5);
    let forged = p(dir.path(), "forged.json");
    std::fs::write(&forged, serde_json::to_string(&c).unwrap()).unwrap();
    let o = slicerank(&["verify", "--in", t.to_str().unwrap(), "--cert", &forged]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let bound = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "term_count_bound").unwrap();
    assert_eq!(bound["passed"], false);
}

#[test]
fn tampered_tensor_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen(dir.path(), "d.json", &["--family", "diagonal:3"]);
    let cert = p(dir.path(), "c.json");
    assert!(slicerank(&["decompose", "--in", t.to_str().unwrap(), "--out", &cert]).status.success());
    let edited = r#"{"field":{"p":2,"k":1},"dims":[3,3,3],"entries":[[0,0,0,1],[1,1,1,1]]}"#;
    std::fs::write(&t, edited).unwrap();
    let o = slicerank(&["verify", "--in", t.to_str().unwrap(), "--cert", &cert]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn survey_of_diagonals() {
    let o = slicerank(&["survey", "--family", "diagonal:3", "--count", "10", "--no-timing"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,q,nu,nv,nw,z_count,ark,terms,bound,srk_exact,ms_ark,ms_decomp"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert_eq!(row[9], row[2], "srk equals n");
        let ark: f64 = row[6].parse().unwrap();
        let terms: f64 = row[7].parse().unwrap();
        let bound: f64 = row[8].parse().unwrap();
        let q: f64 = row[1].parse().unwrap();
        assert!(ark <= terms + 1e-9);
        assert!(terms <= 5.0 * ark + 4.0 * (ark + 1.0).ln() / q.ln() + 29.0 + 1e-6);
        assert!(terms <= bound);
    }
}

#[test]
fn survey_marks_budget_rows_and_continues() {
    let o = slicerank(&[
        "survey", "--dims", "2,2,2", "--dims", "9,2,2", "--count", "2", "--budget-log2", "6", "--no-timing",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].contains("error:budget"));
    assert!(!rows[0].contains("error"));
    assert!(!rows[2].contains("error"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(slicerank(&["ark", "--bogus"]).status.code(), Some(3));
    assert_eq!(slicerank(&["ark", "--in", &p(dir.path(), "missing.json")]).status.code(), Some(3));
    let bad = p(dir.path(), "bad.json");
    std::fs::write(&bad, "{\"field\":{\"p\":4,\"k\":1},\"dims\":[1,1,1],\"entries\":[]}").unwrap();
    assert_eq!(slicerank(&["ark", "--in", &bad]).status.code(), Some(3));
    let big = gen(dir.path(), "big.json", &["--dims", "8,2,2"]);
    assert_eq!(
        slicerank(&["ark", "--in", big.to_str().unwrap(), "--budget-log2", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(slicerank(&["gen", "--family", "cube", "--out", &bad]).status.code(), Some(3));
    assert_eq!(slicerank(&["--help"]).status.code(), Some(0));
}
