use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caustica"))
        .args(&args[..1])
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(&args[1..])
        .env("CAUSTICA_THREADS", "2")
        .output()
        .unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const COS2_Q4: &str = r#"{"deformation":{"fourier":{"h":[[[-2,0.5,0],[2,0.5,0]]]}},"rotation":{"p":1,"q":4}}"#;
const CUBIC: &str = r#"{"deformation":{"cartesian":{"terms":[[0,3,-1.0]]}},"rotation":{"q_range":[3,10]}}"#;

#[test]
fn analyze_cubic_table() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", CUBIC);
    let out = tmp.path().join("out");
    let res = run(&["analyze"], &cfg, &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("summary.csv"));
    assert_eq!(rows.len(), 15);
    for row in rows {
        let q: usize = row[0].parse().unwrap();
        let chi: usize = row[2].parse().unwrap();
        let expected = if q.is_multiple_of(2) { 2 * q.div_ceil(6) } else { 1 + 2 * (q - 3).div_ceil(6) };
        assert_eq!(chi, expected, "q = {q}");
        assert_eq!(row[3], (chi - 1).to_string());
        assert_eq!(row[4], chi.to_string());
        assert!(out.join(format!("report_{}_{}.json", row[1], row[0])).exists());
    }
}

#[test]
fn resonant_first_harmonic_breaks_at_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"deformation":{"fourier":{"h":[[[-5,0.5,0],[5,0.5,0]]]}},"rotation":{"p":1,"q":5}}"#,
    );
    let out = tmp.path().join("out");
    assert!(run(&["analyze"], &cfg, &out).status.success());
    let rows = csv_rows(&out.join("summary.csv"));
    assert_eq!(rows[0][4], "1");
}

#[test]
fn reports_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", CUBIC);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&["analyze"], &cfg, &a).status.success());
    let res = Command::new(env!("CARGO_BIN_EXE_caustica"))
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .env("CAUSTICA_THREADS", "5")
        .output()
        .unwrap();
    assert!(res.status.success());
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let empty = write_config(
        tmp.path(),
        "empty.json",
        r#"{"deformation":{"fourier":{"h":[]}},"rotation":{"list":[]}}"#,
    );
    assert_eq!(run(&["analyze"], &empty, &out).status.code(), Some(2));
    let bad = write_config(tmp.path(), "bad.json", r#"{"deformation":{"fourier":{"h":[]}},"rotation":{"p":2,"q":4}}"#);
    assert_eq!(run(&["analyze"], &bad, &out).status.code(), Some(2));
    let cfg = write_config(tmp.path(), "c.json", COS2_Q4);
    assert_eq!(run(&["verify", "--eps-sweep", "1e-2,1e-4,2"], &cfg, &out).status.code(), Some(2));
    assert_eq!(run(&["correct", "--max-order", "100"], &cfg, &out).status.code(), Some(2));
    assert_eq!(run(&["analyze"], &tmp.path().join("missing.json"), &out).status.code(), Some(2));
}

#[test]
fn p1_flag_filters_rotations() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", CUBIC);
    let out = tmp.path().join("out");
    assert!(run(&["analyze", "--p1-only"], &cfg, &out).status.success());
    let rows = csv_rows(&out.join("summary.csv"));
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[1] == "1"));
}

#[test]
fn verify_slope_matches_order() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", COS2_Q4);
    let out = tmp.path().join("out");
    let res = run(&["verify"], &cfg, &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("verify.csv"));
    let slope: f64 = rows[0][4].parse().unwrap();
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    assert_eq!(rows[0][6], "PASS");
    let sweep = fs::read_to_string(out.join("sweep_1_4.csv")).unwrap();
    assert!(sweep.starts_with("epsilon,max_residual"));
    assert_eq!(sweep.lines().count(), 8);
}

#[test]
fn verify_translated_circle_is_beyond_measurable() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"deformation":{"cartesian":{"terms":[[1,0,2.0]]}},"rotation":{"p":1,"q":5}}"#,
    );
    let out = tmp.path().join("out");
    let res = run(&["verify"], &cfg, &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&out.join("verify.csv"));
    assert!(rows[0][6].contains("beyond measurable"), "{:?}", rows[0]);
}

#[test]
fn correct_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", COS2_Q4);
    let out = tmp.path().join("out");
    let res = run(&["correct", "--max-order", "3"], &cfg, &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let corrected: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("corrected_1_4.json")).unwrap()).unwrap();
    let h2 = corrected["fourier"]["h"][1].as_array().unwrap();
    let harmonics: Vec<i64> = h2.iter().map(|t| t[0].as_i64().unwrap()).collect();
    assert_eq!(harmonics, vec![-4, 4]);

    let again = serde_json::json!({ "deformation": corrected, "rotation": {"p": 1, "q": 4}, "max_order": 3 });
    let cfg2 = write_config(tmp.path(), "again.json", &again.to_string());
    let out2 = tmp.path().join("again");
    assert!(run(&["analyze"], &cfg2, &out2).status.success());
    let rows = csv_rows(&out2.join("summary.csv"));
    assert_eq!(rows[0][3], "3");
    assert_eq!(rows[0][4], "none");
}

#[test]
fn correct_is_identity_when_persisting() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"deformation":{"fourier":{"h":[[[-1,0.5,0],[1,0.5,0]]]}},"rotation":{"p":1,"q":5},"max_order":4}"#,
    );
    let out = tmp.path().join("out");
    let res = run(&["correct"], &cfg, &out);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("unchanged"));
}
