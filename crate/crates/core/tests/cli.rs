use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fibretorsion"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn help_exits_zero() {
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("run"));
}

#[test]
fn unknown_experiment_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"experiment": "teleport", "params": {}}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim().lines().count(), 1);
    let line: Value = serde_json::from_str(err.trim()).unwrap();
    assert!(line["message"].as_str().unwrap().contains("unknown experiment"));
    let m = manifest(&out);
    assert_eq!(m["exit_code"], 2);
    assert_eq!(m["status"], "config");
}

#[test]
fn demo_scan_matches_golden_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("scan_demo.json"), dir.path(), &["--precision", "128"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("scan-torsion.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "order,re_t0,im_t0,beta1,beta2,certified");
    let mut got = String::from("order,re_t0,im_t0,certified\n");
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        got.push_str(&format!("{},{},{},{}\n", f[0], f[1], f[2], f[5]));
    }
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/scan_demo_rows.csv")).unwrap();
    assert_eq!(got, golden);
    let m = manifest(dir.path());
    assert_eq!(m["config"]["experiment"], "scan-torsion");
    assert_eq!(m["data_checksums"].as_object().unwrap().len(), 5);
}

#[test]
fn heights_header_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("heights_demo.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("heights.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,t0,degree,height");
    assert!(csv.contains("\n4,-2,1,0.6931471805599453\n"));
}

#[test]
fn count_series_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("count.json");
    fs::write(
        &cfg,
        r#"{"experiment": "count-rational", "precision_bits": 128,
            "params": {"family": "demo", "window": {"re": [-3, 1], "im": [-1, 1], "denominator_bound": 4}, "bound": 4}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&cfg, &out, &[]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("count-rational.csv")).unwrap();
    let counts: Vec<u64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(counts, vec![0, 0, 1, 2]);
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn unwritable_output_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&config("betti_demo.json"), &blocker.join("sub"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tampered_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/modpoly");
    for e in fs::read_dir(&src).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), data.join(e.file_name())).unwrap();
    }
    let phi2 = data.join("phi_2.txt");
    let text = fs::read_to_string(&phi2).unwrap().replace("40773375", "40773376");
    fs::write(&phi2, text).unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .env("FIBRETORSION_DATA", &data)
        .args(["run"])
        .arg(config("isogeny_legendre.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(manifest(&out)["status"], "data-integrity");
}

#[test]
fn bad_precision_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("betti_demo.json"), dir.path(), &["--precision", "8"]);
    assert_eq!(o.status.code(), Some(2));
}
