use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_annulus-div"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn solve(name: &str, out: &Path) -> Output {
    bin().args(["solve", "--config"]).arg(fixture(name)).arg("--out-dir").arg(out).output().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn zero_source_writes_zero_field_and_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve("zero.json", dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("field.csv"));
    assert_eq!(header, ["x1", "x2", "x3", "U1", "U2", "U3", "f", "divU_fd"]);
    assert_eq!(rows.len(), 3 * 8);
    assert!(rows.iter().all(|r| r[3..].iter().all(|v| *v == 0.0)));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["meta"]["band"] == 8));
}

#[test]
fn two_dimensional_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve("cosine_2d.json", dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("u.csv"));
    assert_eq!(header, ["x1", "x2", "U1", "U2", "f", "divU_fd"]);
    assert_eq!(rows.len(), 48);
    for row in &rows {
        let r = row[0].hypot(row[1]);
        if (r - 1.0).abs() < 1e-12 || (r - 2.0).abs() < 1e-12 {
            assert!(row[2].abs() < 1e-10 && row[3].abs() < 1e-10);
        } else {
            assert!((row[5] - row[4]).abs() < 1e-6, "{row:?}");
        }
    }
    assert!(dir.path().join("checks.json").exists());
    assert!(dir.path().join("config.json").exists());
}

#[test]
fn csv_floats_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    solve("cosine_2d.json", dir.path());
    let text = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    let field = text.lines().nth(2).unwrap().split(',').next().unwrap().to_string();
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(mantissa.len(), 17, "{field}");
}

#[test]
fn inverted_radii_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve("inverted_radii.json", dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let missing = solve("does_not_exist.json", dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn under_resolved_run_exits_with_failed_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve("strict_boundary.json", dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn verify_reruns_a_saved_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(solve("y21_3d.json", dir.path()).status.code(), Some(0));
    let out = bin().args(["verify", "--config"]).arg(dir.path().join("config.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(printed, saved);
}

#[test]
fn identities_pass_up_to_ten() {
    let out = bin().args(["identities", "--max-n", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(" pass ")).count(), 9);
}

#[test]
fn identities_reject_max_n_below_two() {
    let out = bin().args(["identities", "--max-n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("ANNULUS_DIV_THREADS", "1")
        .args(["solve", "--config"])
        .arg(fixture("zero.json"))
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = bin().env("ANNULUS_DIV_THREADS", "many").args(["identities", "--max-n", "2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
