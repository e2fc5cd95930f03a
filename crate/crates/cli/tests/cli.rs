use std::path::Path;
use std::process::{Command, Output};

fn adalr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adalr")).args(args).output().unwrap()
}

fn run_to(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "-q", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    adalr(&args)
}

#[test]
fn single_step_row_matches_hand_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to(
        dir.path(),
        &[
            "--problem", "quadratic:d=1,span=1,sigma=0,half=1,target=0",
            "--estimator", "amsgrad", "--alpha", "0.1", "--beta", "0", "--gamma", "0",
            "--delta", "0", "--epsilon", "1e-300", "--x0", "1", "--steps", "1",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()].parse::<f64>().unwrap();
    assert_eq!(col("n"), 1.0);
    assert!((col("f_x") - 0.405).abs() < 1e-15);
}

#[test]
fn unknown_preset_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to(dir.path(), &["--problem", "quadratic", "--preset", "NOPE-X9", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOPE-X9"));
}

#[test]
fn compare_reads_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_to(dir.path(), &["--problem", "quadratic:d=2", "--preset", "ADAM-C2,AMSG-D1", "--steps", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = dir.path().join("table.csv");
    let o = adalr(&["compare", dir.path().to_str().unwrap(), "--out", table.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("ADAM-C2") && stdout.contains("AMSG-D1"));
    assert_eq!(std::fs::read_to_string(table).unwrap().lines().count(), 3);
}

#[test]
fn compare_without_summaries_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = adalr(&["compare", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn list_presets_prints_catalog() {
    let o = adalr(&["list-presets"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["ADAM-C1", "AMSG-D3", "MAMSG-C2"] {
        assert!(text.contains(name), "{name}");
    }
}
