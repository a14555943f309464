//! Black-box tests of the command-line interface: file round-trips and the
//! documented exit-code contract (0 success, 1 I/O failure, 2 usage or
//! domain error).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn silopt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_silopt"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_toy_dissimilarity(dir: &Path) -> std::path::PathBuf {
    // two tight pairs: within distance 1, between distance 10
    let path = dir.join("toy.csv");
    fs::write(
        &path,
        "id,o1,o2,o3,o4\n1,0,1,10,10\n2,1,0,10,10\n3,10,10,0,1\n4,10,10,1,0\n",
    )
    .unwrap();
    path
}

#[test]
fn cluster_writes_partition_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_toy_dissimilarity(dir.path());
    let out = silopt(
        dir.path(),
        &[
            "cluster",
            "--dist",
            dist.to_str().unwrap(),
            "--method",
            "osil",
            "--k",
            "2",
            "--out",
            "part.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let part = fs::read_to_string(dir.path().join("part.csv")).unwrap();
    assert_eq!(part, "id,label\n1,1\n2,1\n3,2\n4,2\n");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("part.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["method"], "osil");
    assert_eq!(report["k_range"], serde_json::json!([2, 2]));
    let asw = report["asw_by_k"][0].as_f64().unwrap();
    assert!((asw - 0.9).abs() < 1e-12, "asw = {asw}");
    assert_eq!(report["converged"], true);
}

#[test]
fn kmeans_without_coordinates_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_toy_dissimilarity(dir.path());
    let out = silopt(
        dir.path(),
        &[
            "cluster",
            "--dist",
            dist.to_str().unwrap(),
            "--method",
            "kmeans",
            "--k",
            "2",
            "--out",
            "part.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ambiguous_dgp_requires_compat_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = silopt(
        dir.path(),
        &[
            "simulate", "--dgp", "4", "--methods", "osil", "--reps", "1", "--fixed-k",
            "--out", "res.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("paper-compat"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = silopt(
        dir.path(),
        &[
            "cluster", "--input", "no-such-file.csv", "--method", "osil", "--k", "2",
            "--out", "part.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn eval_prints_ari() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "id,label\n1,1\n2,1\n3,2\n4,2\n").unwrap();
    fs::write(&b, "id,label\n1,5\n2,5\n3,9\n4,9\n").unwrap();
    let out = silopt(
        dir.path(),
        &["eval", "--pred", a.to_str().unwrap(), "--truth", b.to_str().unwrap()],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.0"), "stdout: {stdout}");
}
