//! End-to-end runs of the `ipkde` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const WORKED: &str = "x,y
-0.30,-0.28
-0.22,-0.25
-0.27,-0.28
-0.24,-0.27
-0.03,0.00
0.05,0.00
-0.03,0.05
0.04,0.03
-0.02,-0.03
0.23,0.25
0.25,0.23
0.45,0.45
";

fn ipkde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipkde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ruspini() -> String {
    format!("{}/../core/data/ruspini.csv", env!("CARGO_MANIFEST_DIR"))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn cluster_writes_report_assignments_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("w.csv");
    std::fs::write(&input, WORKED).unwrap();
    let report = dir.path().join("r.json");
    let assign = dir.path().join("a.csv");
    let plot = dir.path().join("p.svg");
    let out = ipkde(&[
        "cluster", "--input", s(&input), "--h", "0.10", "--n-prime", "2",
        "--report", s(&report), "--assign", s(&assign), "--plot", s(&plot),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let r = read_json(&report);
    assert_eq!(r["algorithm"], "sm");
    assert_eq!(r["K"], 4);
    let labels: Vec<i64> = r["assignments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(labels, [2, 2, 2, 2, 1, 1, 1, 1, 1, 3, 3, 4]);

    let a = std::fs::read_to_string(&assign).unwrap();
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("row,cluster"));
    assert_eq!(lines.next(), Some("0,2"));
    assert_eq!(a.lines().count(), 13);

    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<circle").count(), 12);
    assert_eq!(svg.matches(r#"class="legend""#).count(), 4);
}

#[test]
fn cluster_with_pca_plot_and_truth_labels() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let plot = dir.path().join("p.svg");
    let out = ipkde(&[
        "cluster", "--input", &ruspini(), "--labels-col", "label", "--h", "0.10",
        "--n-prime", "4", "--report", s(&report), "--plot", s(&plot), "--pca",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&report);
    assert_eq!(r["K"], 4);
    assert_eq!(r["accuracy"], 100.0);
    assert!((r["asw"].as_f64().unwrap() - 0.737657).abs() < 1e-6);
    assert!(plot.exists());
}

#[test]
fn scan_reports_every_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("s.json");
    let out = ipkde(&[
        "scan", "--input", &ruspini(), "--labels-col", "label", "--h", "0.1,0.15,0.2",
        "--n-prime", "3,4", "--report", s(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&report);
    assert_eq!(r["rows"].as_array().unwrap().len(), 6);
    assert!(r["best_report"]["asw"].as_f64().unwrap() >= 0.7376);
}

#[test]
fn gen_is_reproducible_for_every_dataset() {
    let dir = tempfile::tempdir().unwrap();
    for (name, rows) in [("s1", 200), ("s3", 45), ("s4", 400)] {
        let a = dir.path().join(format!("{name}a.csv"));
        let b = dir.path().join(format!("{name}b.csv"));
        for p in [&a, &b] {
            let out = ipkde(&["gen", "--dataset", name, "--seed", "5", "--out", s(p)]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(text, std::fs::read_to_string(&b).unwrap());
        assert_eq!(text.lines().count(), rows + 1, "{name}");
        assert!(text.lines().next().unwrap().ends_with(",label"));
    }
}

#[test]
fn baselines_run_on_ruspini() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], i64); 3] = [
        ("kmeans", &["--k", "4", "--seed", "1"], 4),
        ("pam", &["--k", "4"], 4),
        ("dbscan", &["--eps", "17", "--min-pts", "4"], 4),
    ];
    for (algo, extra, k) in cases {
        let report = dir.path().join(format!("{algo}.json"));
        let path = ruspini();
        let mut args = vec![
            "baseline", "--algo", algo, "--input", &path, "--labels-col", "label",
            "--report", s(&report),
        ];
        args.extend_from_slice(extra);
        let out = ipkde(&args);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let r = read_json(&report);
        assert_eq!(r["algorithm"], algo);
        assert_eq!(r["K"], k);
    }
    let r = read_json(&dir.path().join("dbscan.json"));
    assert_eq!(r["noise_points"], 3);
    assert!((r["asw"].as_f64().unwrap() - 0.713479).abs() < 1e-6);
    let r = read_json(&dir.path().join("pam.json"));
    assert!((r["asw"].as_f64().unwrap() - 0.737657).abs() < 1e-6);
}

#[test]
fn knn_profile_is_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("k.csv");
    let out = ipkde(&[
        "knn-profile", "--input", &ruspini(), "--labels-col", "label", "--k", "4",
        "--out", s(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank,knn_distance"));
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 75);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn exit_codes() {
    assert_eq!(ipkde(&["--help"]).status.code(), Some(0));
    assert_eq!(ipkde(&["--version"]).status.code(), Some(0));
    assert_eq!(ipkde(&["frobnicate"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let run = |input: &Path, h: &str| {
        ipkde(&["cluster", "--input", s(input), "--h", h, "--n-prime", "2", "--report", s(&report)])
            .status
            .code()
    };

    let good = dir.path().join("good.csv");
    std::fs::write(&good, WORKED).unwrap();
    assert_eq!(run(&good, "1.5"), Some(1));
    assert_eq!(run(&dir.path().join("missing.csv"), "0.1"), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
    assert_eq!(run(&bad, "0.1"), Some(2));

    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "x,y\n1,1\n1,1\n1,1\n").unwrap();
    assert_eq!(run(&flat, "0.1"), Some(3));
    assert!(!report.exists());
}
