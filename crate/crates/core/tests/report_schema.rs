//! Report files validate against the shipped JSON schema.

use ipkde::baselines::{dbscan, kmeans, pam, NoiseConvention};
use ipkde::io::{RunReportFile, ScanReportFile};
use ipkde::{datasets, pairwise_matrix, scan, sm_cluster, DataMatrix, DistanceMeasure, HyperParams};
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schemas/run_report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(report: &RunReportFile) {
    let v = validator();
    let instance: Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    let errors: Vec<String> = v.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{instance}");
}

#[test]
fn clustering_reports_validate() {
    let raw = pairwise_matrix(&datasets::worked_example(), DistanceMeasure::Euclidean).unwrap();
    let r = sm_cluster(&raw, &HyperParams::new(0.10, 2).unwrap()).unwrap();
    assert_valid(&RunReportFile::from_cluster_report(&r, DistanceMeasure::Euclidean));

    let one = DataMatrix::from_rows(&[vec![0.0], vec![0.01], vec![0.02]]).unwrap();
    let raw = pairwise_matrix(&one, DistanceMeasure::Euclidean).unwrap();
    let r = sm_cluster(&raw, &HyperParams::new(0.9, 1).unwrap()).unwrap();
    assert_eq!(r.k(), 1);
    assert_valid(&RunReportFile::from_cluster_report(&r, DistanceMeasure::Euclidean).with_seed(3));
}

#[test]
fn scan_and_baseline_reports_validate() {
    let data = datasets::ruspini();
    let raw = pairwise_matrix(&data, DistanceMeasure::Euclidean).unwrap();
    let s = scan(&raw, &[0.1, 0.2], &[3, 4], &HyperParams::new(0.1, 3).unwrap()).unwrap();
    let file = ScanReportFile::from_scan(&s, DistanceMeasure::Euclidean);
    assert_eq!(file.rows.len(), 4);
    assert_valid(&file.best_report);

    let km = kmeans(&data, 4, 1, 5).unwrap();
    assert_valid(&RunReportFile::from_kmeans(&km, 5, 1, Some(0.5)).with_accuracy(Some(100.0)));
    let pm = pam(&raw, 4).unwrap();
    assert_valid(&RunReportFile::from_pam(&pm, DistanceMeasure::Euclidean, Some(0.7)));
    let db = dbscan(&raw, 17.0, 4).unwrap();
    let asw = db.asw(&raw, NoiseConvention::AsGroup).ok();
    assert_valid(&RunReportFile::from_dbscan(
        &db,
        DistanceMeasure::Euclidean,
        NoiseConvention::AsGroup,
        asw,
    ));
}

#[test]
fn schema_rejects_incomplete_reports() {
    let v = validator();
    let raw = pairwise_matrix(&datasets::worked_example(), DistanceMeasure::Euclidean).unwrap();
    let r = sm_cluster(&raw, &HyperParams::new(0.10, 2).unwrap()).unwrap();
    let json = RunReportFile::from_cluster_report(&r, DistanceMeasure::Euclidean)
        .to_json()
        .unwrap();
    let mut instance: Value = serde_json::from_str(&json).unwrap();
    instance.as_object_mut().unwrap().remove("K");
    assert!(!v.is_valid(&instance));
}
