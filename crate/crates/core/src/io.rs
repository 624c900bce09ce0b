//! CSV and JSON ingestion and emission.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::baselines::{DbscanResult, KmeansResult, NoiseConvention, PamResult};
use crate::cluster::ScanResult;
use crate::data::{
    ClusterReport, ColumnKind, DataMatrix, DistanceMatrix, HyperParams, MergePolicy,
    VariableSchema,
};
use crate::distance::DistanceMeasure;
use crate::error::{Error, Result};

/// One column entry of a schema file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaColumn {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnKind,
}

/// Column types as stored on disk: `{"columns":[{"name":..,"type":..}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaFile {
    pub columns: Vec<SchemaColumn>,
}

impl SchemaFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(BufReader::new(f))?)
    }

    /// Kinds for the given feature columns. With names, columns are matched
    /// by name; without, by position.
    fn resolve(&self, names: Option<&[String]>, p: usize) -> Result<VariableSchema> {
        let kinds = match names {
            Some(names) => names
                .iter()
                .map(|n| {
                    self.columns
                        .iter()
                        .find(|c| &c.name == n)
                        .map(|c| c.kind)
                        .ok_or_else(|| Error::Malformed(format!("schema has no entry for column `{n}`")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => {
                if self.columns.len() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        got: self.columns.len(),
                    });
                }
                self.columns.iter().map(|c| c.kind).collect()
            }
        };
        Ok(VariableSchema::new(kinds))
    }
}

/// How to read a data CSV.
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Header name of the ground-truth label column, split off the features.
    pub label_column: Option<String>,
    pub schema: Option<SchemaFile>,
}

impl CsvOptions {
    /// Header present, no labels, all columns continuous.
    pub fn with_header() -> Self {
        Self {
            has_header: true,
            ..Self::default()
        }
    }

    /// Header present with labels in the named column.
    pub fn labelled(column: impl Into<String>) -> Self {
        Self {
            has_header: true,
            label_column: Some(column.into()),
            schema: None,
        }
    }

    pub fn schema(mut self, schema: SchemaFile) -> Self {
        self.schema = Some(schema);
        self
    }
}

fn csv_reader<R: Read>(reader: R, has_header: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn parse_cell(s: &str, row: usize, col: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::InvalidCell {
        row,
        col,
        reason: format!("cannot parse `{s}` as a number"),
    })
}

/// Reads a comma-separated numeric table. Rows and columns in errors are
/// zero-based and count data rows only.
pub fn parse_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<DataMatrix> {
    let mut rdr = csv_reader(reader, opts.has_header);
    let header: Option<Vec<String>> = if opts.has_header {
        Some(rdr.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };
    let label_idx = match (&opts.label_column, &header) {
        (None, _) => None,
        (Some(name), Some(h)) => Some(
            h.iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::Malformed(format!("unknown label column `{name}`")))?,
        ),
        (Some(name), None) => {
            return Err(Error::Malformed(format!(
                "label column `{name}` requires a header row"
            )))
        }
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Malformed(format!(
                "row {row} has {} fields, expected {w}",
                record.len()
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                let label = cell.parse::<i64>().map_err(|_| Error::InvalidCell {
                    row,
                    col,
                    reason: format!("label `{cell}` is not an integer"),
                })?;
                labels.push(label);
            } else {
                values.push(parse_cell(cell, row, col)?);
            }
        }
        n += 1;
    }
    let p = width.unwrap_or(0) - usize::from(label_idx.is_some());
    let mut data = DataMatrix::from_flat(n, p, values)?;

    let names: Option<Vec<String>> = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != label_idx)
            .map(|(_, c)| c)
            .collect()
    });
    if let Some(schema) = &opts.schema {
        data = data.with_schema(schema.resolve(names.as_deref(), p)?)?;
    }
    if let Some(names) = names {
        data = data.with_names(names)?;
    }
    if label_idx.is_some() {
        data = data.with_labels(labels);
    }
    data.validate()?;
    Ok(data)
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<DataMatrix> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(BufReader::new(f), opts)
}

/// Writes the features under their names, plus a `label` column when
/// labels are attached. Values use the shortest exact decimal form.
pub fn write_csv_to<W: Write>(writer: W, data: &DataMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let labels = data.labels();
    let mut header: Vec<&str> = data.names().iter().map(String::as_str).collect();
    if labels.is_some() {
        header.push("label");
    }
    w.write_record(&header)?;
    for (i, row) in data.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(l) = labels {
            rec.push(l[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, data: &DataMatrix) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(BufWriter::new(f), data)
}

/// Reads a square matrix of precomputed distances.
pub fn load_distance_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DistanceMatrix> {
    let data = load_csv(
        path,
        &CsvOptions {
            has_header,
            ..CsvOptions::default()
        },
    )?;
    let rows: Vec<Vec<f64>> = data.rows().map(<[f64]>::to_vec).collect();
    DistanceMatrix::from_square(&rows)
}

/// Writes `(rank, value)` pairs with a header.
pub fn write_profile(path: impl AsRef<Path>, header: [&str; 2], values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(f));
    w.write_record(header)?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn ser_round6<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&round6(*x)),
        None => s.serialize_none(),
    }
}

/// Parameters recorded in a report, by algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportParams {
    Sm {
        h: f64,
        n_prime: usize,
        renormalize_each_round: bool,
        merge_policy: MergePolicy,
    },
    Kmeans {
        k: usize,
        restarts: usize,
    },
    Dbscan {
        eps: f64,
        min_pts: usize,
        noise_convention: NoiseConvention,
    },
    Pam {
        k: usize,
    },
}

impl From<HyperParams> for ReportParams {
    fn from(p: HyperParams) -> Self {
        ReportParams::Sm {
            h: p.h,
            n_prime: p.n_prime,
            renormalize_each_round: p.renormalize_each_round,
            merge_policy: p.merge_policy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEntry {
    /// Zero-based row index of the round's densest member.
    pub densest: usize,
    /// Zero-based row indices extracted in the round.
    pub extracted: Vec<usize>,
}

/// On-disk form of a clustering run. Field order is fixed, so output is
/// deterministic; ASW values carry six decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReportFile {
    pub algorithm: String,
    pub distance: String,
    pub params: ReportParams,
    #[serde(rename = "K")]
    pub k: usize,
    pub cluster_sizes: Vec<usize>,
    #[serde(serialize_with = "ser_round6")]
    pub asw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "ser_round6")]
    pub accuracy: Option<f64>,
    /// One label per row, `1..=K`; 0 marks noise in density-based output.
    pub assignments: Vec<usize>,
    #[serde(default)]
    pub rounds: Vec<RoundEntry>,
    pub merged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "ser_round6")]
    pub pre_merge_asw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "ser_round6")]
    pub merged_asw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunReportFile {
    pub fn from_cluster_report(report: &ClusterReport, distance: DistanceMeasure) -> Self {
        Self {
            algorithm: "sm".into(),
            distance: distance.name().into(),
            params: report.params.into(),
            k: report.k(),
            cluster_sizes: report.cluster_sizes.clone(),
            asw: report.asw,
            accuracy: None,
            assignments: report.assignment.labels().to_vec(),
            rounds: report
                .rounds
                .iter()
                .map(|r| RoundEntry {
                    densest: r.densest_member,
                    extracted: r.extracted.clone(),
                })
                .collect(),
            merged: report.merged,
            pre_merge_asw: report.pre_merge_asw,
            merged_asw: report.merged_asw,
            noise_points: None,
            seed: None,
        }
    }

    pub fn from_kmeans(r: &KmeansResult, restarts: usize, seed: u64, asw: Option<f64>) -> Self {
        Self::partition(
            "kmeans",
            DistanceMeasure::Euclidean,
            ReportParams::Kmeans {
                k: r.centroids.len(),
                restarts,
            },
            r.assignment.labels(),
            asw,
        )
        .with_seed(seed)
    }

    pub fn from_pam(r: &PamResult, distance: DistanceMeasure, asw: Option<f64>) -> Self {
        Self::partition(
            "pam",
            distance,
            ReportParams::Pam { k: r.medoids.len() },
            r.assignment.labels(),
            asw,
        )
    }

    /// `K` counts clusters only; noise rows carry label 0.
    pub fn from_dbscan(
        r: &DbscanResult,
        distance: DistanceMeasure,
        noise_convention: NoiseConvention,
        asw: Option<f64>,
    ) -> Self {
        let mut out = Self::partition(
            "dbscan",
            distance,
            ReportParams::Dbscan {
                eps: r.eps,
                min_pts: r.min_pts,
                noise_convention,
            },
            &r.labels,
            asw,
        );
        out.k = r.n_clusters();
        out.cluster_sizes = r.cluster_sizes();
        out.noise_points = Some(r.n_noise());
        out
    }

    fn partition(
        algorithm: &str,
        distance: DistanceMeasure,
        params: ReportParams,
        labels: &[usize],
        asw: Option<f64>,
    ) -> Self {
        let k = labels.iter().copied().max().unwrap_or(0);
        let mut sizes = vec![0; k];
        for &l in labels.iter().filter(|&&l| l > 0) {
            sizes[l - 1] += 1;
        }
        Self {
            algorithm: algorithm.into(),
            distance: distance.name().into(),
            params,
            k,
            cluster_sizes: sizes,
            asw,
            accuracy: None,
            assignments: labels.to_vec(),
            rounds: Vec::new(),
            merged: false,
            pre_merge_asw: None,
            merged_asw: None,
            noise_points: None,
            seed: None,
        }
    }

    pub fn with_accuracy(mut self, accuracy: Option<f64>) -> Self {
        self.accuracy = accuracy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_report(path: impl AsRef<Path>, report: &RunReportFile) -> Result<()> {
    write_json(path.as_ref(), report)
}

pub fn read_report(path: impl AsRef<Path>) -> Result<RunReportFile> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRowEntry {
    pub h: f64,
    pub n_prime: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(serialize_with = "ser_round6")]
    pub asw: Option<f64>,
    pub cluster_sizes: Vec<usize>,
}

/// On-disk form of a grid scan: every row plus the selected run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReportFile {
    pub distance: String,
    pub rows: Vec<ScanRowEntry>,
    /// Index into `rows` of the selected pair.
    pub best: usize,
    pub best_report: RunReportFile,
}

impl ScanReportFile {
    pub fn from_scan(scan: &ScanResult, distance: DistanceMeasure) -> Self {
        Self {
            distance: distance.name().into(),
            rows: scan
                .rows
                .iter()
                .map(|r| ScanRowEntry {
                    h: r.h,
                    n_prime: r.n_prime,
                    k: r.k_hat,
                    asw: r.asw,
                    cluster_sizes: r.cluster_sizes.clone(),
                })
                .collect(),
            best: scan.best,
            best_report: RunReportFile::from_cluster_report(&scan.best_report, distance),
        }
    }
}

pub fn write_scan_report(path: impl AsRef<Path>, report: &ScanReportFile) -> Result<()> {
    write_json(path.as_ref(), report)
}
