//! Shared data representations: observations, schemas, distances,
//! parameters, assignments and reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measurement scale of a single column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Binary,
    Categorical,
}

/// Per-column measurement scales of a [`DataMatrix`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSchema {
    columns: Vec<ColumnKind>,
}

impl VariableSchema {
    pub fn new(columns: Vec<ColumnKind>) -> Self {
        Self { columns }
    }

    /// All `p` columns continuous.
    pub fn continuous(p: usize) -> Self {
        Self {
            columns: vec![ColumnKind::Continuous; p],
        }
    }

    pub fn columns(&self) -> &[ColumnKind] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn kind(&self, col: usize) -> ColumnKind {
        self.columns[col]
    }
}

/// `n` observations of `p` real-valued features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
    schema: VariableSchema,
    names: Vec<String>,
    labels: Option<Vec<i64>>,
}

impl DataMatrix {
    /// Builds an all-continuous matrix from rows. Rows must be non-empty and
    /// rectangular; content checks are left to [`DataMatrix::validate`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("data has no rows".into()));
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::Malformed("data has no columns".into()));
        }
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Malformed(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            n,
            p,
            values,
            schema: VariableSchema::continuous(p),
            names: (1..=p).map(|j| format!("x{j}")).collect(),
            labels: None,
        })
    }

    /// Builds a matrix from a flat row-major buffer.
    pub fn from_flat(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Malformed("data must have n >= 1 and p >= 1".into()));
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                got: values.len(),
            });
        }
        Ok(Self {
            n,
            p,
            values,
            schema: VariableSchema::continuous(p),
            names: (1..=p).map(|j| format!("x{j}")).collect(),
            labels: None,
        })
    }

    pub fn with_schema(mut self, schema: VariableSchema) -> Result<Self> {
        if schema.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: schema.len(),
            });
        }
        self.schema = schema;
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    /// Attaches ground-truth labels. Length is checked by `validate`.
    pub fn with_labels(mut self, labels: Vec<i64>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Checks finiteness, binary-column contents and label length, reporting
    /// the first violation found in row-major order.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidCell {
                        row: i,
                        col: j,
                        reason: format!("non-finite value {v}"),
                    });
                }
                if self.schema.kind(j) == ColumnKind::Binary && v != 0.0 && v != 1.0 {
                    return Err(Error::InvalidCell {
                        row: i,
                        col: j,
                        reason: format!("binary column holds {v}, expected 0 or 1"),
                    });
                }
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(Error::LabelLength {
                    expected: self.n,
                    got: labels.len(),
                });
            }
        }
        Ok(())
    }

    /// Exact per-column `(min, max)`.
    pub fn column_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.p];
        for row in self.rows() {
            for (r, &v) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        ranges
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.p);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        let mut out = Self::from_flat(idx.len(), self.p, values)?;
        out.schema = self.schema.clone();
        out.names = self.names.clone();
        out.labels = self
            .labels
            .as_ref()
            .map(|l| idx.iter().map(|&i| l[i]).collect());
        Ok(out)
    }
}

/// Dense symmetric matrix of interpoint distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    normalized: bool,
}

impl DistanceMatrix {
    /// Wraps a row-major buffer that the caller guarantees is symmetric with
    /// zero diagonal.
    pub(crate) fn from_raw_parts(n: usize, entries: Vec<f64>, normalized: bool) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self {
            n,
            entries,
            normalized,
        }
    }

    /// Builds a matrix from user-supplied square rows. Asymmetry up to
    /// `1e-9` is averaged away and near-zero diagonals are zeroed; anything
    /// larger is rejected.
    pub fn from_square(rows: &[Vec<f64>]) -> Result<Self> {
        const TOL: f64 = 1e-9;
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("distance matrix is empty".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let d = rows[i][i];
            if !d.is_finite() || d.abs() > TOL {
                return Err(Error::InvalidCell {
                    row: i,
                    col: i,
                    reason: format!("diagonal entry {d} is not zero"),
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidCell {
                        row: i,
                        col: j,
                        reason: format!("distance {a} is not a finite nonnegative number"),
                    });
                }
                if (a - b).abs() > TOL {
                    return Err(Error::InvalidCell {
                        row: i,
                        col: j,
                        reason: format!("asymmetric entries {a} and {b}"),
                    });
                }
                let v = 0.5 * (a + b);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self {
            n,
            entries,
            normalized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every entry by `c > 0`. The result is not flagged normalized.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
            normalized: false,
        }
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in idx {
            let row = self.row(i);
            entries.extend(idx.iter().map(|&j| row[j]));
        }
        Self {
            n: m,
            entries,
            normalized: false,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks_exact(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// What to do with clusters smaller than the minimum size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MergePolicy {
    /// Merge unconditionally.
    Always,
    /// Keep the merged partition only when it scores a strictly higher
    /// average silhouette width than the unmerged one.
    #[default]
    AswGuard,
}

/// Tuning parameters of the clustering algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Neighborhood radius and kernel bandwidth on the normalized scale.
    pub h: f64,
    /// Minimum cluster size.
    pub n_prime: usize,
    pub renormalize_each_round: bool,
    pub merge_policy: MergePolicy,
}

impl HyperParams {
    pub fn new(h: f64, n_prime: usize) -> Result<Self> {
        let p = Self {
            h,
            n_prime,
            renormalize_each_round: true,
            merge_policy: MergePolicy::AswGuard,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_renormalize(mut self, on: bool) -> Self {
        self.renormalize_each_round = on;
        self
    }

    pub fn with_merge_policy(mut self, policy: MergePolicy) -> Self {
        self.merge_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::param(format!("h must lie in (0, 1), got {}", self.h)));
        }
        if self.n_prime == 0 {
            return Err(Error::param("n_prime must be at least 1"));
        }
        Ok(())
    }
}

/// Hard partition: one 1-based label per observation, labels contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
}

impl ClusterAssignment {
    /// Relabels arbitrary labels to `1..=K` in ascending order of the
    /// original label values.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut distinct: Vec<usize> = raw.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw
            .iter()
            .map(|l| distinct.binary_search(l).expect("label present") + 1)
            .collect();
        Self { labels }
    }

    /// Relabels arbitrary labels to `1..=K` in order of first appearance.
    pub fn by_first_appearance(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = map.len() + 1;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Sizes in label order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }

    /// Member indices per cluster, in label order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l - 1].push(i);
        }
        out
    }
}

/// One extraction round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round_index: usize,
    /// Original row index of the densest member.
    pub densest_member: usize,
    /// Original row indices extracted this round, ascending.
    pub extracted: Vec<usize>,
    /// Divisor applied to the surviving submatrix this round.
    pub renormalization_max: f64,
}

/// Complete outcome of one clustering run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub params: HyperParams,
    pub assignment: ClusterAssignment,
    pub cluster_sizes: Vec<usize>,
    /// ASW of the returned assignment; `None` when it has one cluster.
    pub asw: Option<f64>,
    pub rounds: Vec<RoundTrace>,
    /// True when the returned assignment is the merged one and differs from
    /// the pre-merge assignment.
    pub merged: bool,
    pub pre_merge_assignment: ClusterAssignment,
    pub pre_merge_asw: Option<f64>,
    /// ASW of the merged alternative, whether or not it was kept.
    pub merged_asw: Option<f64>,
}

impl ClusterReport {
    pub fn k(&self) -> usize {
        self.assignment.k()
    }
}
