//! Cluster-quality measures: silhouette widths, average silhouette width,
//! cluster sizes and permutation-matched accuracy.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ClusterAssignment, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilhouetteProfile {
    /// `s(i)` per member.
    pub widths: Vec<f64>,
    /// Mean width per cluster, in label order.
    pub cluster_means: Vec<f64>,
    /// Mean of all widths.
    pub asw: f64,
}

pub fn silhouette_widths(assignment: &ClusterAssignment, d: &DistanceMatrix) -> Result<SilhouetteProfile> {
    silhouette_of_labels(assignment.labels(), d)
}

/// Silhouette profile for arbitrary (not necessarily contiguous) labels.
/// Members of singleton clusters get width 0.
pub fn silhouette_of_labels(labels: &[usize], d: &DistanceMatrix) -> Result<SilhouetteProfile> {
    if labels.len() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            got: labels.len(),
        });
    }
    let compact = ClusterAssignment::from_labels(labels);
    let k = compact.k();
    if k < 2 {
        return Err(Error::AswUndefined);
    }
    let lab = compact.labels();
    let sizes = compact.sizes();

    let widths: Vec<f64> = (0..lab.len())
        .into_par_iter()
        .map(|i| {
            let own = lab[i] - 1;
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for (j, &dij) in d.row(i).iter().enumerate() {
                sums[lab[j] - 1] += dij;
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .collect();

    let mut cluster_sums = vec![0.0; k];
    for (&l, &s) in lab.iter().zip(&widths) {
        cluster_sums[l - 1] += s;
    }
    let cluster_means = cluster_sums
        .iter()
        .zip(&sizes)
        .map(|(s, &n)| s / n as f64)
        .collect();
    let asw = widths.iter().sum::<f64>() / widths.len() as f64;
    Ok(SilhouetteProfile {
        widths,
        cluster_means,
        asw,
    })
}

/// Average silhouette width.
pub fn asw(assignment: &ClusterAssignment, d: &DistanceMatrix) -> Result<f64> {
    Ok(silhouette_widths(assignment, d)?.asw)
}

pub fn cluster_sizes(assignment: &ClusterAssignment) -> Vec<usize> {
    assignment.sizes()
}

/// Correct-classification percentage under the best injective matching of
/// predicted clusters to true classes. Members of unmatched predicted
/// clusters count as misclassified.
pub fn accuracy(predicted: &[usize], truth: &[i64]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::param("accuracy needs at least one member"));
    }
    let table = Contingency::new(predicted, truth);
    let matched = if table.size() <= 8 {
        table.best_by_permutation()
    } else {
        table.best_by_assignment()
    };
    Ok(100.0 * matched as f64 / predicted.len() as f64)
}

/// Square (zero-padded) count table: rows are predicted clusters, columns
/// true classes.
struct Contingency {
    counts: Vec<Vec<i64>>,
}

impl Contingency {
    fn new(predicted: &[usize], truth: &[i64]) -> Self {
        let mut rows = BTreeMap::new();
        let mut cols = BTreeMap::new();
        for &p in predicted {
            let next = rows.len();
            rows.entry(p).or_insert(next);
        }
        for &t in truth {
            let next = cols.len();
            cols.entry(t).or_insert(next);
        }
        let size = rows.len().max(cols.len());
        let mut counts = vec![vec![0i64; size]; size];
        for (p, t) in predicted.iter().zip(truth) {
            counts[rows[p]][cols[t]] += 1;
        }
        Self { counts }
    }

    fn size(&self) -> usize {
        self.counts.len()
    }

    fn best_by_permutation(&self) -> i64 {
        fn go(t: &Contingency, row: usize, used: &mut [bool], acc: i64, best: &mut i64) {
            if row == t.size() {
                *best = (*best).max(acc);
                return;
            }
            for col in 0..t.size() {
                if !used[col] {
                    used[col] = true;
                    go(t, row + 1, used, acc + t.counts[row][col], best);
                    used[col] = false;
                }
            }
        }
        let mut best = 0;
        go(self, 0, &mut vec![false; self.size()], 0, &mut best);
        best
    }

    /// Hungarian method on the negated counts.
    fn best_by_assignment(&self) -> i64 {
        let n = self.size();
        let cost = |i: usize, j: usize| -self.counts[i - 1][j - 1];
        let mut u = vec![0i64; n + 1];
        let mut v = vec![0i64; n + 1];
        let mut p = vec![0usize; n + 1];
        let mut way = vec![0usize; n + 1];
        for i in 1..=n {
            p[0] = i;
            let mut j0 = 0;
            let mut minv = vec![i64::MAX; n + 1];
            let mut used = vec![false; n + 1];
            loop {
                used[j0] = true;
                let i0 = p[j0];
                let mut delta = i64::MAX;
                let mut j1 = 0;
                for j in 1..=n {
                    if !used[j] {
                        let cur = cost(i0, j) - u[i0] - v[j];
                        if cur < minv[j] {
                            minv[j] = cur;
                            way[j] = j0;
                        }
                        if minv[j] < delta {
                            delta = minv[j];
                            j1 = j;
                        }
                    }
                }
                for j in 0..=n {
                    if used[j] {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
                if p[j0] == 0 {
                    break;
                }
            }
            loop {
                let j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
                if j0 == 0 {
                    break;
                }
            }
        }
        (1..=n).map(|j| self.counts[p[j] - 1][j - 1]).sum()
    }
}
