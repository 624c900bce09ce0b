use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::data::DistanceMatrix;
use crate::error::{Error, Result};
use crate::validation::{silhouette_of_labels, SilhouetteProfile};

/// Label carried by noise points.
pub const NOISE: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanResult {
    /// Cluster label per point, `1..=K`, or [`NOISE`].
    pub labels: Vec<usize>,
    pub core: Vec<bool>,
    pub eps: f64,
    pub min_pts: usize,
}

/// How noise points enter a silhouette computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    /// All noise points together form one extra group.
    #[default]
    AsGroup,
    /// Noise points are left out of the silhouette.
    Exclude,
    /// Every noise point is its own singleton cluster.
    Singletons,
}

impl DbscanResult {
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn n_noise(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }

    /// Cluster sizes in label order, noise not included.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters()];
        for &l in &self.labels {
            if l != NOISE {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }

    pub fn silhouette(&self, d: &DistanceMatrix, noise: NoiseConvention) -> Result<SilhouetteProfile> {
        match noise {
            NoiseConvention::AsGroup => silhouette_of_labels(&self.labels, d),
            NoiseConvention::Singletons => {
                let k = self.n_clusters();
                let mut next = k;
                let labels: Vec<usize> = self
                    .labels
                    .iter()
                    .map(|&l| {
                        if l == NOISE {
                            next += 1;
                            next
                        } else {
                            l
                        }
                    })
                    .collect();
                silhouette_of_labels(&labels, d)
            }
            NoiseConvention::Exclude => {
                let keep: Vec<usize> = (0..self.labels.len())
                    .filter(|&i| self.labels[i] != NOISE)
                    .collect();
                let labels: Vec<usize> = keep.iter().map(|&i| self.labels[i]).collect();
                silhouette_of_labels(&labels, &d.submatrix(&keep))
            }
        }
    }

    pub fn asw(&self, d: &DistanceMatrix, noise: NoiseConvention) -> Result<f64> {
        Ok(self.silhouette(d, noise)?.asw)
    }
}

/// Density-based clustering with brute-force region queries. A point is
/// core when at least `min_pts` points, itself included, lie within `eps`.
/// Clusters grow from core points in ascending index order; a border point
/// joins the first cluster that reaches it.
pub fn dbscan(d: &DistanceMatrix, eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::param(format!("eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::param("min_pts must be at least 1"));
    }
    let n = d.n();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| d.get(i, j) <= eps).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut labels = vec![NOISE; n];
    let mut cluster = 0;
    for start in 0..n {
        if !core[start] || labels[start] != NOISE {
            continue;
        }
        cluster += 1;
        labels[start] = cluster;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for &q in &neighbors[p] {
                if labels[q] == NOISE {
                    labels[q] = cluster;
                    if core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    Ok(DbscanResult {
        labels,
        core,
        eps,
        min_pts,
    })
}

/// Every member's distance to its `k`-th nearest other member, sorted
/// ascending.
pub fn knn_dist_profile(d: &DistanceMatrix, k: usize) -> Result<Vec<f64>> {
    let n = d.n();
    if k == 0 || k >= n {
        return Err(Error::param(format!(
            "k must lie in 1..={}, got {k}",
            n.saturating_sub(1)
        )));
    }
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d.get(i, j)).collect();
            row.select_nth_unstable_by(k - 1, f64::total_cmp);
            row[k - 1]
        })
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}
