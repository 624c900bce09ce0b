use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ClusterAssignment, DataMatrix};
use crate::datagen::SeededRng;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansResult {
    pub assignment: ClusterAssignment,
    /// Row-major `k x p` centroids, in label order.
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub objective: f64,
    /// Objective after each Lloyd iteration of the winning restart.
    pub history: Vec<f64>,
    /// Restart that produced the result.
    pub restart: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, mu) in centroids.iter().enumerate() {
        let d = sq_dist(x, mu);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(data: &DataMatrix, k: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let n = data.n();
    let mut centroids = vec![data.row(rng.gen_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = data.rows().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        let c = data.row(pick).to_vec();
        for (i, row) in data.rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(row, &c));
        }
        centroids.push(c);
    }
    centroids
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    objective: f64,
    history: Vec<f64>,
}

fn lloyd(data: &DataMatrix, mut centroids: Vec<Vec<f64>>) -> Run {
    let (n, p, k) = (data.n(), data.p(), centroids.len());
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, row) in data.rows().enumerate() {
            let (c, _) = nearest(row, &centroids);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; p]; k];
        let mut counts = vec![0usize; k];
        for (row, &c) in data.rows().zip(&labels) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(row) {
                *s += v;
            }
        }
        for c in 0..k {
            // an emptied cluster keeps its previous centroid
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let objective = data
            .rows()
            .zip(&labels)
            .map(|(row, &c)| sq_dist(row, &centroids[c]))
            .sum();
        history.push(objective);
        if !changed {
            break;
        }
    }
    Run {
        labels,
        objective: *history.last().expect("at least one iteration"),
        centroids,
        history,
    }
}

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` runs.
/// Restart `r` draws from substream `r` of `seed`, so results do not depend
/// on how restarts are scheduled.
pub fn kmeans(data: &DataMatrix, k: usize, seed: u64, restarts: usize) -> Result<KmeansResult> {
    data.validate()?;
    if k == 0 || k > data.n() {
        return Err(Error::param(format!(
            "k must lie in 1..={}, got {k}",
            data.n()
        )));
    }
    let restarts = restarts.max(1);
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = SeededRng::new(seed).substream(r as u64);
            let seeds = plus_plus_seeds(data, k, &mut rng);
            lloyd(data, seeds)
        })
        .collect();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.objective < a.1.objective { b } else { a })
        .expect("at least one restart");

    let assignment = ClusterAssignment::by_first_appearance(&best.labels);
    // reorder centroids to match the relabeled clusters
    let mut centroids = vec![Vec::new(); assignment.k()];
    for (&old, &new) in best.labels.iter().zip(assignment.labels()) {
        if centroids[new - 1].is_empty() {
            centroids[new - 1] = best.centroids[old].clone();
        }
    }
    Ok(KmeansResult {
        assignment,
        centroids,
        objective: best.objective,
        history: best.history,
        restart,
    })
}
