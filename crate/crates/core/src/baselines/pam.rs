use serde::{Deserialize, Serialize};

use crate::data::{ClusterAssignment, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamResult {
    pub assignment: ClusterAssignment,
    /// Medoid row index per cluster, in label order.
    pub medoids: Vec<usize>,
    /// Sum of distances from each member to its medoid.
    pub cost: f64,
    /// Total cost after BUILD and after every accepted swap.
    pub cost_history: Vec<f64>,
}

/// Nearest and second-nearest medoid slot per member.
fn nearest_two(d: &DistanceMatrix, medoids: &[usize], i: usize) -> (usize, f64, f64) {
    let mut best = (0, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (slot, &m) in medoids.iter().enumerate() {
        let v = d.get(i, m);
        if v < best.1 {
            second = best.1;
            best = (slot, v);
        } else if v < second {
            second = v;
        }
    }
    (best.0, best.1, second)
}

fn total_cost(d: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..d.n()).map(|i| nearest_two(d, medoids, i).1).sum()
}

fn build(d: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = d.n();
    let mut medoids = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best = (f64::INFINITY, usize::MAX);
        for cand in 0..n {
            if medoids.contains(&cand) {
                continue;
            }
            let cost: f64 = (0..n).map(|i| nearest[i].min(d.get(i, cand))).sum();
            if cost < best.0 {
                best = (cost, cand);
            }
        }
        medoids.push(best.1);
        for (i, v) in nearest.iter_mut().enumerate() {
            *v = v.min(d.get(i, best.1));
        }
    }
    medoids
}

/// Partitioning around medoids: greedy BUILD, then SWAP until no exchange
/// of a medoid with a non-medoid lowers the total cost. Each pass applies
/// the single best improving swap; candidates are scanned in index order.
pub fn pam(d: &DistanceMatrix, k: usize) -> Result<PamResult> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::param(format!("k must lie in 1..={n}, got {k}")));
    }
    let mut medoids = build(d, k);
    let mut cost = total_cost(d, &medoids);
    let mut history = vec![cost];
    let tol = 1e-12 * d.max().max(1.0);

    loop {
        let near: Vec<(usize, f64, f64)> = (0..n).map(|i| nearest_two(d, &medoids, i)).collect();
        let mut best = (0.0, 0, 0);
        for slot in 0..k {
            for cand in 0..n {
                if medoids.contains(&cand) {
                    continue;
                }
                let mut delta = 0.0;
                for (i, &(s, d1, d2)) in near.iter().enumerate() {
                    let dc = d.get(i, cand);
                    delta += if s == slot {
                        dc.min(d2) - d1
                    } else {
                        dc.min(d1) - d1
                    };
                }
                if delta < best.0 {
                    best = (delta, slot, cand);
                }
            }
        }
        if best.0 >= -tol {
            break;
        }
        medoids[best.1] = best.2;
        let new_cost = total_cost(d, &medoids);
        debug_assert!(new_cost < cost);
        cost = new_cost;
        history.push(cost);
    }

    let slots: Vec<usize> = (0..n).map(|i| nearest_two(d, &medoids, i).0).collect();
    let assignment = ClusterAssignment::by_first_appearance(&slots);
    let mut ordered = vec![usize::MAX; k];
    for (&slot, &label) in slots.iter().zip(assignment.labels()) {
        ordered[label - 1] = medoids[slot];
    }
    ordered.retain(|&m| m != usize::MAX);
    Ok(PamResult {
        assignment,
        medoids: ordered,
        cost,
        cost_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        DistanceMatrix::from_square(&rows).unwrap()
    }

    #[test]
    fn one_medoid_minimizes_total_distance() {
        let pts = [0.0, 1.0, 2.0, 7.0, 20.0];
        let d = line(&pts);
        let r = pam(&d, 1).unwrap();
        let brute = (0..pts.len())
            .min_by(|&a, &b| {
                let ca: f64 = d.row(a).iter().sum();
                let cb: f64 = d.row(b).iter().sum();
                ca.partial_cmp(&cb).unwrap()
            })
            .unwrap();
        assert_eq!(r.medoids, vec![brute]);
    }

    #[test]
    fn two_groups_on_a_line() {
        let r = pam(&line(&[0.0, 1.0, 10.0, 11.0]), 2).unwrap();
        assert_eq!(r.assignment.labels(), &[1, 1, 2, 2]);
        assert_eq!(r.cost, 2.0);
    }

    #[test]
    fn swaps_strictly_decrease_cost() {
        let data = crate::datasets::ruspini();
        let d = crate::distance::pairwise_matrix(&data, crate::distance::DistanceMeasure::Euclidean)
            .unwrap();
        for k in 2..=6 {
            let r = pam(&d, k).unwrap();
            for w in r.cost_history.windows(2) {
                assert!(w[1] < w[0]);
            }
            assert_eq!(r.medoids.len(), k);
        }
    }

    #[test]
    fn k_out_of_range() {
        assert!(pam(&line(&[0.0, 1.0]), 3).is_err());
        assert!(pam(&line(&[0.0, 1.0]), 0).is_err());
    }
}
