//! Densest-neighborhood clustering over interpoint distances.
//!
//! Each round scores every surviving member by the kernel-estimated
//! probability of finding another member within `h` of it, takes the best
//! scorer as the next cluster center and removes its `h`-neighborhood as a
//! cluster. Rounds continue until nobody, or a single member, is left.
//! Clusters smaller than `n_prime` are then dissolved and their members
//! moved to the nearest cluster that is large enough, subject to the merge
//! policy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    ClusterAssignment, ClusterReport, DataMatrix, DistanceMatrix, HyperParams, MergePolicy,
    RoundTrace,
};
use crate::distance::{normalize_matrix, pairwise_matrix, DistanceMeasure};
use crate::error::{Error, Result};
use crate::kde::gaussian_kernel;
use crate::validation;

/// Whether a member's own zero distance enters its density estimate.
///
/// Both conventions give the same densest member because, within a round,
/// one is an increasing affine function of the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfDistance {
    #[default]
    Exclude,
    Include,
}

/// The surviving members of a round, viewed through the full matrix with
/// every distance divided by `scale`.
struct Survivors<'a> {
    d: &'a DistanceMatrix,
    members: &'a [usize],
    scale: f64,
}

impl Survivors<'_> {
    #[inline]
    fn dist(&self, a: usize, b: usize) -> f64 {
        self.d.get(self.members[a], self.members[b]) / self.scale
    }

    fn probability(&self, pos: usize, h: f64, conv: SelfDistance) -> f64 {
        let half = 0.5 * h;
        let mut sum = 0.0;
        let mut count = 0usize;
        for other in 0..self.members.len() {
            if other == pos && conv == SelfDistance::Exclude {
                continue;
            }
            sum += gaussian_kernel((half - self.dist(pos, other)) / h);
            count += 1;
        }
        sum / (count as f64 * h) * h
    }

    /// Position of the densest member; ties go to the smallest position.
    fn densest(&self, h: f64, conv: SelfDistance) -> usize {
        let scores: Vec<f64> = (0..self.members.len())
            .into_par_iter()
            .map(|pos| self.probability(pos, h, conv))
            .collect();
        let mut best = 0;
        for (pos, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = pos;
            }
        }
        best
    }

    /// Positions strictly closer than `h` to `center`, ascending.
    fn neighborhood(&self, center: usize, h: f64) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&j| j == center || self.dist(center, j) < h)
            .collect()
    }

    fn max(&self) -> f64 {
        let mut max = 0.0f64;
        for a in 0..self.members.len() {
            for b in (a + 1)..self.members.len() {
                max = max.max(self.d.get(self.members[a], self.members[b]));
            }
        }
        max
    }
}

fn whole(d: &DistanceMatrix) -> Vec<usize> {
    (0..d.n()).collect()
}

/// Index of the member whose `h`-neighborhood is estimated densest.
pub fn densest_member(d_norm: &DistanceMatrix, h: f64) -> Result<usize> {
    densest_member_with(d_norm, h, SelfDistance::Exclude)
}

pub fn densest_member_with(d_norm: &DistanceMatrix, h: f64, conv: SelfDistance) -> Result<usize> {
    if d_norm.n() < 2 {
        return Err(Error::param("densest member needs at least two members"));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    let members = whole(d_norm);
    let view = Survivors {
        d: d_norm,
        members: &members,
        scale: 1.0,
    };
    Ok(view.densest(h, conv))
}

/// Members at distance strictly below `h` from `center`, the center included.
pub fn extract_cluster(d_norm: &DistanceMatrix, center: usize, h: f64) -> Result<Vec<usize>> {
    if center >= d_norm.n() {
        return Err(Error::param(format!(
            "center {center} out of range for {} members",
            d_norm.n()
        )));
    }
    let members = whole(d_norm);
    let view = Survivors {
        d: d_norm,
        members: &members,
        scale: 1.0,
    };
    Ok(view.neighborhood(center, h))
}

/// Repeated extraction until no member, or a single member, is left.
/// Labels follow extraction order starting at 1.
pub fn run_rounds(
    d_norm: &DistanceMatrix,
    h: f64,
    renormalize_each_round: bool,
) -> Result<(ClusterAssignment, Vec<RoundTrace>)> {
    run_rounds_with(d_norm, h, renormalize_each_round, SelfDistance::Exclude)
}

pub fn run_rounds_with(
    d_norm: &DistanceMatrix,
    h: f64,
    renormalize_each_round: bool,
    conv: SelfDistance,
) -> Result<(ClusterAssignment, Vec<RoundTrace>)> {
    let n = d_norm.n();
    if n == 0 {
        return Err(Error::param("no members to cluster"));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    let mut labels = vec![0usize; n];
    let mut alive: Vec<usize> = whole(d_norm);
    let mut rounds = Vec::new();

    while alive.len() > 1 {
        let mut scale = if renormalize_each_round {
            Survivors {
                d: d_norm,
                members: &alive,
                scale: 1.0,
            }
            .max()
        } else {
            1.0
        };
        if scale <= 0.0 {
            // every survivor coincides; they all fall in one neighborhood
            scale = 1.0;
        }
        let view = Survivors {
            d: d_norm,
            members: &alive,
            scale,
        };
        let center = view.densest(h, conv);
        let taken = view.neighborhood(center, h);
        let label = rounds.len() + 1;
        let extracted: Vec<usize> = taken.iter().map(|&pos| alive[pos]).collect();
        for &i in &extracted {
            labels[i] = label;
        }
        rounds.push(RoundTrace {
            round_index: label,
            densest_member: alive[center],
            extracted,
            renormalization_max: scale,
        });
        alive.retain(|&i| labels[i] == 0);
    }
    if let Some(&last) = alive.first() {
        let label = rounds.len() + 1;
        labels[last] = label;
        rounds.push(RoundTrace {
            round_index: label,
            densest_member: last,
            extracted: vec![last],
            renormalization_max: 1.0,
        });
    }
    Ok((ClusterAssignment::from_labels(&labels), rounds))
}

/// Moves every member of a cluster smaller than `n_prime` into the
/// qualifying cluster (size at least `n_prime` before merging) with the
/// smallest mean distance to it. Ties go to the smaller label. If no
/// cluster qualifies the input is returned unchanged.
pub fn merge_small_clusters(
    pre: &ClusterAssignment,
    d_norm: &DistanceMatrix,
    n_prime: usize,
) -> Result<ClusterAssignment> {
    if pre.len() != d_norm.n() {
        return Err(Error::DimensionMismatch {
            expected: d_norm.n(),
            got: pre.len(),
        });
    }
    let sizes = pre.sizes();
    let groups = pre.members();
    let qualifying: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] >= n_prime).collect();
    if qualifying.len() == sizes.len() {
        return Ok(pre.clone());
    }
    if qualifying.is_empty() {
        log::warn!("no cluster reaches the minimum size {n_prime}; merge step skipped");
        return Ok(pre.clone());
    }
    let mut labels = pre.labels().to_vec();
    for (i, label) in labels.iter_mut().enumerate() {
        if sizes[*label - 1] >= n_prime {
            continue;
        }
        let row = d_norm.row(i);
        let mut best = (f64::INFINITY, 0);
        for &c in &qualifying {
            let mean = groups[c].iter().map(|&j| row[j]).sum::<f64>() / groups[c].len() as f64;
            if mean < best.0 {
                best = (mean, c);
            }
        }
        *label = best.1 + 1;
    }
    Ok(ClusterAssignment::from_labels(&labels))
}

fn optional_asw(a: &ClusterAssignment, raw: &DistanceMatrix) -> Result<Option<f64>> {
    match validation::asw(a, raw) {
        Ok(v) => Ok(Some(v)),
        Err(Error::AswUndefined) => Ok(None),
        Err(e) => Err(e),
    }
}

fn finish(
    raw: &DistanceMatrix,
    d_norm: &DistanceMatrix,
    params: &HyperParams,
    pre: ClusterAssignment,
    rounds: Vec<RoundTrace>,
) -> Result<ClusterReport> {
    let post = merge_small_clusters(&pre, d_norm, params.n_prime)?;
    let pre_asw = optional_asw(&pre, raw)?;
    let changed = post != pre;
    let merged_asw = if changed { optional_asw(&post, raw)? } else { None };

    let take_merged = changed
        && match params.merge_policy {
            MergePolicy::Always => true,
            MergePolicy::AswGuard => match (pre_asw, merged_asw) {
                (Some(a), Some(b)) => b > a,
                (None, Some(_)) => true,
                _ => false,
            },
        };
    let (assignment, asw) = if take_merged {
        (post, merged_asw)
    } else {
        (pre.clone(), pre_asw)
    };
    Ok(ClusterReport {
        params: *params,
        cluster_sizes: assignment.sizes(),
        assignment,
        asw,
        rounds,
        merged: take_merged,
        pre_merge_assignment: pre,
        pre_merge_asw: pre_asw,
        merged_asw,
    })
}

fn single_member_report(params: &HyperParams) -> ClusterReport {
    let a = ClusterAssignment::from_labels(&[1]);
    ClusterReport {
        params: *params,
        cluster_sizes: vec![1],
        assignment: a.clone(),
        asw: None,
        rounds: vec![RoundTrace {
            round_index: 1,
            densest_member: 0,
            extracted: vec![0],
            renormalization_max: 1.0,
        }],
        merged: false,
        pre_merge_assignment: a,
        pre_merge_asw: None,
        merged_asw: None,
    }
}

/// Full pipeline on a raw (unnormalized) distance matrix. Silhouettes are
/// computed on `raw`.
pub fn sm_cluster(raw: &DistanceMatrix, params: &HyperParams) -> Result<ClusterReport> {
    params.validate()?;
    if raw.n() == 1 {
        return Ok(single_member_report(params));
    }
    let d_norm = normalize_matrix(raw)?;
    let (pre, rounds) = run_rounds(&d_norm, params.h, params.renormalize_each_round)?;
    finish(raw, &d_norm, params, pre, rounds)
}

/// Convenience wrapper computing the distance matrix first.
pub fn sm_cluster_data(
    data: &DataMatrix,
    measure: DistanceMeasure,
    params: &HyperParams,
) -> Result<ClusterReport> {
    let raw = pairwise_matrix(data, measure)?;
    sm_cluster(&raw, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub h: f64,
    pub n_prime: usize,
    pub asw: Option<f64>,
    pub k_hat: usize,
    pub cluster_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// One row per `(h, n_prime)` pair, `h`-major in grid order.
    pub rows: Vec<ScanRow>,
    /// Index into `rows` of the highest-ASW row.
    pub best: usize,
    pub best_report: ClusterReport,
}

impl ScanResult {
    pub fn best_row(&self) -> &ScanRow {
        &self.rows[self.best]
    }
}

/// Runs the clustering for every `(h, n_prime)` pair and picks the one
/// with the highest ASW, preferring smaller `h` and then smaller `n_prime`
/// on ties. Rows with a single cluster never win.
///
/// `defaults` supplies the policy switches; its `h` and `n_prime` are
/// ignored.
pub fn scan(
    raw: &DistanceMatrix,
    h_grid: &[f64],
    n_prime_grid: &[usize],
    defaults: &HyperParams,
) -> Result<ScanResult> {
    if h_grid.is_empty() || n_prime_grid.is_empty() {
        return Err(Error::param("scan grids must be nonempty"));
    }
    let mut params = Vec::new();
    for &h in h_grid {
        for &n_prime in n_prime_grid {
            let p = HyperParams {
                h,
                n_prime,
                ..*defaults
            };
            p.validate()?;
            params.push(p);
        }
    }

    let mut reports = Vec::with_capacity(params.len());
    if raw.n() == 1 {
        reports.extend(params.iter().map(single_member_report));
    } else {
        let d_norm = normalize_matrix(raw)?;
        let mut cached: Option<(f64, ClusterAssignment, Vec<RoundTrace>)> = None;
        for p in &params {
            let (pre, rounds) = match &cached {
                Some((h, pre, rounds)) if *h == p.h => (pre.clone(), rounds.clone()),
                _ => {
                    let (pre, rounds) = run_rounds(&d_norm, p.h, p.renormalize_each_round)?;
                    cached = Some((p.h, pre.clone(), rounds.clone()));
                    (pre, rounds)
                }
            };
            reports.push(finish(raw, &d_norm, p, pre, rounds)?);
        }
    }

    let rows: Vec<ScanRow> = reports
        .iter()
        .map(|r| ScanRow {
            h: r.params.h,
            n_prime: r.params.n_prime,
            asw: r.asw,
            k_hat: r.k(),
            cluster_sizes: r.cluster_sizes.clone(),
        })
        .collect();

    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        let Some(a) = row.asw else { continue };
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &rows[b];
                let ca = cur.asw.expect("best rows carry an ASW");
                a > ca
                    || (a == ca
                        && (row.h < cur.h || (row.h == cur.h && row.n_prime < cur.n_prime)))
            }
        };
        if better {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| {
        Error::Degenerate("every grid point yields a single cluster".into())
    })?;
    Ok(ScanResult {
        best_report: reports.swap_remove(best),
        rows,
        best,
    })
}
