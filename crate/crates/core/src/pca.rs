//! Two-component principal component projection for plotting.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Largest dimension handled by the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 500;
const JACOBI_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;
const POWER_TOL: f64 = 1e-9;
const MAX_POWER_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Pca2 {
    /// Scores on the first two components, one pair per row.
    pub projection: Vec<[f64; 2]>,
    /// Share of total variance carried by each component.
    pub fractions: [f64; 2],
    /// Unit loading vectors.
    pub components: [Vec<f64>; 2],
    /// Covariance eigenvalues of the two components.
    pub eigenvalues: [f64; 2],
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues and eigenvectors (as columns of the row-major `p x p`
/// matrix), unsorted.
pub(crate) fn jacobi_eigen(mut a: Vec<f64>, p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; p * p];
    for i in 0..p {
        v[i * p + i] = 1.0;
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..p)
            .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * p + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off < JACOBI_TOL {
            break;
        }
        for r in 0..p {
            for q in (r + 1)..p {
                let apq = a[r * p + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * p + q] - a[r * p + r]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let (akr, akq) = (a[k * p + r], a[k * p + q]);
                    a[k * p + r] = c * akr - s * akq;
                    a[k * p + q] = s * akr + c * akq;
                }
                for k in 0..p {
                    let (ark, aqk) = (a[r * p + k], a[q * p + k]);
                    a[r * p + k] = c * ark - s * aqk;
                    a[q * p + k] = s * ark + c * aqk;
                }
                for k in 0..p {
                    let (vkr, vkq) = (v[k * p + r], v[k * p + q]);
                    v[k * p + r] = c * vkr - s * vkq;
                    v[k * p + q] = s * vkr + c * vkq;
                }
            }
        }
    }
    ((0..p).map(|i| a[i * p + i]).collect(), v)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Flips `v` so its largest-magnitude entry is positive.
fn fix_sign(v: &mut [f64]) {
    let mut big = 0.0f64;
    for &x in v.iter() {
        if x.abs() > big.abs() {
            big = x;
        }
    }
    if big < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Column-centered copy of the data, row-major.
fn centered(data: &DataMatrix) -> Vec<f64> {
    let (n, p) = (data.n(), data.p());
    let mut means = vec![0.0; p];
    for row in data.rows() {
        for (m, &x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut out = Vec::with_capacity(n * p);
    for row in data.rows() {
        out.extend(row.iter().zip(&means).map(|(x, m)| x - m));
    }
    out
}

fn top_two_dense(x: &[f64], n: usize, p: usize) -> ([f64; 2], [Vec<f64>; 2]) {
    let mut cov = vec![0.0; p * p];
    for row in x.chunks(p) {
        for i in 0..p {
            for j in i..p {
                cov[i * p + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            cov[i * p + j] /= (n - 1) as f64;
            cov[j * p + i] = cov[i * p + j];
        }
    }
    let (vals, vecs) = jacobi_eigen(cov, p);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let column = |c: usize| (0..p).map(|k| vecs[k * p + c]).collect::<Vec<f64>>();
    ([vals[order[0]], vals[order[1]]], [column(order[0]), column(order[1])])
}

/// `cov * v` without forming the covariance.
fn cov_times(x: &[f64], n: usize, p: usize, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p];
    for row in x.chunks(p) {
        let s = dot(row, v);
        for (o, &r) in out.iter_mut().zip(row) {
            *o += s * r;
        }
    }
    out.iter_mut().for_each(|o| *o /= (n - 1) as f64);
    out
}

/// Top two eigenpairs by orthogonal (subspace) power iteration started
/// from the first two standard basis vectors.
fn top_two_power(x: &[f64], n: usize, p: usize) -> ([f64; 2], [Vec<f64>; 2]) {
    let mut v1 = vec![0.0; p];
    let mut v2 = vec![0.0; p];
    v1[0] = 1.0;
    v2[1] = 1.0;
    for iter in 0..MAX_POWER_ITERS {
        let mut w1 = cov_times(x, n, p, &v1);
        let mut w2 = cov_times(x, n, p, &v2);
        normalize(&mut w1);
        let proj = dot(&w1, &w2);
        w2.iter_mut().zip(&w1).for_each(|(b, a)| *b -= proj * a);
        normalize(&mut w2);
        let change = (1.0 - dot(&v1, &w1).abs()).max(1.0 - dot(&v2, &w2).abs());
        v1 = w1;
        v2 = w2;
        if change < POWER_TOL {
            break;
        }
        if iter + 1 == MAX_POWER_ITERS {
            log::warn!("power iteration stopped after {MAX_POWER_ITERS} iterations");
        }
    }
    // Rayleigh-Ritz on the converged plane orders the pair exactly.
    let (c1, c2) = (cov_times(x, n, p, &v1), cov_times(x, n, p, &v2));
    let small = vec![dot(&v1, &c1), dot(&v1, &c2), dot(&v2, &c1), dot(&v2, &c2)];
    let (vals, vecs) = jacobi_eigen(small, 2);
    let (hi, lo) = if vals[0] >= vals[1] { (0, 1) } else { (1, 0) };
    let lift = |c: usize| -> Vec<f64> {
        v1.iter()
            .zip(&v2)
            .map(|(a, b)| vecs[c] * a + vecs[2 + c] * b)
            .collect()
    };
    ([vals[hi], vals[lo]], [lift(hi), lift(lo)])
}

/// Projects centered data onto the top two principal components of the
/// sample covariance. Up to [`MAX_DENSE_DIM`] columns the covariance is
/// diagonalized by Jacobi rotations; wider data use power iteration.
pub fn pca2(data: &DataMatrix) -> Result<Pca2> {
    let (n, p) = (data.n(), data.p());
    if n < 2 || p < 2 {
        return Err(Error::param(format!(
            "principal components need n >= 2 and p >= 2, got n = {n}, p = {p}"
        )));
    }
    let x = centered(data);
    let total: f64 = x.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64;
    if total <= 0.0 {
        return Err(Error::Degenerate("data have zero variance".into()));
    }
    let (eigenvalues, mut components) = if p <= MAX_DENSE_DIM {
        top_two_dense(&x, n, p)
    } else {
        top_two_power(&x, n, p)
    };
    for c in components.iter_mut() {
        normalize(c);
        fix_sign(c);
    }
    let projection = x
        .chunks(p)
        .map(|row| [dot(row, &components[0]), dot(row, &components[1])])
        .collect();
    Ok(Pca2 {
        projection,
        fractions: [
            eigenvalues[0].max(0.0) / total,
            eigenvalues[1].max(0.0) / total,
        ],
        components,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_covariance() {
        // x takes +-2 and y takes +-1 in a balanced design: covariance
        // diag(4, 1) * n / (n - 1)
        let rows = vec![
            vec![2.0, 1.0],
            vec![2.0, -1.0],
            vec![-2.0, 1.0],
            vec![-2.0, -1.0],
        ];
        let d = DataMatrix::from_rows(&rows).unwrap();
        let r = pca2(&d).unwrap();
        assert!((r.fractions[0] - 0.8).abs() < 1e-12);
        assert!((r.fractions[1] - 0.2).abs() < 1e-12);
        for (proj, row) in r.projection.iter().zip(&rows) {
            assert!((proj[0].abs() - row[0].abs()).abs() < 1e-12);
            assert!((proj[1].abs() - row[1].abs()).abs() < 1e-12);
        }
        assert_eq!(r.components[0], vec![1.0, 0.0]);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let d = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(pca2(&d), Err(Error::Degenerate(_))));
        let d = DataMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(pca2(&d).is_err());
    }

    fn sample_covariance(d: &DataMatrix) -> Vec<Vec<f64>> {
        let x = centered(d);
        let (n, p) = (d.n(), d.p());
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| x.chunks(p).map(|r| r[i] * r[j]).sum::<f64>() / (n - 1) as f64)
                    .collect()
            })
            .collect()
    }

    /// Roots of the characteristic polynomial in descending order, by the
    /// closed forms for 2x2 and 3x3 symmetric matrices.
    fn char_poly_roots(c: &[Vec<f64>]) -> Vec<f64> {
        match c.len() {
            2 => {
                let (tr, det) = (c[0][0] + c[1][1], c[0][0] * c[1][1] - c[0][1] * c[1][0]);
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                vec![tr / 2.0 + disc, tr / 2.0 - disc]
            }
            3 => {
                let q = (c[0][0] + c[1][1] + c[2][2]) / 3.0;
                let p1 = c[0][1].powi(2) + c[0][2].powi(2) + c[1][2].powi(2);
                let p2 = (0..3).map(|i| (c[i][i] - q).powi(2)).sum::<f64>() + 2.0 * p1;
                let p = (p2 / 6.0).sqrt();
                let b: Vec<Vec<f64>> = (0..3)
                    .map(|i| {
                        (0..3)
                            .map(|j| (c[i][j] - if i == j { q } else { 0.0 }) / p)
                            .collect()
                    })
                    .collect();
                let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                    - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                    + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
                let phi = (det_b / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
                let e1 = q + 2.0 * p * phi.cos();
                let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
                vec![e1, 3.0 * q - e1 - e3, e3]
            }
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn matches_characteristic_polynomial(
            p in 2usize..=3,
            cells in prop::collection::vec(-5.0f64..5.0, 60),
        ) {
            let n = cells.len() / p;
            let d = DataMatrix::from_flat(n, p, cells[..n * p].to_vec()).unwrap();
            let r = pca2(&d).unwrap();
            let roots = char_poly_roots(&sample_covariance(&d));
            let scale = roots[0].abs().max(1.0);
            prop_assert!((r.eigenvalues[0] - roots[0]).abs() < 1e-8 * scale);
            prop_assert!((r.eigenvalues[1] - roots[1]).abs() < 1e-8 * scale);
            prop_assert!(r.fractions[0] >= r.fractions[1]);
            prop_assert!(r.fractions[0] + r.fractions[1] <= 1.0 + 1e-12);
        }

        #[test]
        fn projection_columns_orthogonal(
            p in 2usize..8,
            cells in prop::collection::vec(-5.0f64..5.0, 200),
        ) {
            let n = cells.len() / p;
            let d = DataMatrix::from_flat(n, p, cells[..n * p].to_vec()).unwrap();
            let r = pca2(&d).unwrap();
            let a: Vec<f64> = r.projection.iter().map(|x| x[0]).collect();
            let b: Vec<f64> = r.projection.iter().map(|x| x[1]).collect();
            let cos = dot(&a, &b) / (dot(&a, &a).sqrt() * dot(&b, &b).sqrt());
            prop_assert!(cos.abs() < 1e-8);
            prop_assert!(dot(&r.components[0], &r.components[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn power_iteration_agrees_with_jacobi() {
        let mut rng = crate::datagen::SeededRng::new(3);
        let (n, p) = (40, 30);
        // anisotropic columns give a clear spectral gap
        let values: Vec<f64> = (0..n * p)
            .map(|i| (rng.uniform() - 0.5) * (1.0 + 10.0 / (1 + i % p) as f64))
            .collect();
        let x = centered(&DataMatrix::from_flat(n, p, values).unwrap());
        let (dense_vals, mut dense_vecs) = top_two_dense(&x, n, p);
        let (power_vals, mut power_vecs) = top_two_power(&x, n, p);
        for c in 0..2 {
            assert!((dense_vals[c] - power_vals[c]).abs() < 1e-6 * dense_vals[0]);
            fix_sign(&mut dense_vecs[c]);
            fix_sign(&mut power_vecs[c]);
            let diff: f64 = dense_vecs[c]
                .iter()
                .zip(&power_vecs[c])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-3, "component {c}: {diff}");
        }
    }

    #[test]
    fn wide_data_use_power_iteration() {
        let mut rng = crate::datagen::SeededRng::new(5);
        let (n, p) = (20, 600);
        let values: Vec<f64> = (0..n * p).map(|_| rng.uniform()).collect();
        let r = pca2(&DataMatrix::from_flat(n, p, values).unwrap()).unwrap();
        assert_eq!(r.projection.len(), n);
        assert!(r.fractions[0] >= r.fractions[1] && r.fractions[1] > 0.0);
    }

    #[test]
    fn s3_first_component_share() {
        for seed in 0..10 {
            let r = pca2(&crate::datagen::gen_s3(seed)).unwrap();
            assert!((r.fractions[0] - 0.911).abs() <= 0.05, "seed {seed}: {}", r.fractions[0]);
        }
    }
}
