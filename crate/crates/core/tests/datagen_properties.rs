//! Cross-seed properties of the generated datasets.

use ipkde::datagen::gen_s3;
use ipkde::DataMatrix;

fn column(d: &DataMatrix, col: usize) -> Vec<f64> {
    (0..d.n()).map(|i| d.get(i, col)).collect()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let m = (a.len() as f64 - 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - m) * (y - m)).sum();
    let var: f64 = ra.iter().map(|x| (x - m).powi(2)).sum();
    cov / var
}

/// Every coordinate pair of the 45-row sample has positive rank correlation
/// within 0.1 of its average over seeds 0..10.
#[test]
fn s3_rank_correlation_stable_across_seeds() {
    let p = 6;
    let rho: Vec<Vec<f64>> = (0..10)
        .map(|seed| {
            let d = gen_s3(seed);
            let cols: Vec<Vec<f64>> = (0..p).map(|j| column(&d, j)).collect();
            let mut out = Vec::new();
            for a in 0..p {
                for b in (a + 1)..p {
                    out.push(spearman(&cols[a], &cols[b]));
                }
            }
            out
        })
        .collect();
    let mut outside = Vec::new();
    for pair in 0..rho[0].len() {
        let mean = rho.iter().map(|r| r[pair]).sum::<f64>() / rho.len() as f64;
        for (seed, r) in rho.iter().enumerate() {
            assert!(r[pair] > 0.0, "seed {seed}, pair {pair}: {}", r[pair]);
            if (r[pair] - mean).abs() > 0.1 {
                outside.push((seed, pair, r[pair], mean));
            }
        }
    }
    assert!(outside.is_empty(), "outside the 0.1 band (seed, pair, rho, mean): {outside:?}");
}
