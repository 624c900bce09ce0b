//! Seeded generators for the synthetic benchmark datasets.
//!
//! Every random quantity is drawn by an exact inverse-CDF transform of
//! open-interval uniforms, so a seed fixes the output bit for bit.

mod rng;
mod special;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use rng::SeededRng;
pub use special::{inv_norm_cdf, normal_cdf, t2_cdf};

use crate::data::{ColumnKind, DataMatrix, VariableSchema};
use crate::error::Result;

fn standard_normal(rng: &mut SeededRng) -> f64 {
    inv_norm_cdf(rng.uniform()).expect("uniform draws lie in (0, 1)")
}

/// Mixed-scale two-class sample: a binary column and a Cauchy column.
///
/// Rows 0..100 are class 1 (binary 0 with probability 0.8, Cauchy centered
/// at 0); rows 100..200 are class 2 (binary 0 with probability 0.2, Cauchy
/// centered at 3). Both Cauchy components have unit scale.
pub fn gen_s1(seed: u64) -> DataMatrix {
    const CLASS_SIZE: usize = 100;
    let classes = [(0.8, 0.0), (0.2, 3.0)];
    let root = SeededRng::new(seed);
    let mut rows = Vec::with_capacity(2 * CLASS_SIZE);
    let mut labels = Vec::with_capacity(2 * CLASS_SIZE);
    for (c, &(p_zero, location)) in classes.iter().enumerate() {
        let mut bin = root.substream(2 * c as u64);
        let mut cont = root.substream(2 * c as u64 + 1);
        for _ in 0..CLASS_SIZE {
            let b = if bin.uniform() < p_zero { 0.0 } else { 1.0 };
            let x = location + (PI * (cont.uniform() - 0.5)).tan();
            rows.push(vec![b, x]);
            labels.push(c as i64 + 1);
        }
    }
    DataMatrix::from_rows(&rows)
        .and_then(|d| {
            d.with_schema(VariableSchema::new(vec![
                ColumnKind::Binary,
                ColumnKind::Continuous,
            ]))
        })
        .and_then(|d| d.with_names(vec!["binary".into(), "cauchy".into()]))
        .expect("generated data are well formed")
        .with_labels(labels)
}

/// Dimension of the t-copula used by [`gen_s3`].
pub const S3_DIM: usize = 6;
/// Off-diagonal correlation of the t-copula.
pub const S3_CORRELATION: f64 = 0.15;
/// Group sizes and normal marginal means of [`gen_s3`].
pub const S3_GROUPS: [(usize, f64); 3] = [(20, 0.0), (15, -3.0), (10, 3.0)];

/// Lower Cholesky factor of the equicorrelation matrix.
fn equicorrelation_cholesky(dim: usize, rho: f64) -> Vec<Vec<f64>> {
    let mut l = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { rho };
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = if i == j {
                (target - s).sqrt()
            } else {
                (target - s) / l[j][j]
            };
        }
    }
    l
}

/// Draws from the 6-variate t-copula with 2 degrees of freedom and
/// equicorrelation 0.15: correlated normals divided by `sqrt(W/2)` with
/// `W ~ chi2(2)`, pushed through the t2 marginal CDF.
pub struct TCopula {
    chol: Vec<Vec<f64>>,
    normals: SeededRng,
    chi2: SeededRng,
}

impl TCopula {
    pub fn new(rng: &SeededRng) -> Self {
        Self {
            chol: equicorrelation_cholesky(S3_DIM, S3_CORRELATION),
            normals: rng.substream(0),
            chi2: rng.substream(1),
        }
    }

    pub fn draw(&mut self) -> [f64; S3_DIM] {
        let z: Vec<f64> = (0..S3_DIM).map(|_| standard_normal(&mut self.normals)).collect();
        let w = -2.0 * self.chi2.uniform().ln();
        let shrink = (w / 2.0).sqrt();
        let mut u = [0.0; S3_DIM];
        for (i, ui) in u.iter_mut().enumerate() {
            let x: f64 = (0..=i).map(|k| self.chol[i][k] * z[k]).sum::<f64>() / shrink;
            // keep extreme draws strictly inside (0, 1)
            *ui = t2_cdf(x).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        }
        u
    }
}

/// Three normal groups of sizes 20, 15 and 10 with means 0, -3 and 3 in
/// every coordinate, coupled through the t-copula.
pub fn gen_s3(seed: u64) -> DataMatrix {
    let mut copula = TCopula::new(&SeededRng::new(seed));
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (g, &(size, mean)) in S3_GROUPS.iter().enumerate() {
        for _ in 0..size {
            let u = copula.draw();
            rows.push(
                u.iter()
                    .map(|&ui| mean + inv_norm_cdf(ui).expect("copula output lies in (0, 1)"))
                    .collect(),
            );
            labels.push(g as i64 + 1);
        }
    }
    DataMatrix::from_rows(&rows)
        .expect("generated data are well formed")
        .with_labels(labels)
}

/// One of the four outlines used by [`gen_s4`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outline {
    /// Axis-aligned rectangle boundary with lower-left corner `(x0, y0)`.
    Rectangle { x0: f64, y0: f64, width: f64, height: f64 },
    /// Upper half of a circle.
    HalfCircle { cx: f64, cy: f64, r: f64 },
    Circle { cx: f64, cy: f64, r: f64 },
}

impl Outline {
    /// Point at fraction `t` in `[0, 1)` of the outline's length.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Outline::Rectangle {
                x0,
                y0,
                width,
                height,
            } => {
                let mut s = t * 2.0 * (width + height);
                if s < width {
                    return (x0 + s, y0);
                }
                s -= width;
                if s < height {
                    return (x0 + width, y0 + s);
                }
                s -= height;
                if s < width {
                    return (x0 + width - s, y0 + height);
                }
                s -= width;
                (x0, y0 + height - s)
            }
            Outline::HalfCircle { cx, cy, r } => {
                let a = PI * t;
                (cx + r * a.cos(), cy + r * a.sin())
            }
            Outline::Circle { cx, cy, r } => {
                let a = 2.0 * PI * t;
                (cx + r * a.cos(), cy + r * a.sin())
            }
        }
    }

    /// Distance from `p` to the outline.
    pub fn distance(&self, (x, y): (f64, f64)) -> f64 {
        match *self {
            Outline::Rectangle {
                x0,
                y0,
                width,
                height,
            } => {
                let seg = |ax: f64, ay: f64, bx: f64, by: f64| {
                    let (dx, dy) = (bx - ax, by - ay);
                    let t = (((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                    ((x - ax - t * dx).powi(2) + (y - ay - t * dy).powi(2)).sqrt()
                };
                let (x1, y1) = (x0 + width, y0 + height);
                seg(x0, y0, x1, y0)
                    .min(seg(x1, y0, x1, y1))
                    .min(seg(x1, y1, x0, y1))
                    .min(seg(x0, y1, x0, y0))
            }
            Outline::HalfCircle { cx, cy, r } => {
                if y >= cy {
                    (((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - r).abs()
                } else {
                    let left = ((x - cx + r).powi(2) + (y - cy).powi(2)).sqrt();
                    let right = ((x - cx - r).powi(2) + (y - cy).powi(2)).sqrt();
                    left.min(right)
                }
            }
            Outline::Circle { cx, cy, r } => {
                (((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - r).abs()
            }
        }
    }
}

/// Geometry of the four-shape dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S4Layout {
    /// Square, rectangle, half-circle and circle, in label order.
    pub shapes: [Outline; 4],
    pub group_size: usize,
    pub noise_sd: f64,
}

impl Default for S4Layout {
    /// Four outlines in the unit square with a 0.05 gap between the closest
    /// pairs.
    fn default() -> Self {
        Self {
            shapes: [
                Outline::Rectangle {
                    x0: 0.05,
                    y0: 0.60,
                    width: 0.30,
                    height: 0.30,
                },
                Outline::Rectangle {
                    x0: 0.40,
                    y0: 0.70,
                    width: 0.55,
                    height: 0.15,
                },
                Outline::HalfCircle {
                    cx: 0.25,
                    cy: 0.35,
                    r: 0.20,
                },
                Outline::Circle {
                    cx: 0.70,
                    cy: 0.35,
                    r: 0.20,
                },
            ],
            group_size: 100,
            noise_sd: 0.05,
        }
    }
}

/// Noise-free points of the four-shape dataset with their group labels.
pub fn s4_skeleton(seed: u64, layout: &S4Layout) -> (Vec<[f64; 2]>, Vec<i64>) {
    let mut rng = SeededRng::new(seed).substream(0);
    let mut pts = Vec::with_capacity(4 * layout.group_size);
    let mut labels = Vec::with_capacity(4 * layout.group_size);
    for (g, shape) in layout.shapes.iter().enumerate() {
        for _ in 0..layout.group_size {
            let (x, y) = shape.point_at(rng.uniform());
            pts.push([x, y]);
            labels.push(g as i64 + 1);
        }
    }
    (pts, labels)
}

/// Four groups drawn uniformly along a square, a rectangle, a half-circle
/// and a circle, each coordinate perturbed by N(0, sd^2) noise.
pub fn gen_s4_with(seed: u64, layout: &S4Layout) -> Result<DataMatrix> {
    let (pts, labels) = s4_skeleton(seed, layout);
    let mut noise = SeededRng::new(seed).substream(1);
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            p.iter()
                .map(|&c| c + layout.noise_sd * standard_normal(&mut noise))
                .collect()
        })
        .collect();
    Ok(DataMatrix::from_rows(&rows)?
        .with_names(vec!["x".into(), "y".into()])?
        .with_labels(labels))
}

pub fn gen_s4(seed: u64) -> DataMatrix {
    gen_s4_with(seed, &S4Layout::default()).expect("default layout is well formed")
}
