//! Interpoint distance measures and dense distance matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, DataMatrix, DistanceMatrix, VariableSchema};
use crate::error::{Error, Result};

/// Mean Earth radius in meters used by [`geodesic_sphere`].
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMeasure {
    Euclidean,
    /// Range-normalized mixed-type dissimilarity; needs the data schema.
    Gower,
    /// Great-circle meters between `(longitude°, latitude°)` rows.
    GeodesicSphere,
    /// Distances supplied directly by the caller.
    Precomputed,
}

impl DistanceMeasure {
    pub fn name(self) -> &'static str {
        match self {
            DistanceMeasure::Euclidean => "euclidean",
            DistanceMeasure::Gower => "gower",
            DistanceMeasure::GeodesicSphere => "geodesic",
            DistanceMeasure::Precomputed => "precomputed",
        }
    }
}

impl std::str::FromStr for DistanceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "gower" => Ok(Self::Gower),
            "geodesic" | "geodesic_sphere" => Ok(Self::GeodesicSphere),
            "precomputed" => Ok(Self::Precomputed),
            other => Err(Error::param(format!("unknown distance measure '{other}'"))),
        }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(euclidean_unchecked(a, b))
}

#[inline]
fn euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Gower dissimilarity with equal column weights.
///
/// Continuous columns contribute `|a - b| / range` (zero for a constant
/// column); binary and categorical columns contribute 0 on a match and 1
/// otherwise.
pub fn gower(a: &[f64], b: &[f64], schema: &VariableSchema, ranges: &[(f64, f64)]) -> Result<f64> {
    let p = schema.len();
    for got in [a.len(), b.len(), ranges.len()] {
        if got != p {
            return Err(Error::DimensionMismatch { expected: p, got });
        }
    }
    Ok(gower_unchecked(a, b, schema, ranges))
}

fn gower_unchecked(a: &[f64], b: &[f64], schema: &VariableSchema, ranges: &[(f64, f64)]) -> f64 {
    let total: f64 = schema
        .columns()
        .iter()
        .zip(ranges)
        .zip(a.iter().zip(b))
        .map(|((kind, &(lo, hi)), (&x, &y))| match kind {
            ColumnKind::Continuous => {
                let range = hi - lo;
                if range > 0.0 {
                    ((x - y).abs() / range).min(1.0)
                } else {
                    0.0
                }
            }
            ColumnKind::Binary | ColumnKind::Categorical => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        })
        .sum();
    total / schema.len() as f64
}

fn check_coordinate(lon: f64, lat: f64) -> Result<()> {
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(Error::param(format!(
            "coordinate (lon {lon}, lat {lat}) out of range"
        )));
    }
    Ok(())
}

/// Haversine great-circle distance in meters between two
/// `(longitude°, latitude°)` pairs.
pub fn geodesic_sphere(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    check_coordinate(a.0, a.1)?;
    check_coordinate(b.0, b.1)?;
    Ok(haversine(a, b))
}

fn haversine((lon1, lat1): (f64, f64), (lon2, lat2): (f64, f64)) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (lon2 - lon1).to_radians();
    let s = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * s.clamp(0.0, 1.0).sqrt().asin()
}

type Metric = dyn Fn(&[f64], &[f64]) -> f64 + Sync;

/// Full matrix of pairwise distances. Only the upper triangle is computed;
/// the lower is mirrored so the result is exactly symmetric.
pub fn pairwise_matrix(data: &DataMatrix, measure: DistanceMeasure) -> Result<DistanceMatrix> {
    data.validate()?;
    let n = data.n();
    let metric: Box<Metric> = match measure {
        DistanceMeasure::Euclidean => Box::new(euclidean_unchecked),
        DistanceMeasure::Gower => {
            let schema = data.schema().clone();
            let ranges = data.column_ranges();
            Box::new(move |a, b| gower_unchecked(a, b, &schema, &ranges))
        }
        DistanceMeasure::GeodesicSphere => {
            if data.p() != 2 {
                return Err(Error::IncompatibleMeasure(format!(
                    "geodesic distance needs 2 columns (longitude, latitude), data has {}",
                    data.p()
                )));
            }
            for (i, row) in data.rows().enumerate() {
                check_coordinate(row[0], row[1]).map_err(|_| Error::InvalidCell {
                    row: i,
                    col: 0,
                    reason: format!("({}, {}) is not a valid longitude/latitude", row[0], row[1]),
                })?;
            }
            Box::new(|a, b| haversine((a[0], a[1]), (b[0], b[1])))
        }
        DistanceMeasure::Precomputed => {
            return Err(Error::IncompatibleMeasure(
                "precomputed distances are loaded as a matrix, not derived from data".into(),
            ))
        }
    };

    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = data.row(i);
            ((i + 1)..n).map(|j| metric(a, data.row(j))).collect()
        })
        .collect();
    let mut entries = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(DistanceMatrix::from_raw_parts(n, entries, false))
}

/// Divides every entry by the maximum so that distances lie in `[0, 1]`.
pub fn normalize_matrix(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    if d.n() < 2 {
        return Err(Error::Degenerate(
            "at least two members are needed to normalize distances".into(),
        ));
    }
    let max = d.max();
    if max <= 0.0 {
        return Err(Error::Degenerate(
            "all members are identical; the data form a single cluster".into(),
        ));
    }
    let entries = d.entries().iter().map(|v| v / max).collect();
    Ok(DistanceMatrix::from_raw_parts(d.n(), entries, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::worked_example;
    use proptest::prelude::*;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        // sqrt(0.07^2 + 0.03^2)
        let d = euclidean(&[0.04, 0.03], &[-0.03, 0.0]).unwrap();
        assert!((d - 0.0761577).abs() < 5e-8);
        assert!(euclidean(&[0.0], &[0.0, 1.0]).is_err());
    }

    fn mixed_schema() -> VariableSchema {
        VariableSchema::new(vec![ColumnKind::Binary, ColumnKind::Continuous])
    }

    #[test]
    fn gower_examples() {
        let s = mixed_schema();
        let r = [(0.0, 1.0), (-2.0, 2.0)];
        assert_eq!(gower(&[1.0, 0.5], &[1.0, 0.5], &s, &r).unwrap(), 0.0);
        assert_eq!(gower(&[0.0, -2.0], &[1.0, 2.0], &s, &r).unwrap(), 1.0);
        assert_eq!(gower(&[1.0, -2.0], &[1.0, 0.0], &s, &r).unwrap(), 0.25);
        assert!(gower(&[1.0], &[1.0, 0.0], &s, &r).is_err());
    }

    #[test]
    fn gower_categorical_and_constant_columns() {
        let s = VariableSchema::new(vec![ColumnKind::Categorical, ColumnKind::Continuous]);
        let r = [(0.0, 5.0), (3.0, 3.0)];
        assert_eq!(gower(&[2.0, 3.0], &[4.0, 3.0], &s, &r).unwrap(), 0.5);
        assert_eq!(gower(&[2.0, 3.0], &[2.0, 3.0], &s, &r).unwrap(), 0.0);
    }

    #[test]
    fn geodesic_examples() {
        assert_eq!(geodesic_sphere((10.0, 20.0), (10.0, 20.0)).unwrap(), 0.0);
        let half = geodesic_sphere((0.0, 0.0), (180.0, 0.0)).unwrap();
        assert!((half - 20_015_114.442_035_9).abs() < 1e-3, "{half}");
        let quarter = geodesic_sphere((0.0, 0.0), (0.0, 90.0)).unwrap();
        assert!((quarter - 10_007_557.221_018).abs() < 1e-3, "{quarter}");
        assert!(geodesic_sphere((0.0, 91.0), (0.0, 0.0)).is_err());
        assert!(geodesic_sphere((181.0, 0.0), (0.0, 0.0)).is_err());
    }

    #[test]
    fn pairwise_examples() {
        let d = DataMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let m = pairwise_matrix(&d, DistanceMeasure::Euclidean).unwrap();
        assert_eq!(m.entries(), &[0.0; 4]);

        let one = DataMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let m = pairwise_matrix(&one, DistanceMeasure::Euclidean).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 0.0);

        let data = worked_example();
        let m = pairwise_matrix(&data, DistanceMeasure::Euclidean).unwrap();
        // brute force over the 66 pairs
        let mut best = (0.0, 0, 0);
        for i in 0..12 {
            for j in (i + 1)..12 {
                let (a, b) = (data.row(i), data.row(j));
                let v = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        assert_eq!((best.1, best.2), (0, 11));
        assert!((best.0 - 1.046_613_586_764_475).abs() < 1e-12);
        assert_eq!(m.max(), best.0);
    }

    #[test]
    fn incompatible_measures() {
        let d = DataMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(
            pairwise_matrix(&d, DistanceMeasure::GeodesicSphere),
            Err(Error::IncompatibleMeasure(_))
        ));
        assert!(pairwise_matrix(&d, DistanceMeasure::Precomputed).is_err());
        let bad = DataMatrix::from_rows(&[vec![200.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(pairwise_matrix(&bad, DistanceMeasure::GeodesicSphere).is_err());
    }

    #[test]
    fn normalize_examples() {
        let d = DistanceMatrix::from_square(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let n = normalize_matrix(&d).unwrap();
        assert_eq!(n.entries(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(n.is_normalized());
        let again = normalize_matrix(&n).unwrap();
        assert_eq!(again.entries(), n.entries());

        let zero = DistanceMatrix::from_square(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let err = normalize_matrix(&zero).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
        assert!(err.to_string().contains("single cluster"));
    }

    fn random_points(n: usize, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-100.0f64..100.0, p), n)
    }

    proptest! {
        #[test]
        fn triangle_inequality(pts in random_points(3, 4)) {
            let d = |i: usize, j: usize| euclidean(&pts[i], &pts[j]).unwrap();
            let (ab, bc, ac) = (d(0, 1), d(1, 2), d(0, 2));
            let scale = ab + bc + ac + 1.0;
            prop_assert!(ac <= ab + bc + 1e-12 * scale);
        }

        #[test]
        fn gower_bounds(
            rows in prop::collection::vec((0u8..2, 0u8..4, -50.0f64..50.0), 2..12),
        ) {
            let data: Vec<Vec<f64>> = rows
                .iter()
                .map(|&(b, c, x)| vec![b as f64, c as f64, x])
                .collect();
            let schema = VariableSchema::new(vec![
                ColumnKind::Binary,
                ColumnKind::Categorical,
                ColumnKind::Continuous,
            ]);
            let dm = DataMatrix::from_rows(&data).unwrap().with_schema(schema.clone()).unwrap();
            let ranges = dm.column_ranges();
            for a in &data {
                prop_assert_eq!(gower(a, a, &schema, &ranges).unwrap(), 0.0);
                for b in &data {
                    let g = gower(a, b, &schema, &ranges).unwrap();
                    prop_assert!((0.0..=1.0).contains(&g));
                    prop_assert_eq!(g, gower(b, a, &schema, &ranges).unwrap());
                }
            }
        }

        #[test]
        fn geodesic_symmetric(
            lon1 in -180.0f64..180.0, lat1 in -90.0f64..90.0,
            lon2 in -180.0f64..180.0, lat2 in -90.0f64..90.0,
        ) {
            let ab = geodesic_sphere((lon1, lat1), (lon2, lat2)).unwrap();
            let ba = geodesic_sphere((lon2, lat2), (lon1, lat1)).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() <= 1e-6);
            prop_assert_eq!(geodesic_sphere((lon1, lat1), (lon1, lat1)).unwrap(), 0.0);
        }

        #[test]
        fn pairwise_matches_brute_force(pts in random_points(9, 3)) {
            let data = DataMatrix::from_rows(&pts).unwrap();
            let m = pairwise_matrix(&data, DistanceMeasure::Euclidean).unwrap();
            for i in 0..pts.len() {
                prop_assert_eq!(m.get(i, i), 0.0);
                for j in 0..pts.len() {
                    let mut s = 0.0;
                    for k in 0..3 {
                        let diff = pts[i][k] - pts[j][k];
                        s += diff * diff;
                    }
                    prop_assert_eq!(m.get(i, j), s.sqrt());
                    prop_assert_eq!(m.get(i, j), m.get(j, i));
                }
            }
        }

        #[test]
        fn normalization_scale_invariant(pts in random_points(7, 2), c in 0.01f64..1000.0) {
            let data = DataMatrix::from_rows(&pts).unwrap();
            let d = pairwise_matrix(&data, DistanceMeasure::Euclidean).unwrap();
            prop_assume!(d.max() > 0.0);
            let a = normalize_matrix(&d).unwrap();
            let b = normalize_matrix(&d.scaled(c)).unwrap();
            prop_assert_eq!(a.max(), 1.0);
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            for i in 0..a.n() {
                prop_assert_eq!(a.get(i, i), 0.0);
                for j in 0..a.n() {
                    prop_assert_eq!(a.get(i, j), a.get(j, i));
                }
            }
        }
    }
}
