//! Small bundled datasets.

use crate::data::DataMatrix;
use crate::io;

const RUSPINI_CSV: &str = include_str!("../data/ruspini.csv");

/// The 12-point bivariate illustration data, in its published order.
pub fn worked_example() -> DataMatrix {
    const X: [f64; 12] = [
        -0.30, -0.22, -0.27, -0.24, -0.03, 0.05, -0.03, 0.04, -0.02, 0.23, 0.25, 0.45,
    ];
    const Y: [f64; 12] = [
        -0.28, -0.25, -0.28, -0.27, 0.00, 0.00, 0.05, 0.03, -0.03, 0.25, 0.23, 0.45,
    ];
    let rows: Vec<Vec<f64>> = X.iter().zip(Y).map(|(&x, y)| vec![x, y]).collect();
    DataMatrix::from_rows(&rows)
        .and_then(|d| d.with_names(vec!["x".into(), "y".into()]))
        .expect("static data is well formed")
}

/// Ruspini's 75-point benchmark with its four reference classes in the
/// `label` column.
pub fn ruspini() -> DataMatrix {
    io::parse_csv(RUSPINI_CSV.as_bytes(), &io::CsvOptions::labelled("label"))
        .expect("bundled csv is well formed")
}
