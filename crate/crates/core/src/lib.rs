//! Clustering from interpoint distances by kernel density estimation.
//!
//! The algorithm only ever sees a matrix of pairwise distances, so any
//! dissimilarity (Euclidean, Gower for mixed scales, great-circle for
//! coordinates, or a precomputed matrix) can drive it. Each round picks the
//! member whose neighborhood is most probable under a Gaussian kernel
//! estimate and removes that neighborhood as a cluster.
//!
//! ```
//! use ipkde::{datasets, sm_cluster_data, DistanceMeasure, HyperParams};
//!
//! let data = datasets::ruspini();
//! let params = HyperParams::new(0.10, 4).unwrap();
//! let report = sm_cluster_data(&data, DistanceMeasure::Euclidean, &params).unwrap();
//! assert_eq!(report.k(), 4);
//! ```

pub mod baselines;
pub mod cluster;
pub mod data;
pub mod datagen;
pub mod datasets;
pub mod distance;
pub mod error;
pub mod io;
pub mod kde;
pub mod pca;
pub mod plot;
pub mod validation;

pub use cluster::{scan, sm_cluster, sm_cluster_data, ScanResult, ScanRow};
pub use data::{
    ClusterAssignment, ClusterReport, ColumnKind, DataMatrix, DistanceMatrix, HyperParams,
    MergePolicy, RoundTrace, VariableSchema,
};
pub use distance::{normalize_matrix, pairwise_matrix, DistanceMeasure};
pub use error::{Error, Result};
pub use validation::{accuracy, asw, silhouette_widths};
