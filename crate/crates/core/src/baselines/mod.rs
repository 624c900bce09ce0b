//! Comparison algorithms: Lloyd k-means, PAM k-medoids, DBSCAN and the
//! k-nearest-neighbor distance profile used to pick DBSCAN's radius.

mod dbscan;
mod kmeans;
mod pam;

pub use dbscan::{dbscan, knn_dist_profile, DbscanResult, NoiseConvention, NOISE};
pub use kmeans::{kmeans, KmeansResult, MAX_ITERATIONS};
pub use pam::{pam, PamResult};
