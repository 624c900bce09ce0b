//! Univariate Gaussian kernel density estimation over interpoint distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Smoothing kernel. Only the Gaussian is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    #[default]
    Gaussian,
}

impl KernelId {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            KernelId::Gaussian => gaussian_kernel(u),
        }
    }
}

/// Standard normal density.
#[inline]
pub fn gaussian_kernel(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Kernel density estimate of `sample` at `x` with bandwidth `h`.
pub fn kde_at(x: f64, sample: &[f64], h: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::param("kernel density estimate needs a nonempty sample"));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::param(format!("bandwidth must be positive, got {h}")));
    }
    let sum: f64 = sample.iter().map(|&xi| gaussian_kernel((x - xi) / h)).sum();
    Ok(sum / (sample.len() as f64 * h))
}

/// Estimated probability that another member lies within `h` of this one:
/// the density of the member's distances at `h/2`, times `h`.
///
/// `dist_row` holds the distances to the *other* members only.
pub fn neighborhood_probability(dist_row: &[f64], h: f64) -> Result<f64> {
    if dist_row.is_empty() {
        return Err(Error::param(
            "neighborhood probability needs at least one other member",
        ));
    }
    Ok(kde_at(0.5 * h, dist_row, h)? * h)
}
