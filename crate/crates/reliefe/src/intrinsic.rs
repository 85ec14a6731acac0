//! Latent-dimension estimation from the two nearest neighbors of each
//! sampled instance.
//!
//! For every sampled row, the two smallest strictly positive euclidean
//! distances to other sampled rows give the ratio `mu = r2 / r1`. Ignoring
//! zero-distance neighbors keeps `mu` finite when duplicate rows are
//! present (frequent in multi-label target spaces). The dimension is the
//! slope of `-log(1 - EMP(mu))` against `log(mu)`, fitted through the
//! origin.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::{DistanceMetric, SparseMatrix};

/// Knobs for the least-squares fit.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DimConfig {
    /// Fraction of the largest `mu` values excluded from the fit. The tail
    /// of the empirical CDF makes `-log(1 - EMP)` explode.
    pub fit_truncation: f64,
    /// Multiplier applied to the fitted slope before rounding. The raw
    /// estimator tends to under-estimate; this lets users compensate.
    pub dim_multiplier: f64,
}

impl Default for DimConfig {
    fn default() -> Self {
        Self { fit_truncation: 0.10, dim_multiplier: 1.0 }
    }
}

/// Result of a dimension estimation run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DimEstimate {
    /// Rounded slope, clamped to at least 1.
    pub d: usize,
    /// Raw least-squares slope through the origin.
    pub slope: f64,
    /// Second-to-first neighbor distance ratios, one per usable sample.
    pub mu: Vec<f64>,
    /// Empirical CDF evaluated at each `mu`, in the same order.
    pub empirical_cdf: Vec<f64>,
}

/// Empirical distribution with strict inequality: the share of entries
/// strictly below each value. The maximum maps to `(n - 1) / n`.
pub fn empirical_cdf(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(format!("non-finite value at {pos}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = values.len() as f64;
    Ok(values
        .iter()
        .map(|&v| sorted.partition_point(|&x| x < v) as f64 / n)
        .collect())
}

/// Two smallest strictly positive distances from `sample[i]` to the other
/// sampled rows, or `None` when fewer than two exist.
fn two_nearest_positive(x: &SparseMatrix, sample: &[usize], i: usize) -> Option<(f64, f64)> {
    let dists = x
        .row_distances(sample[i], DistanceMetric::Euclidean, Some(sample))
        .expect("euclidean distances cannot fail on valid indices");
    let (mut r1, mut r2) = (f64::INFINITY, f64::INFINITY);
    for (j, &d) in dists.iter().enumerate() {
        if j == i || d <= 0.0 {
            continue;
        }
        if d < r1 {
            r2 = r1;
            r1 = d;
        } else if d < r2 {
            r2 = d;
        }
    }
    r2.is_finite().then_some((r1, r2))
}

/// Estimates the latent dimension of the rows indexed by `sample`.
pub fn estimate_dimension(
    x: &SparseMatrix,
    sample: &[usize],
    config: &DimConfig,
) -> Result<DimEstimate> {
    if sample.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "dimension estimation needs at least 3 samples, got {}",
            sample.len()
        )));
    }
    if let Some(&bad) = sample.iter().find(|&&i| i >= x.n_rows()) {
        return Err(Error::InvalidShape(format!("sample index {bad} out of bounds")));
    }

    let pairs: Vec<Option<(f64, f64)>> = (0..sample.len())
        .into_par_iter()
        .map(|i| two_nearest_positive(x, sample, i))
        .collect();
    let mu: Vec<f64> = pairs
        .iter()
        .flatten()
        .map(|&(r1, r2)| r2 / r1)
        .collect();
    if mu.len() * 2 < sample.len() {
        return Err(Error::DegenerateGeometry(format!(
            "only {} of {} samples have two positive-distance neighbors",
            mu.len(),
            sample.len()
        )));
    }

    let emp = empirical_cdf(&mu)?;

    // Fit on all but the largest-truncation fraction of mu values.
    let n_drop = (mu.len() as f64 * config.fit_truncation).floor() as usize;
    let mut order: Vec<usize> = (0..mu.len()).collect();
    order.sort_by(|&a, &b| mu[b].partial_cmp(&mu[a]).expect("finite"));
    let dropped: std::collections::HashSet<usize> = order[..n_drop].iter().copied().collect();

    let (mut sxy, mut sxx) = (0.0f64, 0.0f64);
    for i in 0..mu.len() {
        if dropped.contains(&i) {
            continue;
        }
        let x_i = mu[i].ln();
        let y_i = -(1.0 - emp[i]).ln();
        sxy += x_i * y_i;
        sxx += x_i * x_i;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };

    let scaled = slope * config.dim_multiplier;
    let rounded = scaled.round();
    let d = if rounded < 1.0 {
        log::warn!("estimated dimension {scaled:.3} rounds below 1; clamped to 1");
        1
    } else {
        rounded as usize
    };
    Ok(DimEstimate { d, slope, mu, empirical_cdf: emp })
}
