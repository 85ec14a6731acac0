//! Probabilistic matrix sparsification preprocessing.
//!
//! Entries above the `eps / sqrt(n)` cutoff survive unchanged; smaller
//! entries are kept (clamped to the cutoff magnitude, sign preserved) with
//! probability proportional to their magnitude, and dropped otherwise. Each
//! output entry equals the input entry in expectation.
//!
//! The symmetrization `A = [[0, B], [B^T, 0]]` only enters through the
//! order `n = rows + cols` used by the cutoff and through the epsilon
//! estimate; both blocks of `A` would get identical independent treatment,
//! so `B` is sparsified once and `A` is never materialized.

use std::borrow::Cow;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Parameters for [`maybe_sparsify`].
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SparsifyParams {
    /// Approximation level. `None` estimates it from the input.
    pub epsilon: Option<f64>,
    /// Inputs denser than this fraction are sparsified.
    pub density_threshold: f64,
    pub seed: u64,
}

impl Default for SparsifyParams {
    fn default() -> Self {
        Self { epsilon: None, density_threshold: 0.15, seed: 0 }
    }
}

impl SparsifyParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::InvalidConfig(format!("epsilon must be positive, got {eps}")));
            }
        }
        if !(0.0..=1.0).contains(&self.density_threshold) {
            return Err(Error::InvalidConfig(format!(
                "density threshold must lie in [0, 1], got {}",
                self.density_threshold
            )));
        }
        Ok(())
    }
}

/// Estimates the approximation level as `||A||_inf / (m + n)` for the
/// symmetrization `A` of the m-by-n input: the maximum over row and column
/// sums of absolute values, divided by the symmetric order.
pub fn estimate_epsilon(b: &SparseMatrix) -> Result<f64> {
    if b.nnz() == 0 {
        return Err(Error::DegenerateInput("cannot estimate epsilon of an all-zero matrix".into()));
    }
    let mut col_sums = vec![0.0f64; b.n_cols()];
    let mut max_row_sum = 0.0f64;
    for i in 0..b.n_rows() {
        let (cols, vals) = b.row(i);
        let mut row_sum = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            row_sum += v.abs();
            col_sums[c] += v.abs();
        }
        max_row_sum = max_row_sum.max(row_sum);
    }
    let max_col_sum = col_sums.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(max_row_sum.max(max_col_sum) / (b.n_rows() + b.n_cols()) as f64)
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// One probabilistic sparsification pass. Rows use independent seeded
/// streams, so the output does not depend on the processing schedule.
pub fn prms(b: &SparseMatrix, epsilon: f64, seed: u64) -> Result<SparseMatrix> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    let n_sym = (b.n_rows() + b.n_cols()) as f64;
    let cutoff = epsilon / n_sym.sqrt();

    let mut row_offsets = Vec::with_capacity(b.n_rows() + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    for i in 0..b.n_rows() {
        let (cols, vals) = b.row(i);
        let mut rng = row_rng(seed, i);
        for (&c, &v) in cols.iter().zip(vals) {
            if v.abs() > cutoff {
                col_indices.push(c);
                values.push(v);
            } else {
                let p = v.abs() / cutoff;
                if rng.random::<f64>() < p {
                    col_indices.push(c);
                    values.push(v.signum() * cutoff);
                }
            }
        }
        row_offsets.push(values.len());
    }
    Ok(SparseMatrix::from_parts_unchecked(
        b.n_rows(),
        b.n_cols(),
        row_offsets,
        col_indices,
        values,
    ))
}

/// Sparsifies when the input density exceeds the threshold, otherwise
/// returns the input unchanged. Epsilon comes from the params or, when
/// absent, from [`estimate_epsilon`].
pub fn maybe_sparsify<'a>(
    x: &'a SparseMatrix,
    params: &SparsifyParams,
) -> Result<Cow<'a, SparseMatrix>> {
    params.validate()?;
    if x.density()? > params.density_threshold {
        let eps = match params.epsilon {
            Some(e) => e,
            None => estimate_epsilon(x)?,
        };
        Ok(Cow::Owned(prms(x, eps, params.seed)?))
    } else {
        Ok(Cow::Borrowed(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize) -> SparseMatrix {
        // Box-Muller; plain uniforms would cluster too close to the cutoff.
        let rows: Vec<Vec<f64>> = (0..n_rows)
            .map(|_| {
                (0..n_cols)
                    .map(|_| {
                        let u1: f64 = rng.random::<f64>().max(1e-12);
                        let u2: f64 = rng.random();
                        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                    })
                    .collect()
            })
            .collect();
        SparseMatrix::from_dense(&rows).unwrap()
    }

    #[test]
    fn epsilon_hand_computed() {
        let b = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(estimate_epsilon(&b).unwrap(), 0.5);
        let b = SparseMatrix::from_dense(&[vec![6.0, 0.0]]).unwrap();
        assert_eq!(estimate_epsilon(&b).unwrap(), 2.0);
    }

    #[test]
    fn epsilon_matches_dense_symmetrized_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b = gaussian(&mut rng, 50, 30);
        let dense = b.to_dense();
        let (m, n) = (50, 30);
        // dense oracle over A = [[0, B], [B^T, 0]]
        let mut a = vec![vec![0.0; m + n]; m + n];
        for i in 0..m {
            for j in 0..n {
                a[i][m + j] = dense[i][j];
                a[m + j][i] = dense[i][j];
            }
        }
        let inf_norm = a
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let expected = inf_norm / (m + n) as f64;
        assert!((estimate_epsilon(&b).unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn epsilon_rejects_all_zero() {
        assert!(matches!(
            estimate_epsilon(&SparseMatrix::zeros(3, 3)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn keep_branch_only_is_identity() {
        let b = SparseMatrix::from_dense(&[vec![5.0, -4.0], vec![3.0, 6.0]]).unwrap();
        // cutoff = 1/sqrt(4) = 0.5; all magnitudes far above it
        let out = prms(&b, 1.0, 9).unwrap();
        assert_eq!(out, b);
    }

    #[test]
    fn sub_threshold_mean_is_unbiased() {
        let a = 0.1;
        let b = SparseMatrix::from_dense(&[vec![a]]).unwrap();
        let epsilon = 1.0;
        let cutoff = epsilon / 2.0f64.sqrt();
        assert!(a <= cutoff);
        let resamples = 10_000usize;
        let mut sum = 0.0;
        for seed in 0..resamples as u64 {
            sum += prms(&b, epsilon, seed).unwrap().get(0, 0);
        }
        let mean = sum / resamples as f64;
        let p = a / cutoff;
        let var = p * cutoff * cutoff - a * a;
        let se = (var / resamples as f64).sqrt();
        assert!(
            (mean - a).abs() <= 3.0 * se,
            "mean {mean} vs {a}, 3se {}",
            3.0 * se
        );
    }

    #[test]
    fn retention_rate_matches_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = gaussian(&mut rng, 80, 80);
        let epsilon = estimate_epsilon(&b).unwrap();
        let cutoff = epsilon / 160.0f64.sqrt();
        let mut expected = 0.0;
        let mut var = 0.0;
        for &v in b.values() {
            if v.abs() <= cutoff {
                let p = v.abs() / cutoff;
                expected += p;
                var += p * (1.0 - p);
            }
        }
        let mut kept_total = 0.0;
        let seeds = 20u64;
        for seed in 0..seeds {
            let out = prms(&b, epsilon, seed).unwrap();
            let mut kept = 0usize;
            for i in 0..b.n_rows() {
                let (cols, vals) = b.row(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    if v.abs() <= cutoff && out.get(i, c) != 0.0 {
                        kept += 1;
                    }
                }
            }
            kept_total += kept as f64;
        }
        let mean_kept = kept_total / seeds as f64;
        let sigma = (var / seeds as f64).sqrt();
        assert!(
            (mean_kept - expected).abs() <= 3.0 * sigma,
            "kept {mean_kept}, expected {expected}, 3sigma {}",
            3.0 * sigma
        );
    }

    #[test]
    fn low_density_input_passes_through() {
        let mut rows = vec![vec![0.0; 100]; 10];
        rows[0][0] = 1.0; // density 0.001, ohscal-like sparsity
        let x = SparseMatrix::from_dense(&rows).unwrap();
        let out = maybe_sparsify(&x, &SparsifyParams::default()).unwrap();
        assert!(matches!(out, Cow::Borrowed(_)));
        assert_eq!(*out, x);
    }

    #[test]
    fn zero_threshold_always_sparsifies() {
        let x = SparseMatrix::from_dense(&[vec![0.2, 0.0], vec![0.0, 0.1]]).unwrap();
        let params = SparsifyParams { density_threshold: 0.0, ..Default::default() };
        let out = maybe_sparsify(&x, &params).unwrap();
        assert!(matches!(out, Cow::Owned(_)));
    }

    #[test]
    fn dense_input_loses_density_in_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = gaussian(&mut rng, 100, 100);
        let input_density = x.density().unwrap();
        for seed in 0..5 {
            let params = SparsifyParams { seed, ..Default::default() };
            let out = maybe_sparsify(&x, &params).unwrap();
            assert!(out.density().unwrap() < input_density, "seed {seed}");
        }
    }

    #[test]
    fn identical_seed_identical_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let x = gaussian(&mut rng, 40, 40);
        let eps = estimate_epsilon(&x).unwrap();
        assert_eq!(prms(&x, eps, 7).unwrap(), prms(&x, eps, 7).unwrap());
        assert_ne!(prms(&x, eps, 7).unwrap(), prms(&x, eps, 8).unwrap());
    }
}
