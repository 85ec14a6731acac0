//! Compressed sparse-row matrix type and the distance/sorting kernels the
//! ranking pipeline is built on.
//!
//! Rows keep their column indices strictly increasing, which lets every
//! pairwise kernel run as a linear merge over two rows. Explicit zeros are
//! never stored. Dense inputs are accepted but immediately CSR-encoded so
//! there is a single code path downstream.

use crate::error::{Error, Result};

/// Distance between two instance rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Euclidean,
    /// 1 - cosine similarity. Defined only for rows with positive norm.
    Cosine,
}

/// Compressed sparse-row real matrix.
///
/// Invariants (checked by [`SparseMatrix::from_csr`], preserved by all
/// constructors):
/// - `row_offsets` is non-decreasing with `row_offsets[0] == 0` and
///   `row_offsets[n_rows] == values.len()`,
/// - column indices are strictly increasing within each row and `< n_cols`,
/// - stored values are finite and nonzero.
///
/// The matrix is immutable after construction and safe to share across
/// threads; all kernels are pure functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidShape(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidShape(
                "col_indices and values length mismatch".into(),
            ));
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != values.len() {
            return Err(Error::InvalidShape(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        for w in row_offsets.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidShape("row_offsets must be non-decreasing".into()));
            }
        }
        for row in 0..n_rows {
            let (lo, hi) = (row_offsets[row], row_offsets[row + 1]);
            for k in lo..hi {
                if col_indices[k] >= n_cols {
                    return Err(Error::InvalidShape(format!(
                        "column index {} out of bounds in row {row}",
                        col_indices[k]
                    )));
                }
                if k > lo && col_indices[k] <= col_indices[k - 1] {
                    return Err(Error::InvalidShape(format!(
                        "column indices not strictly increasing in row {row}"
                    )));
                }
                if !values[k].is_finite() {
                    return Err(Error::InvalidValue(format!(
                        "non-finite value in row {row}"
                    )));
                }
                if values[k] == 0.0 {
                    return Err(Error::InvalidValue(format!(
                        "explicitly stored zero in row {row}"
                    )));
                }
            }
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Internal constructor for arrays that are valid by construction.
    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), n_rows + 1);
        debug_assert_eq!(col_indices.len(), values.len());
        Self { n_rows, n_cols, row_offsets, col_indices, values }
    }

    /// Encodes a row-major dense grid, storing only nonzeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::InvalidShape(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidValue(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Builds an empty matrix of the given shape.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Entry at `(i, j)`, implicit zeros included.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Expands back to a row-major dense grid.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n_cols]; self.n_rows];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[i][j] = v;
            }
        }
        out
    }

    /// Fraction of stored entries: nnz / (rows * cols).
    pub fn density(&self) -> Result<f64> {
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err(Error::InvalidShape("density of an empty shape".into()));
        }
        Ok(self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64))
    }

    /// Transposed copy. Keeps per-row column indices sorted.
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut cursor = counts.clone();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let dst = cursor[j];
                col_indices[dst] = i;
                values[dst] = v;
                cursor[j] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// Restriction to the given columns, which must be sorted ascending.
    /// Column `selected[p]` becomes column `p` of the output.
    pub fn select_columns(&self, selected: &[usize]) -> Result<SparseMatrix> {
        debug_assert!(selected.windows(2).all(|w| w[0] < w[1]));
        let mut remap = vec![usize::MAX; self.n_cols];
        for (p, &j) in selected.iter().enumerate() {
            if j >= self.n_cols {
                return Err(Error::InvalidShape(format!(
                    "selected column {j} out of bounds"
                )));
            }
            remap[j] = p;
        }
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if remap[j] != usize::MAX {
                    col_indices.push(remap[j]);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Ok(SparseMatrix {
            n_rows: self.n_rows,
            n_cols: selected.len(),
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Distance from row `i` to each row in `row_subset` (all rows when
    /// `None`), in subset order.
    pub fn row_distances(
        &self,
        i: usize,
        metric: DistanceMetric,
        row_subset: Option<&[usize]>,
    ) -> Result<Vec<f64>> {
        if i >= self.n_rows {
            return Err(Error::InvalidShape(format!("row {i} out of bounds")));
        }
        let (a_cols, a_vals) = self.row(i);
        let a_norm = match metric {
            DistanceMetric::Cosine => {
                let n = norm(a_vals);
                if n == 0.0 {
                    return Err(Error::DegenerateRow(i));
                }
                n
            }
            DistanceMetric::Euclidean => 0.0,
        };
        let compute = |j: usize| -> Result<f64> {
            if j >= self.n_rows {
                return Err(Error::InvalidShape(format!("subset row {j} out of bounds")));
            }
            let (b_cols, b_vals) = self.row(j);
            match metric {
                DistanceMetric::Euclidean => {
                    Ok(merged_squared_distance(a_cols, a_vals, b_cols, b_vals).sqrt())
                }
                DistanceMetric::Cosine => {
                    let b_norm = norm(b_vals);
                    if b_norm == 0.0 {
                        return Err(Error::DegenerateRow(j));
                    }
                    let dot = merged_dot(a_cols, a_vals, b_cols, b_vals);
                    Ok(1.0 - dot / (a_norm * b_norm))
                }
            }
        };
        match row_subset {
            Some(subset) => subset.iter().map(|&j| compute(j)).collect(),
            None => (0..self.n_rows).map(compute).collect(),
        }
    }
}

fn norm(vals: &[f64]) -> f64 {
    vals.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Sum of squared differences over the union of nonzero columns, accumulated
/// in ascending column order. Matches a dense left-to-right scan bitwise,
/// since columns where both rows are zero contribute an exact 0.
fn merged_squared_distance(
    a_cols: &[usize],
    a_vals: &[f64],
    b_cols: &[usize],
    b_vals: &[f64],
) -> f64 {
    let mut acc = 0.0;
    let (mut p, mut q) = (0, 0);
    while p < a_cols.len() && q < b_cols.len() {
        let d = match a_cols[p].cmp(&b_cols[q]) {
            std::cmp::Ordering::Less => {
                let d = a_vals[p];
                p += 1;
                d
            }
            std::cmp::Ordering::Greater => {
                let d = -b_vals[q];
                q += 1;
                d
            }
            std::cmp::Ordering::Equal => {
                let d = a_vals[p] - b_vals[q];
                p += 1;
                q += 1;
                d
            }
        };
        acc += d * d;
    }
    for &v in &a_vals[p..] {
        acc += v * v;
    }
    for &v in &b_vals[q..] {
        acc += v * v;
    }
    acc
}

fn merged_dot(a_cols: &[usize], a_vals: &[f64], b_cols: &[usize], b_vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    let (mut p, mut q) = (0, 0);
    while p < a_cols.len() && q < b_cols.len() {
        match a_cols[p].cmp(&b_cols[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                acc += a_vals[p] * b_vals[q];
                p += 1;
                q += 1;
            }
        }
    }
    acc
}

/// Distance between two dense rows (used for embedding coordinates).
pub fn dense_distance(a: &[f64], b: &[f64], metric: DistanceMetric) -> Result<f64> {
    debug_assert_eq!(a.len(), b.len());
    match metric {
        DistanceMetric::Euclidean => {
            let mut acc = 0.0;
            for (x, y) in a.iter().zip(b) {
                let d = x - y;
                acc += d * d;
            }
            Ok(acc.sqrt())
        }
        DistanceMetric::Cosine => {
            let (na, nb) = (norm(a), norm(b));
            if na == 0.0 || nb == 0.0 {
                return Err(Error::DegenerateRow(0));
            }
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            Ok(1.0 - dot / (na * nb))
        }
    }
}

/// Indices that sort `v` ascending. Stable: ties keep the lower original
/// index first, so seeded runs stay reproducible.
pub fn argsort_ascending(v: &[f64]) -> Result<Vec<usize>> {
    if let Some(pos) = v.iter().position(|x| x.is_nan()) {
        return Err(Error::InvalidValue(format!("NaN at position {pos}")));
    }
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("NaN ruled out above"));
    Ok(idx)
}
