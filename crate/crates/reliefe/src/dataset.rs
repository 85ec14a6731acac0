//! Datasets: a feature matrix paired with classification targets.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Classification targets, one entry per instance row.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Multi-class: a class id in `0..n_classes` per instance.
    Classes { ids: Vec<usize>, n_classes: usize },
    /// Multi-label: a binary label matrix (stored values are exactly 1.0).
    Labels(SparseMatrix),
}

impl Targets {
    /// Builds class targets from raw per-instance values. Distinct values are
    /// mapped to ids in ascending value order.
    pub fn from_class_values(values: &[f64]) -> Result<Targets> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "non-finite class value at instance {pos}"
            )));
        }
        let mut distinct: Vec<f64> = values.to_vec();
        distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        distinct.dedup();
        let ids = values
            .iter()
            .map(|v| distinct.binary_search_by(|d| d.partial_cmp(v).expect("finite")).unwrap())
            .collect();
        Ok(Targets::Classes { ids, n_classes: distinct.len() })
    }

    /// Builds label targets, validating that every stored value is 1.0.
    pub fn from_label_matrix(labels: SparseMatrix) -> Result<Targets> {
        if labels.values().iter().any(|&v| v != 1.0) {
            return Err(Error::InvalidLabelRow(
                "label matrix entries must be exactly 1".into(),
            ));
        }
        Ok(Targets::Labels(labels))
    }

    /// Number of instances covered by the targets.
    pub fn len(&self) -> usize {
        match self {
            Targets::Classes { ids, .. } => ids.len(),
            Targets::Labels(m) => m.n_rows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Key identifying each instance's target value: the class id for MCC,
    /// the label set for MLC. Used for representative sampling.
    pub(crate) fn value_key(&self, i: usize) -> Vec<usize> {
        match self {
            Targets::Classes { ids, .. } => vec![ids[i]],
            Targets::Labels(m) => m.row(i).0.to_vec(),
        }
    }
}

/// A feature matrix paired with its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: SparseMatrix,
    pub targets: Targets,
}

impl Dataset {
    pub fn new(features: SparseMatrix, targets: Targets) -> Result<Self> {
        if features.n_rows() != targets.len() {
            return Err(Error::InvalidShape(format!(
                "{} feature rows but {} target entries",
                features.n_rows(),
                targets.len()
            )));
        }
        Ok(Self { features, targets })
    }

    pub fn n_instances(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_ids_follow_value_order() {
        let t = Targets::from_class_values(&[2.0, -1.0, 2.0, 0.0]).unwrap();
        match t {
            Targets::Classes { ids, n_classes } => {
                assert_eq!(n_classes, 3);
                assert_eq!(ids, vec![2, 0, 2, 1]);
            }
            _ => panic!("expected classes"),
        }
    }

    #[test]
    fn label_matrix_must_be_binary() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(Targets::from_label_matrix(m).is_err());
        let ok = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(Targets::from_label_matrix(ok).is_ok());
    }

    #[test]
    fn dataset_checks_row_count() {
        let f = SparseMatrix::from_dense(&[vec![1.0], vec![2.0]]).unwrap();
        let t = Targets::from_class_values(&[0.0]).unwrap();
        assert!(Dataset::new(f, t).is_err());
    }
}
