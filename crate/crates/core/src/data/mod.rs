//! Datasets and the preprocessing chain that turns raw WDBC measurements
//! into bounded rotation angles.
//!
//! The chain is always fitted on training rows only:
//! standardize → PCA to `q` components → min-max scale into `[0, π]`.

mod preprocess;
mod sampling;
mod wdbc;

pub use preprocess::{
    jacobi_eigen, AngleScaler, PcaModel, Preprocessor, Standardizer, CONSTANT_FEATURE_STD,
};
pub use sampling::{prime_seeds, split, subsample, Subsample, SCORE_EPSILON};
pub use wdbc::{load_wdbc, parse_wdbc, WDBC_FEATURES};

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

/// Label of the positive (malignant) class.
pub const POSITIVE: i8 = 1;
/// Label of the negative (benign) class.
pub const NEGATIVE: i8 = -1;

/// A labeled feature matrix, one row per record.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<i8>,
    feature_names: Vec<String>,
    source_ids: Vec<u64>,
}

impl Dataset {
    /// Builds a dataset with generated feature names (`f0`, `f1`, …) and
    /// sequential ids.
    pub fn new(features: Array2<f64>, labels: Vec<i8>) -> Result<Self> {
        let names = (0..features.ncols()).map(|j| format!("f{j}")).collect();
        let ids = (0..features.nrows() as u64).collect();
        Self::with_metadata(features, labels, names, ids)
    }

    pub fn with_metadata(
        features: Array2<f64>,
        labels: Vec<i8>,
        feature_names: Vec<String>,
        source_ids: Vec<u64>,
    ) -> Result<Self> {
        let n = features.nrows();
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        if source_ids.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: source_ids.len(),
            });
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::DimensionMismatch {
                expected: features.ncols(),
                found: feature_names.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l != POSITIVE && l != NEGATIVE) {
            return Err(Error::argument(format!("label {bad} is not -1 or +1")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("features contain non-finite values"));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            source_ids,
        })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn source_ids(&self) -> &[u64] {
        &self.source_ids
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == POSITIVE).count();
        (pos, self.labels.len() - pos)
    }

    /// Fails unless the dataset has at least two rows and both classes.
    pub fn ensure_trainable(&self) -> Result<()> {
        let (pos, neg) = self.class_counts();
        if self.len() < 2 || pos == 0 || neg == 0 {
            return Err(Error::argument(format!(
                "training data needs both classes (got {pos} positive, {neg} negative)"
            )));
        }
        Ok(())
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            source_ids: indices.iter().map(|&i| self.source_ids[i]).collect(),
        }
    }

    /// Same rows and labels with a replaced feature matrix (e.g. after PCA).
    pub fn with_features(&self, features: Array2<f64>, names: Vec<String>) -> Result<Dataset> {
        Dataset::with_metadata(
            features,
            self.labels.clone(),
            names,
            self.source_ids.clone(),
        )
    }
}
