mod forest;
mod knn;
mod linear;
mod naive_bayes;
mod tree;

pub use forest::RandomForest;
pub use knn::Knn;
pub use linear::{logistic_gradient, logistic_loss, LinearModel};
pub use naive_bayes::GaussianNb;
pub use tree::{DecisionTree, Node};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Checks a training matrix and returns its dimension.
pub(crate) fn check_training<T: Scalar>(points: &[&[T]], labels: &[u8]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty training set".into()));
    }
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: labels.len(),
        });
    }
    let d = points[0].len();
    if d == 0 {
        return Err(Error::InvalidInput("rows have no features".into()));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("features must be finite".into()));
        }
    }
    if let Some(&l) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidInput(format!("label must be 0 or 1, got {l}")));
    }
    Ok(d)
}

pub(crate) fn require_both_classes(labels: &[u8]) -> Result<()> {
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// 1 only on a strict majority of ones.
pub(crate) fn majority(ones: usize, total: usize) -> u8 {
    u8::from(2 * ones > total)
}
