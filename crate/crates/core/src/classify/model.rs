use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::LabeledRow;
use super::models::{check_training, majority, GaussianNb, Knn, LinearModel, RandomForest, DecisionTree};
use super::spec::ClassifierSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Predicts one fixed label regardless of input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantClassifier {
    pub label: u8,
}

impl ConstantClassifier {
    /// The majority training label; an even split gives 0.
    pub fn majority(labels: &[u8]) -> Self {
        let ones = labels.iter().filter(|&&l| l == 1).count();
        Self {
            label: majority(ones, labels.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "type", rename_all = "snake_case")]
pub enum Model<T> {
    LogisticRegression(LinearModel<T>),
    LinearSvm(LinearModel<T>),
    DecisionTree(DecisionTree<T>),
    RandomForest(RandomForest<T>),
    GaussianNb(GaussianNb<T>),
    Knn(Knn<T>),
    Constant(ConstantClassifier),
}

fn split_rows<T: Scalar>(rows: &[LabeledRow<T>]) -> (Vec<&[T]>, Vec<u8>) {
    (
        rows.iter().map(|r| r.features.as_slice()).collect(),
        rows.iter().map(|r| r.label).collect(),
    )
}

/// Trains the classifier described by `spec`. `seed` only matters for the
/// random forest.
pub fn fit<T: Scalar>(spec: &ClassifierSpec, train: &[LabeledRow<T>], seed: u64) -> Result<Model<T>> {
    spec.validate()?;
    let (x, y) = split_rows(train);
    Ok(match spec {
        ClassifierSpec::LogisticRegression(p) => Model::LogisticRegression(LinearModel::fit_logistic(&x, &y, p)?),
        ClassifierSpec::LinearSvm(p) => Model::LinearSvm(LinearModel::fit_svm(&x, &y, p)?),
        ClassifierSpec::DecisionTree(p) => Model::DecisionTree(DecisionTree::fit(&x, &y, p)?),
        ClassifierSpec::RandomForest(p) => Model::RandomForest(RandomForest::fit(&x, &y, p, seed)?),
        ClassifierSpec::GaussianNb(p) => Model::GaussianNb(GaussianNb::fit(&x, &y, p)?),
        ClassifierSpec::Knn(p) => Model::Knn(Knn::fit(&x, &y, p)?),
    })
}

/// Majority-class baseline.
pub fn fit_majority<T: Scalar>(train: &[LabeledRow<T>]) -> Result<Model<T>> {
    let (x, y) = split_rows(train);
    check_training(&x, &y)?;
    Ok(Model::Constant(ConstantClassifier::majority(&y)))
}

impl<T: Scalar> Model<T> {
    /// Feature count the model expects; `None` for the constant model.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Model::LogisticRegression(m) | Model::LinearSvm(m) => Some(m.weights.len()),
            Model::DecisionTree(t) => Some(t.n_features),
            Model::RandomForest(f) => f.trees.first().map(|t| t.n_features),
            Model::GaussianNb(nb) => nb.means.first().map(Vec::len),
            Model::Knn(k) => k.points.first().map(Vec::len),
            Model::Constant(_) => None,
        }
    }

    pub fn predict_one(&self, x: &[T]) -> u8 {
        match self {
            Model::LogisticRegression(m) | Model::LinearSvm(m) => m.predict_one(x),
            Model::DecisionTree(t) => t.predict_one(x),
            Model::RandomForest(f) => f.predict_one(x),
            Model::GaussianNb(nb) => nb.predict_one(x),
            Model::Knn(k) => k.predict_one(x),
            Model::Constant(c) => c.label,
        }
    }

    pub fn predict(&self, rows: &[Vec<T>]) -> Result<Vec<u8>> {
        if let Some(d) = self.dimension() {
            if let Some(r) = rows.iter().find(|r| r.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
        }
        Ok(rows.par_iter().map(|r| self.predict_one(r)).collect())
    }

    pub fn predict_rows(&self, rows: &[LabeledRow<T>]) -> Result<Vec<u8>> {
        let x: Vec<Vec<T>> = rows.iter().map(|r| r.features.clone()).collect();
        self.predict(&x)
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned on-disk form of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ModelDocument<T> {
    pub format_version: u32,
    /// Absent for the baseline.
    pub spec: Option<ClassifierSpec>,
    pub model: Model<T>,
}

impl<T: Scalar> ModelDocument<T> {
    pub fn new(spec: Option<ClassifierSpec>, model: Model<T>) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            spec,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_str(text)?;
        if v.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion(v.format_version));
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
