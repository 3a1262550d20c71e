use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    LogisticRegression,
    LinearSvm,
    DecisionTree,
    RandomForest,
    GaussianNb,
    Knn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::LogisticRegression,
        ClassifierKind::LinearSvm,
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
        ClassifierKind::GaussianNb,
        ClassifierKind::Knn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::GaussianNb => "gaussian_nb",
            ClassifierKind::Knn => "knn",
        }
    }

    pub fn default_spec(self) -> ClassifierSpec {
        match self {
            ClassifierKind::LogisticRegression => ClassifierSpec::LogisticRegression(LinearParams::default()),
            ClassifierKind::LinearSvm => ClassifierSpec::LinearSvm(LinearParams::default()),
            ClassifierKind::DecisionTree => ClassifierSpec::DecisionTree(TreeParams::default()),
            ClassifierKind::RandomForest => ClassifierSpec::RandomForest(ForestParams::default()),
            ClassifierKind::GaussianNb => ClassifierSpec::GaussianNb(NbParams::default()),
            ClassifierKind::Knn => ClassifierSpec::Knn(KnnParams::default()),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown classifier `{s}`")))
    }
}

/// Shared by logistic regression and the linear SVM: L2 weight `lambda`,
/// full-batch gradient steps of size `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearParams {
    pub lambda: f64,
    pub iterations: usize,
    pub step: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            iterations: 1000,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

/// Features considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `floor(sqrt(d))`, at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((d as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::All => d,
            MaxFeatures::Count(n) => n.clamp(1, d.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

impl ForestParams {
    pub fn tree(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    /// Added to every variance, as a multiple of the largest feature variance.
    pub var_smoothing: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    LogisticRegression(LinearParams),
    LinearSvm(LinearParams),
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    GaussianNb(NbParams),
    Knn(KnnParams),
}

impl ClassifierSpec {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::LogisticRegression(_) => ClassifierKind::LogisticRegression,
            ClassifierSpec::LinearSvm(_) => ClassifierKind::LinearSvm,
            ClassifierSpec::DecisionTree(_) => ClassifierKind::DecisionTree,
            ClassifierSpec::RandomForest(_) => ClassifierKind::RandomForest,
            ClassifierSpec::GaussianNb(_) => ClassifierKind::GaussianNb,
            ClassifierSpec::Knn(_) => ClassifierKind::Knn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Hyperparameter(format!("{}: {m}", self.kind())));
        match *self {
            ClassifierSpec::LogisticRegression(p) | ClassifierSpec::LinearSvm(p) => {
                if !(p.lambda.is_finite() && p.lambda >= 0.0) {
                    return bad("lambda must be finite and >= 0");
                }
                if !(p.step.is_finite() && p.step > 0.0) {
                    return bad("step must be finite and > 0");
                }
                if p.iterations == 0 {
                    return bad("iterations must be >= 1");
                }
            }
            ClassifierSpec::DecisionTree(p) => {
                if p.min_samples_split < 2 {
                    return bad("min_samples_split must be >= 2");
                }
                if p.max_depth == Some(0) {
                    return bad("max_depth must be >= 1");
                }
            }
            ClassifierSpec::RandomForest(p) => {
                if p.n_trees == 0 {
                    return bad("n_trees must be >= 1");
                }
                if p.max_features == MaxFeatures::Count(0) {
                    return bad("max_features must be >= 1");
                }
                ClassifierSpec::DecisionTree(p.tree()).validate()?;
            }
            ClassifierSpec::GaussianNb(p) => {
                if !(p.var_smoothing.is_finite() && p.var_smoothing > 0.0) {
                    return bad("var_smoothing must be finite and > 0");
                }
            }
            ClassifierSpec::Knn(p) => {
                if p.k == 0 {
                    return bad("k must be >= 1");
                }
            }
        }
        Ok(())
    }
}
