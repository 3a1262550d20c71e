//! Risk labels, train/test splits, six classifiers written from scratch and
//! their evaluation.
//!
//! Rows are coin-days. The positive class (1) is a coin that disappeared
//! before the cutoff.

mod data;
mod flags;
mod metrics;
mod model;
pub mod models;
mod spec;

pub use data::{
    label_risky, prepare_split, split_indices, split_rows, train_test_split, LabeledRow, PreparedSplit,
    Preprocessor, RawRow, SplitMode,
};
pub use flags::{manipulability_flags, FlagThresholds, ManipulabilityFlag};
pub use metrics::{evaluate, metrics_from_csv, metrics_to_csv, ConfusionCounts, EvalMetrics, METRICS_CSV_HEADER};
pub use model::{fit, fit_majority, ConstantClassifier, Model, ModelDocument, MODEL_FORMAT_VERSION};
pub use spec::{ClassifierKind, ClassifierSpec, ForestParams, KnnParams, LinearParams, MaxFeatures, NbParams, TreeParams};
