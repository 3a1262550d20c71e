//! On-chain cryptocurrency analytics.
//!
//! The crate ingests per-day coin snapshots ([`dataset`]), cleans them and
//! derives features ([`cleaning`]), measures coin lifetimes ([`survival`]),
//! computes Pearson, Kendall tau-b and Spearman correlations
//! ([`correlation`]), clusters coins with k-means++ and an elbow rule
//! ([`cluster`]), and trains risk classifiers ([`classify`]).
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix them to `f64`, which is what the data layer produces.

pub mod classify;
pub mod cleaning;
pub mod cluster;
pub mod correlation;
pub mod dataset;
pub mod error;
pub mod plot;
pub mod scalar;
pub mod survival;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureTable = cleaning::FeatureTable<f64>;
pub type NormStats = cleaning::NormStats<f64>;
pub type CorrelationReport = correlation::CorrelationReport<f64>;
pub type ClusterModel = cluster::ClusterModel<f64>;
pub type ElbowCurve = cluster::ElbowCurve<f64>;
pub type LabeledRow = classify::LabeledRow<f64>;
pub type Model = classify::Model<f64>;
