//! Imputation, normalization and derived features.

mod aggregate;
mod derive;
mod feature;
mod impute;
mod normalize;
mod table;

pub use aggregate::{aggregate_stats, AggregateFeatures, ColumnStats};
pub use derive::{derive_market_cap, derive_ptsc, Ptsc, PtscQuality};
pub use feature::Feature;
pub use impute::{impute_max_supply, impute_mean, impute_scaled_max, MAX_SUPPLY_FILL_FACTOR};
pub use normalize::{max_normalize, mean_normalize, NormStats};
pub use table::FeatureTable;
