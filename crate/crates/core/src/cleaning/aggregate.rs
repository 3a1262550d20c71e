use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use super::feature::Feature;
use crate::dataset::{CoinKey, Dataset};
use crate::error::{Error, Result};
use crate::scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

/// Per-coin mean and standard deviation of [`Feature::AGGREGATED`]. A column
/// with fewer than two present values has no entry.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AggregateFeatures {
    pub stats: BTreeMap<Feature, ColumnStats>,
}

impl AggregateFeatures {
    pub fn get(&self, feature: Feature) -> Option<ColumnStats> {
        self.stats.get(&feature).copied()
    }

    pub fn mean(&self, feature: Feature) -> Option<f64> {
        self.get(feature).map(|s| s.mean)
    }

    pub fn std(&self, feature: Feature) -> Option<f64> {
        self.get(feature).map(|s| s.std)
    }

    /// Statistics over arbitrary per-row values.
    pub fn from_rows<'a>(
        rows: impl IntoIterator<Item = &'a crate::dataset::CoinSnapshot> + Clone,
        features: &[Feature],
    ) -> Self {
        let mut stats = BTreeMap::new();
        for &f in features {
            let values: Vec<f64> = rows.clone().into_iter().filter_map(|s| f.extract(s)).collect();
            if values.len() >= 2 {
                stats.insert(
                    f,
                    ColumnStats {
                        mean: scalar::mean(&values).expect("nonempty"),
                        std: scalar::population_std(&values).expect("nonempty"),
                        n: values.len(),
                    },
                );
            }
        }
        Self { stats }
    }
}

/// Mean and standard deviation per coin over rows with `start <= date <= end`.
/// Coins without rows in the range are omitted.
pub fn aggregate_stats(
    dataset: &Dataset,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<BTreeMap<CoinKey, AggregateFeatures>> {
    if start > end {
        return Err(Error::EmptyRange { start, end });
    }
    let mut out = BTreeMap::new();
    for (key, rows) in dataset.iter_series() {
        let in_range: Vec<_> = rows.iter().filter(|s| s.date >= start && s.date <= end).collect();
        if in_range.is_empty() {
            continue;
        }
        let agg = AggregateFeatures::from_rows(in_range.iter().copied(), &Feature::AGGREGATED);
        out.insert(key.clone(), agg);
    }
    Ok(out)
}
