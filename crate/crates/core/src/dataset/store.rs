use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::key::CoinKey;
use super::snapshot::{CoinSnapshot, Field};
use crate::error::{Error, Result};

/// Immutable collection of snapshots grouped into per-coin series.
///
/// Each series is strictly increasing in date; a repeated (coin, day) pair is
/// rejected at construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    series: BTreeMap<CoinKey, Vec<CoinSnapshot>>,
    extended: bool,
    rows: usize,
}

impl Dataset {
    /// Groups, sorts and freezes the snapshots. `extended` records whether
    /// the optional extended columns are part of the dataset schema; it is
    /// forced on when any snapshot carries an extended value.
    pub fn from_snapshots(
        snapshots: impl IntoIterator<Item = CoinSnapshot>,
        extended: bool,
    ) -> Result<Self> {
        let mut series: BTreeMap<CoinKey, Vec<CoinSnapshot>> = BTreeMap::new();
        let mut extended = extended;
        let mut rows = 0;
        for s in snapshots {
            extended |= s.has_extended();
            rows += 1;
            series.entry(s.key.clone()).or_default().push(s);
        }
        let mut duplicates = Vec::new();
        for (key, rows) in series.iter_mut() {
            rows.sort_by_key(|s| s.date);
            for w in rows.windows(2) {
                if w[0].date == w[1].date {
                    duplicates.push((key.to_string(), w[0].date));
                }
            }
        }
        if !duplicates.is_empty() {
            duplicates.dedup();
            return Err(Error::DuplicateCoinDay(duplicates));
        }
        Ok(Self {
            series,
            extended,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn series_count(&self) -> usize {
        self.series.len()
    }

    pub fn has_extended_columns(&self) -> bool {
        self.extended
    }

    pub fn keys(&self) -> impl Iterator<Item = &CoinKey> {
        self.series.keys()
    }

    pub fn series(&self, key: &CoinKey) -> Option<&[CoinSnapshot]> {
        self.series.get(key).map(Vec::as_slice)
    }

    /// Per-coin series in key order.
    pub fn iter_series(&self) -> impl Iterator<Item = (&CoinKey, &[CoinSnapshot])> {
        self.series.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// All rows, ordered by key then date.
    pub fn rows(&self) -> impl Iterator<Item = &CoinSnapshot> {
        self.series.values().flatten()
    }

    /// Earliest and latest observed day.
    pub fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        let first = self.series.values().filter_map(|s| s.first()).map(|s| s.date).min()?;
        let last = self.series.values().filter_map(|s| s.last()).map(|s| s.date).max()?;
        Some((first, last))
    }

    /// One entry per row in [`Dataset::rows`] order.
    pub fn column(&self, field: Field) -> Vec<Option<f64>> {
        self.rows().map(|s| s.get(field)).collect()
    }

    /// Snapshots observed on `date`, ordered by key.
    pub fn snapshot_at(&self, date: NaiveDate) -> Vec<&CoinSnapshot> {
        self.series
            .values()
            .filter_map(|rows| {
                rows.binary_search_by_key(&date, |s| s.date)
                    .ok()
                    .map(|i| &rows[i])
            })
            .collect()
    }

    /// Rows with `start <= date <= end`.
    pub fn restrict(&self, start: NaiveDate, end: NaiveDate) -> Result<Dataset> {
        if start > end {
            return Err(Error::EmptyRange { start, end });
        }
        let kept = self
            .rows()
            .filter(|s| s.date >= start && s.date <= end)
            .cloned();
        Dataset::from_snapshots(kept, self.extended)
    }
}

/// Free-function form of [`Dataset::snapshot_at`].
pub fn snapshot_at(dataset: &Dataset, date: NaiveDate) -> Vec<&CoinSnapshot> {
    dataset.snapshot_at(date)
}
