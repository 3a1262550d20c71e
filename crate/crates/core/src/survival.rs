//! Coin lifetimes, disappearance and Pareto summaries of lifetimes.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataset::{CoinKey, Dataset};
use crate::error::{Error, Result};

/// Lifetime thresholds used by [`survival_summary`], in days.
pub const SHORT_LIFETIME_DAYS: i64 = 80;
pub const ONE_YEAR_DAYS: i64 = 365;
pub const LONG_SURVIVOR_DAYS: i64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeRecord {
    pub key: CoinKey,
    pub first_day: NaiveDate,
    pub last_day: NaiveDate,
    pub lifetime_days: i64,
    pub disappeared: bool,
}

/// One record per coin. A coin has disappeared when its last observed day is
/// strictly before `cutoff`; `None` uses the latest day in the dataset.
pub fn lifetimes(dataset: &Dataset, cutoff: Option<NaiveDate>) -> Vec<LifetimeRecord> {
    let cutoff = match cutoff.or_else(|| dataset.date_range().map(|(_, last)| last)) {
        Some(c) => c,
        None => return Vec::new(),
    };
    dataset
        .iter_series()
        .filter_map(|(key, rows)| {
            let first_day = rows.first()?.date;
            let last_day = rows.last()?.date;
            Some(LifetimeRecord {
                key: key.clone(),
                first_day,
                last_day,
                lifetime_days: (last_day - first_day).num_days(),
                disappeared: last_day < cutoff,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSummary {
    pub total: usize,
    pub disappeared: usize,
    pub surviving: usize,
    pub disappeared_fraction: f64,
    /// Among disappeared coins: lifetime under 80 days.
    pub disappeared_under_80_days: Option<f64>,
    /// Among disappeared coins: lifetime under 365 days.
    pub disappeared_under_1_year: Option<f64>,
    /// Among surviving coins: lifetime over 1000 days.
    pub surviving_over_1000_days: Option<f64>,
}

fn fraction(count: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| count as f64 / total as f64)
}

pub fn survival_summary(records: &[LifetimeRecord]) -> Result<SurvivalSummary> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no lifetime records".into()));
    }
    let (gone, alive): (Vec<_>, Vec<_>) = records.iter().partition(|r| r.disappeared);
    let count = |rs: &[&LifetimeRecord], pred: &dyn Fn(i64) -> bool| {
        rs.iter().filter(|r| pred(r.lifetime_days)).count()
    };
    Ok(SurvivalSummary {
        total: records.len(),
        disappeared: gone.len(),
        surviving: alive.len(),
        disappeared_fraction: gone.len() as f64 / records.len() as f64,
        disappeared_under_80_days: fraction(count(&gone, &|d| d < SHORT_LIFETIME_DAYS), gone.len()),
        disappeared_under_1_year: fraction(count(&gone, &|d| d < ONE_YEAR_DAYS), gone.len()),
        surviving_over_1000_days: fraction(count(&alive, &|d| d > LONG_SURVIVOR_DAYS), alive.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoFilter {
    Disappeared,
    Existing,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoBucket {
    /// Inclusive lower bound in days.
    pub start: i64,
    /// Exclusive upper bound in days.
    pub end: i64,
    pub count: usize,
    pub cumulative_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoData {
    pub bucket_width_days: i64,
    /// Ordered by descending count, ties by ascending start.
    pub buckets: Vec<ParetoBucket>,
}

pub const DEFAULT_BUCKET_WIDTH_DAYS: i64 = 80;

/// Buckets lifetimes by `bucket_width_days` and orders the buckets by
/// frequency, with the running share of records per bucket.
pub fn pareto(
    records: &[LifetimeRecord],
    bucket_width_days: i64,
    filter: ParetoFilter,
) -> Result<ParetoData> {
    if bucket_width_days < 1 {
        return Err(Error::InvalidInput("bucket width must be at least 1 day".into()));
    }
    let mut counts = std::collections::BTreeMap::<i64, usize>::new();
    let mut total = 0usize;
    for r in records.iter().filter(|r| match filter {
        ParetoFilter::Disappeared => r.disappeared,
        ParetoFilter::Existing => !r.disappeared,
        ParetoFilter::All => true,
    }) {
        *counts.entry(r.lifetime_days / bucket_width_days).or_default() += 1;
        total += 1;
    }
    let mut sorted: Vec<(i64, usize)> = counts.into_iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut running = 0usize;
    let buckets = sorted
        .into_iter()
        .map(|(idx, count)| {
            running += count;
            ParetoBucket {
                start: idx * bucket_width_days,
                end: (idx + 1) * bucket_width_days,
                count,
                cumulative_pct: running as f64 / total as f64 * 100.0,
            }
        })
        .collect();
    Ok(ParetoData {
        bucket_width_days,
        buckets,
    })
}

impl ParetoData {
    pub const CSV_HEADER: [&'static str; 4] = ["bucket_start", "bucket_end", "count", "cumulative_pct"];

    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(Self::CSV_HEADER)?;
        for b in &self.buckets {
            wtr.write_record([
                b.start.to_string(),
                b.end.to_string(),
                b.count.to_string(),
                b.cumulative_pct.to_string(),
            ])?;
        }
        crate::error::finish_csv(wtr)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut buckets = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::MalformedRow {
                    row: rec.position().map(|p| p.line()).unwrap_or(0),
                    message: format!("`{}` is not a number", &rec[i]),
                })
            };
            buckets.push(ParetoBucket {
                start: num(0)? as i64,
                end: num(1)? as i64,
                count: num(2)? as usize,
                cumulative_pct: num(3)?,
            });
        }
        let bucket_width_days = buckets.first().map(|b| b.end - b.start).unwrap_or(DEFAULT_BUCKET_WIDTH_DAYS);
        Ok(Self {
            bucket_width_days,
            buckets,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{coin_key, CoinSnapshot};

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn record(name: &str, lifetime: i64, disappeared: bool) -> LifetimeRecord {
        let first = day("2020-01-01");
        LifetimeRecord {
            key: coin_key(name, name).unwrap(),
            first_day: first,
            last_day: first + chrono::Days::new(lifetime as u64),
            lifetime_days: lifetime,
            disappeared,
        }
    }

    fn series(name: &str, days: &[&str]) -> Vec<CoinSnapshot> {
        days.iter()
            .map(|d| CoinSnapshot::empty(coin_key(name, name).unwrap(), day(d)))
            .collect()
    }

    #[test]
    fn lifetime_by_calendar_days() {
        let mut rows = series("Old", &["2021-01-01", "2021-02-01", "2021-03-01"]);
        rows.extend(series("Live", &["2021-06-01", "2022-01-01"]));
        rows.extend(series("Once", &["2021-07-07"]));
        let ds = Dataset::from_snapshots(rows, false).unwrap();
        let recs = lifetimes(&ds, Some(day("2022-01-01")));
        let by = |n: &str| recs.iter().find(|r| r.key.name() == n).unwrap().clone();
        // 31 (Jan) + 28 (Feb 2021)
        assert_eq!(by("Old").lifetime_days, 59);
        assert!(by("Old").disappeared);
        assert!(!by("Live").disappeared);
        assert_eq!(by("Once").lifetime_days, 0);
    }

    #[test]
    fn default_cutoff_is_latest_day() {
        let mut rows = series("A", &["2021-01-01", "2021-01-05"]);
        rows.extend(series("B", &["2021-01-01", "2021-01-03"]));
        let ds = Dataset::from_snapshots(rows, false).unwrap();
        let recs = lifetimes(&ds, None);
        assert!(!recs[0].disappeared);
        assert!(recs[1].disappeared);
    }

    #[test]
    fn summary_fractions() {
        let mut recs: Vec<_> = (0..39).map(|i| record(&format!("d{i}"), 10, true)).collect();
        recs.extend((0..61).map(|i| record(&format!("s{i}"), 2000, false)));
        let s = survival_summary(&recs).unwrap();
        assert_eq!(s.disappeared_fraction, 0.39);
        assert_eq!(s.disappeared + s.surviving, s.total);
        assert_eq!(s.surviving_over_1000_days, Some(1.0));

        let alive: Vec<_> = (0..5).map(|i| record(&format!("s{i}"), 5, false)).collect();
        let s = survival_summary(&alive).unwrap();
        assert_eq!(s.disappeared_fraction, 0.0);
        assert_eq!(s.disappeared_under_80_days, None);
        assert_eq!(s.disappeared_under_1_year, None);
        assert!(survival_summary(&[]).is_err());
    }

    #[test]
    fn pareto_hand_bucketing() {
        let recs = vec![record("a", 10, true), record("b", 15, true), record("c", 100, true)];
        let p = pareto(&recs, 80, ParetoFilter::Disappeared).unwrap();
        assert_eq!(p.buckets.len(), 2);
        assert_eq!((p.buckets[0].start, p.buckets[0].end, p.buckets[0].count), (0, 80, 2));
        assert!((p.buckets[0].cumulative_pct - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!((p.buckets[1].start, p.buckets[1].count), (80, 1));
        assert_eq!(p.buckets[1].cumulative_pct, 100.0);
    }

    #[test]
    fn pareto_single_and_ties() {
        let p = pareto(&[record("a", 3, false)], 80, ParetoFilter::Existing).unwrap();
        assert_eq!(p.buckets.len(), 1);
        assert_eq!(p.buckets[0].cumulative_pct, 100.0);

        let recs = vec![record("a", 200, true), record("b", 5, true)];
        let p = pareto(&recs, 80, ParetoFilter::All).unwrap();
        assert_eq!(p.buckets[0].start, 0);
        assert_eq!(p.buckets[1].start, 160);

        let p = pareto(&recs, 80, ParetoFilter::Existing).unwrap();
        assert!(p.buckets.is_empty());
        assert!(pareto(&recs, 0, ParetoFilter::All).is_err());
    }

    #[test]
    fn pareto_csv_round_trip() {
        let recs = vec![record("a", 10, true), record("b", 15, true), record("c", 100, true)];
        let p = pareto(&recs, 80, ParetoFilter::All).unwrap();
        let csv = p.to_csv().unwrap();
        assert!(csv.starts_with("bucket_start,bucket_end,count,cumulative_pct\n"));
        assert_eq!(ParetoData::from_csv(&csv).unwrap(), p);
    }
}
