//! Seeded generator of coin histories with planted structure: an exact share
//! of disappeared coins, stratified lifetimes, a tunable price/supply
//! coupling and blob clusters in the clustering columns.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{CoinKey, CoinSnapshot, Dataset};
use crate::error::{Error, Result};
use crate::survival::{LONG_SURVIVOR_DAYS, ONE_YEAR_DAYS, SHORT_LIFETIME_DAYS};

/// Blob coordinates per coin: ptsc, market pairs, value locked, staking
/// reward, staking share, whale share, valuation, volume level.
const BLOB_DIMS: usize = 8;
const BLOB_MIN_SEPARATION: f64 = 0.5;
const BLOB_NOISE_STD: f64 = 0.01;
const PRICE_SCALE: f64 = 1e9;
/// Log-price span (natural units) of the valuation term at zero coupling.
const VALUATION_SPAN: f64 = 4.0 * std::f64::consts::LN_10;
const CALM_VOLUME_SIGMA: f64 = 0.02;
const VOLATILE_VOLUME_SIGMA: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub coins: usize,
    /// `coins * disappeared_fraction` must be a whole number.
    pub disappeared_fraction: f64,
    /// Share of disappeared coins living under 80 days.
    pub short_lived_fraction: f64,
    /// Share of disappeared coins living under 365 days (includes the short-lived).
    pub under_year_fraction: f64,
    /// Share of surviving coins living over 1000 days.
    pub long_survivor_fraction: f64,
    pub max_lifetime_days: i64,
    /// Last observed day of surviving coins.
    pub end_date: NaiveDate,
    pub row_stride_days: i64,
    /// 1 makes price a strictly decreasing function of total supply across
    /// all rows; 0 leaves a per-coin valuation term of several decades.
    pub price_supply_coupling: f64,
    pub planted_clusters: usize,
    pub unlimited_supply_fraction: f64,
    /// Share of disappeared coins with erratic daily volume.
    pub volatile_volume_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            coins: 100,
            disappeared_fraction: 0.39,
            short_lived_fraction: 0.4,
            under_year_fraction: 0.75,
            long_survivor_fraction: 0.1,
            max_lifetime_days: 1500,
            end_date: NaiveDate::from_ymd_opt(2022, 1, 1).expect("valid date"),
            row_stride_days: 7,
            price_supply_coupling: 0.8,
            planted_clusters: 5,
            unlimited_supply_fraction: 0.3,
            volatile_volume_fraction: 0.3,
            seed: 0,
        }
    }
}

/// Coin counts implied by a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlantedCounts {
    pub disappeared: usize,
    pub surviving: usize,
    pub disappeared_under_80_days: usize,
    pub disappeared_under_1_year: usize,
    pub surviving_over_1000_days: usize,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Infeasible(m));
        if self.coins == 0 {
            return bad("coins must be at least 1".into());
        }
        for (name, v) in [
            ("disappeared_fraction", self.disappeared_fraction),
            ("short_lived_fraction", self.short_lived_fraction),
            ("under_year_fraction", self.under_year_fraction),
            ("long_survivor_fraction", self.long_survivor_fraction),
            ("price_supply_coupling", self.price_supply_coupling),
            ("unlimited_supply_fraction", self.unlimited_supply_fraction),
            ("volatile_volume_fraction", self.volatile_volume_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if self.short_lived_fraction > self.under_year_fraction {
            return bad("short_lived_fraction exceeds under_year_fraction".into());
        }
        let exact = self.coins as f64 * self.disappeared_fraction;
        if (exact - exact.round()).abs() > 1e-6 {
            return bad(format!(
                "{} coins cannot have a disappeared fraction of {}",
                self.coins, self.disappeared_fraction
            ));
        }
        if self.max_lifetime_days <= LONG_SURVIVOR_DAYS {
            return bad(format!("max_lifetime_days must exceed {LONG_SURVIVOR_DAYS}"));
        }
        if self.row_stride_days < 1 {
            return bad("row_stride_days must be at least 1".into());
        }
        if self.planted_clusters == 0 {
            return bad("planted_clusters must be at least 1".into());
        }
        Ok(())
    }

    /// Sub-shares are rounded to whole coins; the disappeared share is exact.
    pub fn planted_counts(&self) -> Result<PlantedCounts> {
        self.validate()?;
        let disappeared = (self.coins as f64 * self.disappeared_fraction).round() as usize;
        let surviving = self.coins - disappeared;
        let share = |n: usize, f: f64| (n as f64 * f).round() as usize;
        Ok(PlantedCounts {
            disappeared,
            surviving,
            disappeared_under_80_days: share(disappeared, self.short_lived_fraction),
            disappeared_under_1_year: share(disappeared, self.under_year_fraction),
            surviving_over_1000_days: share(surviving, self.long_survivor_fraction),
        })
    }
}

/// What the generator planted for one coin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoinTruth {
    pub cluster: usize,
    pub disappeared: bool,
    pub lifetime_days: i64,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub truth: BTreeMap<CoinKey, CoinTruth>,
    pub centers: Vec<[f64; BLOB_DIMS]>,
}

fn blob_centers(k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<[f64; BLOB_DIMS]>> {
    let mut centers: Vec<[f64; BLOB_DIMS]> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Infeasible(format!("cannot place {k} separated clusters")));
        }
        let c: [f64; BLOB_DIMS] = std::array::from_fn(|_| rng.random_range(0.1..1.0));
        let far = centers.iter().all(|o| {
            o.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= BLOB_MIN_SEPARATION
        });
        if far {
            centers.push(c);
        }
    }
    Ok(centers)
}

/// Lifetimes for one group: `counts[i]` coins drawn from `ranges[i]`.
fn stratified(counts: &[usize], ranges: &[(i64, i64)], rng: &mut ChaCha8Rng) -> Vec<i64> {
    let mut out = Vec::new();
    for (&n, &(lo, hi)) in counts.iter().zip(ranges) {
        out.extend((0..n).map(|_| rng.random_range(lo..=hi)));
    }
    out.shuffle(rng);
    out
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    generate_with_truth(spec).map(|d| d.dataset)
}

pub fn generate_with_truth(spec: &SyntheticSpec) -> Result<SyntheticData> {
    let counts = spec.planted_counts()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = blob_centers(spec.planted_clusters, &mut rng)?;
    let max_life = spec.max_lifetime_days;

    let gone = counts.disappeared;
    let short = counts.disappeared_under_80_days;
    let mid = counts.disappeared_under_1_year - short;
    let gone_lifetimes = stratified(
        &[short, mid, gone - short - mid],
        &[
            (1, SHORT_LIFETIME_DAYS - 1),
            (SHORT_LIFETIME_DAYS, ONE_YEAR_DAYS - 1),
            (ONE_YEAR_DAYS, max_life),
        ],
        &mut rng,
    );
    let long = counts.surviving_over_1000_days;
    let alive_lifetimes = stratified(
        &[long, counts.surviving - long],
        &[(LONG_SURVIVOR_DAYS + 1, max_life), (30, LONG_SURVIVOR_DAYS)],
        &mut rng,
    );
    let volatile = (gone as f64 * spec.volatile_volume_fraction).round() as usize;

    let noise = Normal::new(0.0, BLOB_NOISE_STD).expect("valid std");
    let unit = Normal::new(0.0, 1.0).expect("valid std");
    let c = spec.price_supply_coupling;
    let mut snapshots = Vec::new();
    let mut truth = BTreeMap::new();
    let width = spec.coins.to_string().len().max(4);

    let plan = gone_lifetimes
        .iter()
        .enumerate()
        .map(|(i, &l)| (true, i, l))
        .chain(alive_lifetimes.iter().enumerate().map(|(i, &l)| (false, i, l)));
    for (n, (disappeared, rank, lifetime)) in plan.enumerate() {
        let key = CoinKey::new(&format!("Coin{n:0width$}"), &format!("C{n:0width$}"))?;
        let cluster = rank % spec.planted_clusters;
        let b: [f64; BLOB_DIMS] =
            std::array::from_fn(|j| (centers[cluster][j] + noise.sample(&mut rng)).clamp(0.01, 1.0));
        let last = if disappeared {
            spec.end_date - Duration::days(rng.random_range(1..=200))
        } else {
            spec.end_date
        };
        let first = last - Duration::days(lifetime);
        let supply0 = 10f64.powf(rng.random_range(6.0..10.0));
        let growth = rng.random_range(1e-4..1e-3);
        let unlimited = rng.random::<f64>() < spec.unlimited_supply_fraction;
        let supply_end = supply0 * (growth * lifetime as f64).exp();
        let max_supply = (!unlimited).then(|| supply_end * rng.random_range(1.1..3.0));
        let vol_sigma = if disappeared && rank < volatile {
            VOLATILE_VOLUME_SIGMA
        } else {
            CALM_VOLUME_SIGMA
        };
        let valuation = ((1.0 - c) * VALUATION_SPAN * b[6]).exp();
        let ptsc = b[0];

        let mut days: Vec<i64> = (0..=lifetime).step_by(spec.row_stride_days as usize).collect();
        if days.last() != Some(&lifetime) {
            days.push(lifetime);
        }
        for t in days {
            let total = supply0 * (growth * t as f64).exp();
            let circulating = ptsc * total;
            let price = PRICE_SCALE * valuation / total;
            let mut s = CoinSnapshot::empty(key.clone(), first + Duration::days(t));
            s.price = Some(price);
            s.max_supply = max_supply;
            s.total_supply = Some(total);
            s.circulating_supply = Some(circulating);
            s.market_cap = Some(price * circulating);
            s.volume_24h = Some(b[7] * 1e8 * (vol_sigma * unit.sample(&mut rng)).exp());
            s.num_market_pairs = Some((b[1] * 500.0).round().max(1.0));
            s.total_value_locked = Some(b[2] * 1e9);
            s.staking_reward = Some(b[3] * 20.0);
            s.total_staking_percentage = Some(b[4] * 100.0);
            s.whales_percentage = Some(b[5] * 100.0);
            snapshots.push(s);
        }
        truth.insert(
            key,
            CoinTruth {
                cluster,
                disappeared,
                lifetime_days: lifetime,
            },
        );
    }
    Ok(SyntheticData {
        dataset: Dataset::from_snapshots(snapshots, true)?,
        truth,
        centers,
    })
}

/// `k` Gaussian blobs of `per_blob` points in `dim` dimensions with noise
/// `std`. Centers are uniform in a cube of side `2.5 * min_separation` and at
/// least `min_separation` apart. Returns the points and their blob ids.
pub fn blobs(
    k: usize,
    per_blob: usize,
    dim: usize,
    min_separation: f64,
    std: f64,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    if k == 0 || per_blob == 0 || dim == 0 {
        return Err(Error::Infeasible("blobs need k, per_blob and dim >= 1".into()));
    }
    let noise = Normal::new(0.0, std).map_err(|e| Error::Infeasible(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 2.5 * min_separation;
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::Infeasible(format!("cannot place {k} blobs {min_separation} apart")));
        }
        let c: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..side)).collect();
        let far = centers.iter().all(|o| {
            o.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= min_separation
        });
        if far {
            centers.push(c);
        }
    }
    let mut points = Vec::with_capacity(k * per_blob);
    let mut labels = Vec::with_capacity(k * per_blob);
    for (id, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            points.push(c.iter().map(|&v| v + noise.sample(&mut rng)).collect());
            labels.push(id);
        }
    }
    Ok((points, labels))
}

/// Labeled rows with exactly `round(rows * risky_fraction)` risky rows.
/// Each class is a unit-variance Gaussian; the class means are `gap` apart
/// along every axis.
pub fn separable_rows(
    rows: usize,
    risky_fraction: f64,
    dim: usize,
    gap: f64,
    seed: u64,
) -> Result<Vec<crate::classify::LabeledRow<f64>>> {
    if !(0.0..=1.0).contains(&risky_fraction) || dim == 0 {
        return Err(Error::Infeasible("risky_fraction must be in [0, 1] and dim >= 1".into()));
    }
    let risky = (rows as f64 * risky_fraction).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid std");
    let mut labels: Vec<u8> = (0..rows).map(|i| u8::from(i < risky)).collect();
    labels.shuffle(&mut rng);
    let date = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let shift = if label == 1 { gap / 2.0 } else { -gap / 2.0 };
            Ok(crate::classify::LabeledRow {
                key: CoinKey::new(&format!("Row{i}"), "R")?,
                date,
                features: (0..dim).map(|_| shift + unit.sample(&mut rng)).collect(),
                label,
            })
        })
        .collect()
}
