use chrono::NaiveDate;
use serde::Serialize;

use super::elbow::{elbow, ElbowCurve, DEFAULT_K_MAX};
use super::kmeans::{kmeans_fit_with, ClusterModel, KMeansConfig};
use crate::cleaning::{max_normalize, Feature};
use crate::dataset::{CoinKey, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOptions {
    pub k: Option<usize>,
    pub k_max: usize,
    pub seed: u64,
    pub kmeans: KMeansConfig,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            k: None,
            k_max: DEFAULT_K_MAX,
            seed: 0,
            kmeans: KMeansConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub date: NaiveDate,
    pub features: Vec<Feature>,
    /// Clustered coins, in point order.
    pub keys: Vec<CoinKey>,
    /// Coins observed on the date but missing a feature.
    pub excluded: Vec<CoinKey>,
    pub model: ClusterModel<f64>,
    pub elbow: Option<ElbowCurve<f64>>,
}

impl ClusterReport {
    pub fn assignment(&self, key: &CoinKey) -> Option<usize> {
        let i = self.keys.iter().position(|k| k == key)?;
        Some(self.model.assignments[i])
    }

    pub const CSV_HEADER: [&'static str; 2] = ["coin_key", "cluster_id"];

    pub fn assignments_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(Self::CSV_HEADER)?;
        for (k, a) in self.keys.iter().zip(&self.model.assignments) {
            wtr.write_record([k.as_str(), &a.to_string()])?;
        }
        crate::error::finish_csv(wtr)
    }
}

/// Clusters the coins observed on `date`.
///
/// Coins missing any of `features` are dropped, each feature is divided by
/// its maximum, and k comes from the elbow rule over `1..=k_max` when not
/// given.
pub fn cluster_report(
    dataset: &Dataset,
    date: NaiveDate,
    features: &[Feature],
    options: &ClusterOptions,
) -> Result<ClusterReport> {
    if features.is_empty() {
        return Err(Error::InvalidInput("no clustering features".into()));
    }
    let snapshot = dataset.snapshot_at(date);
    if snapshot.is_empty() {
        return Err(Error::InvalidInput(format!("no coins observed on {date}")));
    }
    let mut keys = Vec::new();
    let mut excluded = Vec::new();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    for s in snapshot {
        let values: Option<Vec<f64>> = features.iter().map(|f| f.extract(s)).collect();
        match values {
            Some(v) => {
                keys.push(s.key.clone());
                raw.push(v);
            }
            None => excluded.push(s.key.clone()),
        }
    }
    let n = raw.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let mut points = vec![Vec::with_capacity(features.len()); n];
    for j in 0..features.len() {
        let column: Vec<f64> = raw.iter().map(|r| r[j]).collect();
        for (p, v) in points.iter_mut().zip(max_normalize(&column)?) {
            p.push(v);
        }
    }
    let (k, curve) = match options.k {
        Some(k) => {
            if k > n {
                return Err(Error::TooFewPoints { needed: k, got: n });
            }
            (k, None)
        }
        None => {
            let k_max = options.k_max.min(n);
            let curve = elbow(&points, 1, k_max, options.seed, options.kmeans.restarts)?;
            (curve.chosen_k, Some(curve))
        }
    };
    let model = kmeans_fit_with(&points, k, options.seed, &options.kmeans)?;
    Ok(ClusterReport {
        date,
        features: features.to_vec(),
        keys,
        excluded,
        model,
        elbow: curve,
    })
}
