//! Labeled rows, train/test splits and the train-fitted preprocessing.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cleaning::{Feature, NormStats, MAX_SUPPLY_FILL_FACTOR};
use crate::dataset::{CoinKey, Dataset};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::survival::lifetimes;

/// A coin-day before imputation, with the coin's survival label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub key: CoinKey,
    pub date: NaiveDate,
    pub features: Vec<Option<f64>>,
    /// 1 = risky (disappeared before the cutoff), 0 = not risky.
    pub label: u8,
}

/// A coin-day ready for the classifiers: imputed and normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LabeledRow<T> {
    pub key: CoinKey,
    pub date: NaiveDate,
    pub features: Vec<T>,
    pub label: u8,
}

/// Every row of every coin, labeled with whether the coin disappeared before
/// `cutoff`. Labels always come from the full history; `span` only limits
/// which rows are emitted.
pub fn label_risky(
    dataset: &Dataset,
    cutoff: NaiveDate,
    span: Option<(NaiveDate, NaiveDate)>,
    features: &[Feature],
) -> Result<Vec<RawRow>> {
    if let Some((start, end)) = span {
        if start > end {
            return Err(Error::EmptyRange { start, end });
        }
    }
    let risky: BTreeMap<CoinKey, bool> = lifetimes(dataset, Some(cutoff))
        .into_iter()
        .map(|r| (r.key, r.disappeared))
        .collect();
    let rows = dataset
        .rows()
        .filter(|s| span.is_none_or(|(a, b)| s.date >= a && s.date <= b))
        .map(|s| RawRow {
            key: s.key.clone(),
            date: s.date,
            features: features.iter().map(|f| f.extract(s)).collect(),
            label: u8::from(risky[&s.key]),
        })
        .collect();
    Ok(rows)
}

fn train_size(n: usize, ratio: f64) -> Result<usize> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidInput(format!("split ratio must be in (0, 1), got {ratio}")));
    }
    let n_train = (ratio * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidInput(format!(
            "split of {n} items at ratio {ratio} leaves one side empty"
        )));
    }
    Ok(n_train)
}

/// Uniform random partition of `0..n`; both sides are returned sorted.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_train = train_size(n, ratio)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

/// Row-random split with `round(ratio * n)` training rows.
pub fn train_test_split<R: Clone>(rows: &[R], ratio: f64, seed: u64) -> Result<(Vec<R>, Vec<R>)> {
    let (train, test) = split_indices(rows.len(), ratio, seed)?;
    Ok((
        train.iter().map(|&i| rows[i].clone()).collect(),
        test.iter().map(|&i| rows[i].clone()).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Rows are split independently; one coin's rows can land on both sides.
    #[default]
    Row,
    /// Whole coins go to one side.
    Coin,
}

/// Splits rows by `mode`. In coin mode `ratio` applies to the number of coins.
pub fn split_rows(rows: &[RawRow], ratio: f64, seed: u64, mode: SplitMode) -> Result<(Vec<RawRow>, Vec<RawRow>)> {
    match mode {
        SplitMode::Row => train_test_split(rows, ratio, seed),
        SplitMode::Coin => {
            let coins: Vec<&CoinKey> = rows.iter().map(|r| &r.key).collect::<BTreeSet<_>>().into_iter().collect();
            let (train_idx, _) = split_indices(coins.len(), ratio, seed)?;
            let train_coins: BTreeSet<&CoinKey> = train_idx.iter().map(|&i| coins[i]).collect();
            Ok(rows.iter().cloned().partition(|r| train_coins.contains(&r.key)))
        }
    }
}

/// Imputation and mean normalization with statistics taken from the training
/// rows only. Absent max supply is filled with 1000 times the training
/// maximum; other absent values with the training mean. A column that is
/// constant in training is only centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Preprocessor<T> {
    pub features: Vec<Feature>,
    pub fills: Vec<T>,
    pub norms: Vec<NormStats<T>>,
}

impl<T: Scalar> Preprocessor<T> {
    pub fn fit(train: &[RawRow], features: &[Feature]) -> Result<Self> {
        if train.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: train.len(),
            });
        }
        let d = features.len();
        if let Some(r) = train.iter().find(|r| r.features.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.features.len(),
            });
        }
        let mut fills = Vec::with_capacity(d);
        let mut norms = Vec::with_capacity(d);
        for (j, &f) in features.iter().enumerate() {
            let present: Vec<T> = train.iter().filter_map(|r| r.features[j]).map(T::lit).collect();
            let fill = if f == Feature::MaxSupply {
                present.iter().copied().reduce(T::max).map(|m| m * T::lit(MAX_SUPPLY_FILL_FACTOR))
            } else {
                scalar::mean(&present)
            }
            .ok_or_else(|| Error::AllAbsent(f.name().into()))?;
            let column: Vec<T> = train
                .iter()
                .map(|r| r.features[j].map_or(fill, T::lit))
                .collect();
            let stats = match NormStats::fit(&column) {
                Ok(s) => s,
                Err(Error::ConstantColumn) => NormStats {
                    mean: column[0],
                    std: T::one(),
                },
                Err(e) => return Err(e),
            };
            fills.push(fill);
            norms.push(stats);
        }
        Ok(Self {
            features: features.to_vec(),
            fills,
            norms,
        })
    }

    pub fn transform(&self, row: &RawRow) -> Result<LabeledRow<T>> {
        if row.features.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                expected: self.features.len(),
                got: row.features.len(),
            });
        }
        let features = row
            .features
            .iter()
            .zip(self.fills.iter().zip(&self.norms))
            .map(|(v, (&fill, norm))| norm.apply(v.map_or(fill, T::lit)))
            .collect();
        Ok(LabeledRow {
            key: row.key.clone(),
            date: row.date,
            features,
            label: row.label,
        })
    }

    pub fn apply(&self, rows: &[RawRow]) -> Result<Vec<LabeledRow<T>>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct PreparedSplit<T> {
    pub train: Vec<LabeledRow<T>>,
    pub test: Vec<LabeledRow<T>>,
    pub preprocessor: Preprocessor<T>,
}

/// Splits, then fits the preprocessing on the training side and applies it
/// to both sides.
pub fn prepare_split<T: Scalar>(
    rows: &[RawRow],
    features: &[Feature],
    ratio: f64,
    seed: u64,
    mode: SplitMode,
) -> Result<PreparedSplit<T>> {
    let (train_raw, test_raw) = split_rows(rows, ratio, seed, mode)?;
    let preprocessor = Preprocessor::fit(&train_raw, features)?;
    Ok(PreparedSplit {
        train: preprocessor.apply(&train_raw)?,
        test: preprocessor.apply(&test_raw)?,
        preprocessor,
    })
}
