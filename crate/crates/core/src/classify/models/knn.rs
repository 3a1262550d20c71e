use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{check_training, majority};
use crate::classify::spec::KnnParams;
use crate::error::Result;
use crate::scalar::Scalar;

/// Stores the training set; predicts by majority over the k nearest points
/// (Euclidean). Distance ties go to the smaller training index and vote ties
/// to label 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Knn<T> {
    pub k: usize,
    pub points: Vec<Vec<T>>,
    pub labels: Vec<u8>,
}

impl<T: Scalar> Knn<T> {
    pub fn fit(points: &[&[T]], labels: &[u8], params: &KnnParams) -> Result<Self> {
        check_training(points, labels)?;
        Ok(Self {
            k: params.k.min(points.len()),
            points: points.iter().map(|p| p.to_vec()).collect(),
            labels: labels.to_vec(),
        })
    }

    /// Indices of the k nearest training points, nearest first.
    pub fn neighbors(&self, x: &[T]) -> Vec<usize> {
        let mut d: Vec<(T, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (crate::cluster::sq_dist(p, x), i))
            .collect();
        let cmp = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.sort_unstable_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict_one(&self, x: &[T]) -> u8 {
        let nn = self.neighbors(x);
        let ones = nn.iter().filter(|&&i| self.labels[i] == 1).count();
        majority(ones, nn.len())
    }
}
