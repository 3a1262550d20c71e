use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::DecisionTree;
use super::{check_training, majority, require_both_classes};
use crate::classify::spec::ForestParams;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RandomForest<T> {
    pub trees: Vec<DecisionTree<T>>,
}

impl<T: Scalar> RandomForest<T> {
    pub fn fit(points: &[&[T]], labels: &[u8], params: &ForestParams, seed: u64) -> Result<Self> {
        let d = check_training(points, labels)?;
        require_both_classes(labels)?;
        let n = points.len();
        let per_split = params.max_features.resolve(d);
        let tree_params = params.tree();
        let mut seeder = ChaCha8Rng::seed_from_u64(seed);
        let seeds: Vec<u64> = (0..params.n_trees).map(|_| seeder.random()).collect();
        let trees = seeds
            .par_iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::grow(points, labels, idx, &tree_params, Some((per_split, &mut rng)))
            })
            .collect();
        Ok(Self { trees })
    }

    /// Majority vote; an even split goes to 0.
    pub fn predict_one(&self, x: &[T]) -> u8 {
        let ones = self.trees.iter().filter(|t| t.predict_one(x) == 1).count();
        majority(ones, self.trees.len())
    }
}
