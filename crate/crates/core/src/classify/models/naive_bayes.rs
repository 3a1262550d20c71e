use serde::{Deserialize, Serialize};

use super::check_training;
use crate::classify::spec::NbParams;
use crate::error::Result;
use crate::scalar::{self, Scalar};

/// Gaussian naive Bayes. Classes absent from training are never predicted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaussianNb<T> {
    /// Ascending.
    pub classes: Vec<u8>,
    pub log_priors: Vec<T>,
    pub means: Vec<Vec<T>>,
    pub variances: Vec<Vec<T>>,
}

impl<T: Scalar> GaussianNb<T> {
    pub fn fit(points: &[&[T]], labels: &[u8], params: &NbParams) -> Result<Self> {
        let d = check_training(points, labels)?;
        let column = |rows: &[&[T]], j: usize| rows.iter().map(|r| r[j]).collect::<Vec<T>>();
        let max_var = (0..d)
            .map(|j| scalar::population_variance(&column(points, j)).expect("nonempty"))
            .fold(T::zero(), T::max);
        let mut epsilon = T::lit(params.var_smoothing) * max_var;
        if epsilon <= T::zero() {
            epsilon = T::lit(params.var_smoothing);
        }
        let n = T::of_usize(points.len());
        let mut model = GaussianNb {
            classes: Vec::new(),
            log_priors: Vec::new(),
            means: Vec::new(),
            variances: Vec::new(),
        };
        for class in [0u8, 1] {
            let rows: Vec<&[T]> = points
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == class)
                .map(|(p, _)| *p)
                .collect();
            if rows.is_empty() {
                continue;
            }
            model.classes.push(class);
            model.log_priors.push((T::of_usize(rows.len()) / n).ln());
            model.means.push((0..d).map(|j| scalar::mean(&column(&rows, j)).expect("nonempty")).collect());
            model.variances.push(
                (0..d)
                    .map(|j| scalar::population_variance(&column(&rows, j)).expect("nonempty") + epsilon)
                    .collect(),
            );
        }
        Ok(model)
    }

    pub fn log_joint(&self, x: &[T]) -> Vec<T> {
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let half = T::lit(0.5);
        (0..self.classes.len())
            .map(|c| {
                let ll: T = x
                    .iter()
                    .zip(self.means[c].iter().zip(&self.variances[c]))
                    .map(|(&v, (&m, &var))| -half * ((two_pi * var).ln() + (v - m) * (v - m) / var))
                    .sum();
                self.log_priors[c] + ll
            })
            .collect()
    }

    /// Highest joint likelihood; ties go to the smaller label.
    pub fn predict_one(&self, x: &[T]) -> u8 {
        let scores = self.log_joint(x);
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        self.classes[best]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn boundary_between_symmetric_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for (mean, label) in [(-3.0, 0u8), (3.0, 1)] {
            let dist = Normal::new(mean, 1.0).unwrap();
            for _ in 0..5000 {
                pts.push(vec![dist.sample(&mut rng)]);
                labels.push(label);
            }
        }
        let view: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let nb = GaussianNb::fit(&view, &labels, &NbParams::default()).unwrap();
        // first grid point predicted risky
        let boundary = (-100..=100)
            .map(|i| i as f64 * 0.01)
            .find(|&x| nb.predict_one(&[x]) == 1)
            .unwrap();
        assert!(boundary.abs() <= 0.1, "boundary at {boundary}");
    }

    #[test]
    fn single_class_predicts_it() {
        let pts = [vec![1.0], vec![2.0]];
        let view: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let nb = GaussianNb::fit(&view, &[1, 1], &NbParams::default()).unwrap();
        assert_eq!(nb.predict_one(&[-50.0]), 1);
    }

    #[test]
    fn constant_features_do_not_divide_by_zero() {
        let pts = [vec![1.0], vec![1.0]];
        let view: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let nb = GaussianNb::fit(&view, &[0, 1], &NbParams::default()).unwrap();
        assert_eq!(nb.predict_one(&[1.0]), 0);
    }
}
