use serde::{Deserialize, Serialize};

use super::{check_training, require_both_classes};
use crate::classify::spec::LinearParams;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
}

impl<T: Scalar> LinearModel<T> {
    pub fn decision(&self, x: &[T]) -> T {
        self.weights.iter().zip(x).map(|(&w, &v)| w * v).sum::<T>() + self.bias
    }

    /// Positive side of the hyperplane is risky; the boundary itself is not.
    pub fn predict_one(&self, x: &[T]) -> u8 {
        u8::from(self.decision(x) > T::zero())
    }

    pub fn fit_logistic(points: &[&[T]], labels: &[u8], params: &LinearParams) -> Result<Self> {
        let d = check_training(points, labels)?;
        require_both_classes(labels)?;
        let lambda = T::lit(params.lambda);
        let step = T::lit(params.step);
        let mut w = vec![T::zero(); d];
        let mut b = T::zero();
        for _ in 0..params.iterations {
            let (gw, gb) = logistic_gradient(&w, b, points, labels, lambda);
            for (wi, g) in w.iter_mut().zip(gw) {
                *wi -= step * g;
            }
            b -= step * gb;
        }
        Ok(Self { weights: w, bias: b })
    }

    /// Subgradient descent on the mean hinge loss plus `lambda/2 * |w|^2`.
    pub fn fit_svm(points: &[&[T]], labels: &[u8], params: &LinearParams) -> Result<Self> {
        let d = check_training(points, labels)?;
        require_both_classes(labels)?;
        let lambda = T::lit(params.lambda);
        let step = T::lit(params.step);
        let n = T::of_usize(points.len());
        let mut w = vec![T::zero(); d];
        let mut b = T::zero();
        let mut gw = vec![T::zero(); d];
        for _ in 0..params.iterations {
            gw.iter_mut().zip(&w).for_each(|(g, &wi)| *g = lambda * wi);
            let mut gb = T::zero();
            for (x, &l) in points.iter().zip(labels) {
                let y = if l == 1 { T::one() } else { -T::one() };
                let margin = y * (w.iter().zip(x.iter()).map(|(&a, &v)| a * v).sum::<T>() + b);
                if margin < T::one() {
                    for (g, &v) in gw.iter_mut().zip(x.iter()) {
                        *g -= y * v / n;
                    }
                    gb -= y / n;
                }
            }
            for (wi, &g) in w.iter_mut().zip(&gw) {
                *wi -= step * g;
            }
            b -= step * gb;
        }
        Ok(Self { weights: w, bias: b })
    }
}

fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Mean log-loss plus `lambda/2 * |w|^2` (the bias is not penalized).
pub fn logistic_loss<T: Scalar>(w: &[T], b: T, points: &[&[T]], labels: &[u8], lambda: T) -> T {
    let n = T::of_usize(points.len());
    let data: T = points
        .iter()
        .zip(labels)
        .map(|(x, &l)| {
            let z = w.iter().zip(x.iter()).map(|(&a, &v)| a * v).sum::<T>() + b;
            softplus(z) - T::of_usize(l as usize) * z
        })
        .sum();
    let reg: T = w.iter().map(|&v| v * v).sum();
    data / n + lambda * reg / T::lit(2.0)
}

/// Gradient of [`logistic_loss`] with respect to `(w, b)`.
pub fn logistic_gradient<T: Scalar>(w: &[T], b: T, points: &[&[T]], labels: &[u8], lambda: T) -> (Vec<T>, T) {
    let n = T::of_usize(points.len());
    let mut gw: Vec<T> = w.iter().map(|&v| lambda * v).collect();
    let mut gb = T::zero();
    for (x, &l) in points.iter().zip(labels) {
        let z = w.iter().zip(x.iter()).map(|(&a, &v)| a * v).sum::<T>() + b;
        let r = (sigmoid(z) - T::of_usize(l as usize)) / n;
        for (g, &v) in gw.iter_mut().zip(x.iter()) {
            *g += r * v;
        }
        gb += r;
    }
    (gw, gb)
}
