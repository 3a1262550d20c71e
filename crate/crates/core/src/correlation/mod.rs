//! Pearson, Kendall tau-b and Spearman correlation, correlation matrices and
//! the price-factor reports.

mod interpret;
mod kendall;
mod rank;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use interpret::{interpret, Direction, Interpretation, Strength};
pub use kendall::kendall_tau_b;
pub use rank::average_ranks;
pub use report::{correlation_matrix, price_factor_report, reports_to_csv, CorrelationReport, PriceFactorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    Pearson,
    Kendall,
    Spearman,
}

impl CorrelationMethod {
    pub const ALL: [CorrelationMethod; 3] = [
        CorrelationMethod::Pearson,
        CorrelationMethod::Kendall,
        CorrelationMethod::Spearman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Kendall => "kendall",
            CorrelationMethod::Spearman => "spearman",
        }
    }
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pearson" => Ok(Self::Pearson),
            "kendall" => Ok(Self::Kendall),
            "spearman" => Ok(Self::Spearman),
            other => Err(Error::InvalidInput(format!("unknown correlation method `{other}`"))),
        }
    }
}

pub(crate) fn check_dense<T: Scalar>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCoefficient(format!(
            "need at least 2 complete pairs, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("correlation inputs must be finite".into()));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_dense(x, y)?;
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(Error::UndefinedCoefficient("zero variance".into()));
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// Pearson correlation of the average ranks.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_dense(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y)).map_err(|e| match e {
        Error::UndefinedCoefficient(_) => {
            Error::UndefinedCoefficient("spearman: every value on one side is tied".into())
        }
        other => other,
    })
}

pub fn correlate_dense<T: Scalar>(method: CorrelationMethod, x: &[T], y: &[T]) -> Result<T> {
    match method {
        CorrelationMethod::Pearson => pearson(x, y),
        CorrelationMethod::Kendall => kendall_tau_b(x, y),
        CorrelationMethod::Spearman => spearman(x, y),
    }
}

/// Keeps the positions where both sides are present.
pub fn pairwise_complete<T: Scalar>(x: &[Option<T>], y: &[Option<T>]) -> Result<(Vec<T>, Vec<T>)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip())
}

/// Correlation over the pairs where both values are present.
pub fn correlate<T: Scalar>(method: CorrelationMethod, x: &[Option<T>], y: &[Option<T>]) -> Result<T> {
    let (xs, ys) = pairwise_complete(x, y)?;
    correlate_dense(method, &xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pearson_affine() {
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_monotone() {
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 100.0, 1000.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert!(spearman(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn pairwise_deletion() {
        let x = [Some(1.0), None, Some(2.0), Some(3.0)];
        let y = [Some(3.0), Some(9.0), Some(1.0), Some(2.0)];
        let tau = correlate(CorrelationMethod::Kendall, &x, &y).unwrap();
        assert_abs_diff_eq!(tau, -1.0 / 3.0, epsilon = 1e-15);
        let x = [Some(1.0), None];
        let y = [Some(1.0), Some(2.0)];
        assert!(correlate(CorrelationMethod::Pearson, &x, &y).is_err());
        assert!(correlate::<f64>(CorrelationMethod::Pearson, &[Some(1.0)], &[]).is_err());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("Kendall".parse::<CorrelationMethod>().unwrap(), CorrelationMethod::Kendall);
        assert!("tau".parse::<CorrelationMethod>().is_err());
    }

    #[test]
    fn f32_kernels() {
        let x = [1.0_f32, 2.0, 3.0, 4.0];
        let y = [1.0_f32, 3.0, 2.0, 4.0];
        assert!((kendall_tau_b(&x, &y).unwrap() - 4.0 / 6.0).abs() < 1e-6);
        assert!((spearman(&x, &y).unwrap() - 0.8).abs() < 1e-6);
    }
}
