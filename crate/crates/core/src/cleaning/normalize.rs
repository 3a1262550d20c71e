use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Location and scale of one column. Standard deviations here and in the
/// per-coin aggregates use the population convention (divide by n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NormStats<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Scalar> NormStats<T> {
    pub fn fit(column: &[T]) -> Result<Self> {
        if column.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "mean normalization needs at least 2 values, got {}",
                column.len()
            )));
        }
        let mean = scalar::mean(column).expect("nonempty");
        let std = scalar::population_std(column).expect("nonempty");
        if std <= T::zero() {
            return Err(Error::ConstantColumn);
        }
        Ok(Self { mean, std })
    }

    #[inline]
    pub fn apply(&self, value: T) -> T {
        (value - self.mean) / self.std
    }
}

/// Maps each value to `(value - mean) / std`.
pub fn mean_normalize<T: Scalar>(column: &[T]) -> Result<Vec<T>> {
    let stats = NormStats::fit(column)?;
    Ok(column.iter().map(|&v| stats.apply(v)).collect())
}

/// Divides each value by the column maximum.
pub fn max_normalize<T: Scalar>(column: &[T]) -> Result<Vec<T>> {
    let max = column
        .iter()
        .copied()
        .reduce(T::max)
        .ok_or_else(|| Error::InvalidInput("empty column".into()))?;
    if max <= T::zero() {
        return Err(Error::NonPositiveMax);
    }
    Ok(column.iter().map(|&v| v / max).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mean_normalize_hand_values() {
        // mean 2, population std sqrt(2/3)
        let z = mean_normalize(&[1.0, 2.0, 3.0]).unwrap();
        let expected = 1.0 / (2.0_f64 / 3.0).sqrt();
        assert_abs_diff_eq!(z[0], -expected, epsilon = 1e-15);
        assert_eq!(z[1], 0.0);
        assert_abs_diff_eq!(z[2], expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 1.224744871391589, epsilon = 1e-15);
    }

    #[test]
    fn mean_normalize_errors() {
        assert!(matches!(mean_normalize(&[4.0, 4.0, 4.0]), Err(Error::ConstantColumn)));
        assert!(mean_normalize(&[1.0]).is_err());
    }

    #[test]
    fn max_normalize_values() {
        assert_eq!(max_normalize(&[2.0, 4.0, 8.0]).unwrap(), vec![0.25, 0.5, 1.0]);
        assert_eq!(max_normalize(&[1.0]).unwrap(), vec![1.0]);
        assert_eq!(max_normalize(&[0.0, 5.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(max_normalize(&[0.0, -1.0]), Err(Error::NonPositiveMax)));
    }

    #[test]
    fn f32_columns() {
        let z = mean_normalize(&[1.0_f32, 2.0, 3.0, 4.0]).unwrap();
        let m: f32 = z.iter().sum::<f32>() / 4.0;
        assert!(m.abs() < 1e-6);
    }
}
