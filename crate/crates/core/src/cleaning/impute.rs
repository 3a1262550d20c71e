use super::table::FeatureTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multiplier applied to the largest observed max supply when filling an
/// absent cap. An absent cap means unlimited issuance, which a mean fill would
/// misrepresent.
pub const MAX_SUPPLY_FILL_FACTOR: f64 = 1000.0;

fn present<T: Scalar>(values: &[Option<T>]) -> Vec<T> {
    values.iter().flatten().copied().collect()
}

/// Replaces absent cells in each named column with the mean of its present
/// cells. Present cells are untouched.
pub fn impute_mean<T: Scalar>(table: &FeatureTable<T>, columns: &[&str]) -> Result<FeatureTable<T>> {
    let mut out = table.clone();
    for &name in columns {
        let col = out.column_mut(name)?;
        let observed = present(col);
        let fill = crate::scalar::mean(&observed).ok_or_else(|| Error::AllAbsent(name.into()))?;
        col.iter_mut().filter(|v| v.is_none()).for_each(|v| *v = Some(fill));
    }
    Ok(out)
}

/// Fills absent cells of `column` with `factor` times the column maximum.
pub fn impute_scaled_max<T: Scalar>(
    table: &FeatureTable<T>,
    column: &str,
    factor: T,
) -> Result<FeatureTable<T>> {
    let mut out = table.clone();
    let col = out.column_mut(column)?;
    let max = col
        .iter()
        .flatten()
        .copied()
        .reduce(T::max)
        .ok_or_else(|| Error::AllAbsent(column.into()))?;
    let fill = max * factor;
    col.iter_mut().filter(|v| v.is_none()).for_each(|v| *v = Some(fill));
    Ok(out)
}

/// Fills absent `max_supply` cells with the column maximum times 1000.
/// Run this before [`impute_mean`] so the fill value never enters a mean.
pub fn impute_max_supply<T: Scalar>(table: &FeatureTable<T>) -> Result<FeatureTable<T>> {
    impute_scaled_max(table, "max_supply", T::lit(MAX_SUPPLY_FILL_FACTOR))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(name: &str, values: Vec<Option<f64>>) -> FeatureTable<f64> {
        let ids = (0..values.len()).map(|i| i.to_string()).collect();
        FeatureTable::new(ids).with_column(name, values).unwrap()
    }

    #[test]
    fn mean_fill() {
        let t = impute_mean(&table("x", vec![Some(1.0), None, Some(3.0)]), &["x"]).unwrap();
        assert_eq!(t.column("x").unwrap(), &[Some(1.0), Some(2.0), Some(3.0)]);
        let t = impute_mean(&table("x", vec![Some(5.0)]), &["x"]).unwrap();
        assert_eq!(t.column("x").unwrap(), &[Some(5.0)]);
        let t = impute_mean(&table("x", vec![Some(1.0), None, None, Some(7.0)]), &["x"]).unwrap();
        assert_eq!(t.dense("x").unwrap(), vec![1.0, 4.0, 4.0, 7.0]);
    }

    #[test]
    fn all_absent_names_column() {
        match impute_mean(&table("vol", vec![None, None]), &["vol"]) {
            Err(Error::AllAbsent(c)) => assert_eq!(c, "vol"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(impute_max_supply(&table("max_supply", vec![None])).is_err());
    }

    #[test]
    fn max_supply_rule() {
        let t = impute_max_supply(&table("max_supply", vec![Some(100.0), None, Some(50.0)])).unwrap();
        assert_eq!(t.dense("max_supply").unwrap(), vec![100.0, 100_000.0, 50.0]);
        let t = impute_max_supply(&table("max_supply", vec![None, Some(1.0)])).unwrap();
        assert_eq!(t.dense("max_supply").unwrap(), vec![1000.0, 1.0]);
        let full = table("max_supply", vec![Some(3.0), Some(4.0)]);
        assert_eq!(impute_max_supply(&full).unwrap(), full);
    }
}
