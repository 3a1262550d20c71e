use indexmap::IndexMap;

use super::feature::Feature;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Named numeric columns over a shared list of row ids. `None` marks an
/// absent cell, so the presence mask is carried by the values themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    row_ids: Vec<String>,
    columns: IndexMap<String, Vec<Option<T>>>,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn new(row_ids: Vec<String>) -> Self {
        Self {
            row_ids,
            columns: IndexMap::new(),
        }
    }

    pub fn with_column(mut self, name: impl Into<String>, values: Vec<Option<T>>) -> Result<Self> {
        self.insert_column(name, values)?;
        Ok(self)
    }

    pub fn insert_column(&mut self, name: impl Into<String>, values: Vec<Option<T>>) -> Result<()> {
        if values.len() != self.row_ids.len() {
            return Err(Error::LengthMismatch {
                left: self.row_ids.len(),
                right: values.len(),
            });
        }
        self.columns.insert(name.into(), values);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.row_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn column(&self, name: &str) -> Result<&[Option<T>]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidInput(format!("no column `{name}`")))
    }

    pub(crate) fn column_mut(&mut self, name: &str) -> Result<&mut Vec<Option<T>>> {
        self.columns
            .get_mut(name)
            .ok_or_else(|| Error::InvalidInput(format!("no column `{name}`")))
    }

    pub fn presence_mask(&self, name: &str) -> Result<Vec<bool>> {
        Ok(self.column(name)?.iter().map(Option::is_some).collect())
    }

    /// The column as plain values; errors if any cell is absent.
    pub fn dense(&self, name: &str) -> Result<Vec<T>> {
        self.column(name)?
            .iter()
            .map(|v| v.ok_or_else(|| Error::InvalidInput(format!("column `{name}` has absent cells"))))
            .collect()
    }

    /// Row-major matrix over `names`; errors if any cell is absent.
    pub fn dense_rows(&self, names: &[&str]) -> Result<Vec<Vec<T>>> {
        let cols = names
            .iter()
            .map(|n| self.dense(n))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.len())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect())
    }
}

impl FeatureTable<f64> {
    /// One row per snapshot (`key@date`), one column per feature.
    pub fn from_dataset(dataset: &Dataset, features: &[Feature]) -> Self {
        let row_ids = dataset
            .rows()
            .map(|s| format!("{}@{}", s.key, s.date))
            .collect();
        let mut table = FeatureTable::new(row_ids);
        for &f in features {
            let values = dataset.rows().map(|s| f.extract(s)).collect();
            table
                .insert_column(f.name(), values)
                .expect("column length equals row count");
        }
        table
    }
}
