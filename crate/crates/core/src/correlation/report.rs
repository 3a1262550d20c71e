use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use super::{correlate, interpret, pairwise_complete, CorrelationMethod, Interpretation};
use crate::cleaning::{aggregate_stats, Feature, FeatureTable};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric coefficient matrix with per-cell effective sample size and
/// interpretation. Undefined cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CorrelationReport<T> {
    pub method: CorrelationMethod,
    pub variables: Vec<String>,
    pub coefficients: Vec<Vec<Option<T>>>,
    pub sample_sizes: Vec<Vec<usize>>,
    pub labels: Vec<Vec<Option<Interpretation>>>,
}

impl<T: Scalar> CorrelationReport<T> {
    fn index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<T> {
        self.coefficients[self.index(a)?][self.index(b)?]
    }

    pub fn sample_size(&self, a: &str, b: &str) -> Option<usize> {
        Some(self.sample_sizes[self.index(a)?][self.index(b)?])
    }

    pub const CSV_HEADER: [&'static str; 6] = ["var_a", "var_b", "method", "coefficient", "n", "label"];

    /// Appends the upper triangle (`var_a` before `var_b`) to a CSV writer.
    pub fn write_csv_rows<W: std::io::Write>(&self, wtr: &mut csv::Writer<W>) -> Result<()> {
        let k = self.variables.len();
        for i in 0..k {
            for j in i + 1..k {
                let (coef, label) = match (self.coefficients[i][j], self.labels[i][j]) {
                    (Some(c), Some(l)) => (c.to_string(), l.to_string()),
                    _ => (String::new(), "undefined".to_string()),
                };
                wtr.write_record([
                    self.variables[i].as_str(),
                    self.variables[j].as_str(),
                    self.method.as_str(),
                    coef.as_str(),
                    &self.sample_sizes[i][j].to_string(),
                    label.as_str(),
                ])?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        reports_to_csv(std::slice::from_ref(self))
    }
}

/// CSV with one header over several reports.
pub fn reports_to_csv<T: Scalar>(reports: &[CorrelationReport<T>]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(CorrelationReport::<T>::CSV_HEADER)?;
    for r in reports {
        r.write_csv_rows(&mut wtr)?;
    }
    crate::error::finish_csv(wtr)
}

/// All pairwise coefficients between `columns`, each cell over the rows where
/// both columns are present. Cells run in parallel; the result does not
/// depend on scheduling.
pub fn correlation_matrix<T: Scalar>(
    method: CorrelationMethod,
    table: &FeatureTable<T>,
    columns: &[&str],
) -> Result<CorrelationReport<T>> {
    if columns.len() < 2 {
        return Err(Error::InvalidInput("correlation matrix needs at least 2 columns".into()));
    }
    let data = columns
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<Vec<_>>>()?;
    let k = columns.len();
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let results: Vec<((usize, usize), Option<T>, usize)> = cells
        .into_par_iter()
        .map(|(i, j)| {
            let n = pairwise_complete(data[i], data[j]).map(|(x, _)| x.len()).unwrap_or(0);
            let value = correlate(method, data[i], data[j]).ok();
            // exact unit diagonal wherever the variable is nonconstant
            let value = if i == j { value.map(|_| T::one()) } else { value };
            ((i, j), value, n)
        })
        .collect();
    let mut coefficients = vec![vec![None; k]; k];
    let mut sample_sizes = vec![vec![0; k]; k];
    let mut labels = vec![vec![None; k]; k];
    for ((i, j), value, n) in results {
        let label = value.and_then(|v| interpret(v).ok());
        for (a, b) in [(i, j), (j, i)] {
            coefficients[a][b] = value;
            sample_sizes[a][b] = n;
            labels[a][b] = label;
        }
    }
    Ok(CorrelationReport {
        method,
        variables: columns.iter().map(|c| c.to_string()).collect(),
        coefficients,
        sample_sizes,
        labels,
    })
}

/// The three families of price correlations for one date range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceFactorReport {
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Row-level: price and its factors pooled over every coin-day.
    pub pooled: Vec<CorrelationReport<f64>>,
    /// Coin-level: per-coin means and standard deviations.
    pub aggregate: Vec<CorrelationReport<f64>>,
    /// Row-level: supply, volume, market cap and market pairs.
    pub supply_matrix: Vec<CorrelationReport<f64>>,
}

pub fn price_factor_report(
    dataset: &Dataset,
    start: NaiveDate,
    end: NaiveDate,
    methods: &[CorrelationMethod],
) -> Result<PriceFactorReport> {
    let window = dataset.restrict(start, end)?;

    let mut pooled_features = vec![Feature::Price];
    pooled_features.extend(Feature::PRICE_FACTORS);
    let pooled_table = FeatureTable::from_dataset(&window, &pooled_features);
    let pooled_cols: Vec<&str> = pooled_features.iter().map(|f| f.name()).collect();

    let aggregates = aggregate_stats(&window, start, end)?;
    let row_ids = aggregates.keys().map(|k| k.to_string()).collect();
    let mut agg_table = FeatureTable::new(row_ids);
    let mut agg_cols = Vec::new();
    for f in Feature::AGGREGATED {
        let means = aggregates.values().map(|a| a.mean(f)).collect();
        let stds = aggregates.values().map(|a| a.std(f)).collect();
        agg_table.insert_column(format!("mean_{}", f.name()), means)?;
        agg_table.insert_column(format!("std_{}", f.name()), stds)?;
        agg_cols.push(format!("mean_{}", f.name()));
        agg_cols.push(format!("std_{}", f.name()));
    }
    let agg_cols: Vec<&str> = agg_cols.iter().map(String::as_str).collect();

    let supply_table = FeatureTable::from_dataset(&window, &Feature::SUPPLY_MATRIX);
    let supply_cols: Vec<&str> = Feature::SUPPLY_MATRIX.iter().map(|f| f.name()).collect();

    let mut report = PriceFactorReport {
        start,
        end,
        pooled: Vec::new(),
        aggregate: Vec::new(),
        supply_matrix: Vec::new(),
    };
    for &m in methods {
        report.pooled.push(correlation_matrix(m, &pooled_table, &pooled_cols)?);
        report.aggregate.push(correlation_matrix(m, &agg_table, &agg_cols)?);
        report.supply_matrix.push(correlation_matrix(m, &supply_table, &supply_cols)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::correlate_dense;

    fn table() -> FeatureTable<f64> {
        let ids = (0..6).map(|i| i.to_string()).collect();
        FeatureTable::new(ids)
            .with_column("a", vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0), Some(5.0), Some(6.0)])
            .unwrap()
            .with_column("b", vec![Some(2.0), Some(1.0), None, Some(8.0), Some(5.0), Some(7.0)])
            .unwrap()
            .with_column("c", vec![Some(9.0), Some(9.0), Some(1.0), Some(2.0), Some(2.0), Some(0.5)])
            .unwrap()
            .with_column("k", vec![Some(3.0); 6])
            .unwrap()
    }

    #[test]
    fn matrix_matches_scalar_calls() {
        let t = table();
        for m in CorrelationMethod::ALL {
            let r = correlation_matrix(m, &t, &["a", "b", "c"]).unwrap();
            for x in ["a", "b", "c"] {
                assert_eq!(r.get(x, x), Some(1.0));
                for y in ["a", "b", "c"] {
                    if x == y {
                        continue;
                    }
                    let direct = correlate(m, t.column(x).unwrap(), t.column(y).unwrap()).unwrap();
                    assert_eq!(r.get(x, y), Some(direct));
                    assert_eq!(r.get(x, y), r.get(y, x));
                }
            }
            assert_eq!(r.sample_size("a", "b"), Some(5));
            assert_eq!(r.sample_size("a", "c"), Some(6));
        }
    }

    #[test]
    fn constant_column_cells_are_absent() {
        let r = correlation_matrix(CorrelationMethod::Pearson, &table(), &["a", "k"]).unwrap();
        assert_eq!(r.get("k", "k"), None);
        assert_eq!(r.get("a", "k"), None);
        let csv = r.to_csv().unwrap();
        assert!(csv.contains("a,k,pearson,,6,undefined"));
    }

    #[test]
    fn duplicated_column_is_one() {
        let x: Vec<f64> = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let t = FeatureTable::new((0..6).map(|i| i.to_string()).collect())
            .with_column("x", x.iter().copied().map(Some).collect())
            .unwrap()
            .with_column("x2", x.iter().copied().map(Some).collect())
            .unwrap();
        for m in CorrelationMethod::ALL {
            let r = correlation_matrix(m, &t, &["x", "x2"]).unwrap();
            let v = r.get("x", "x2").unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{m}: {v}");
            assert!((correlate_dense(m, &x, &x).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn needs_two_columns() {
        assert!(correlation_matrix(CorrelationMethod::Pearson, &table(), &["a"]).is_err());
    }
}
