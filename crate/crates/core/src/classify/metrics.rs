use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Confusion counts with risky (label 1) as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn from_labels(predicted: &[u8], truth: &[u8]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: predicted.len(),
                right: truth.len(),
            });
        }
        let mut c = ConfusionCounts::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (1, 1) => c.tp += 1,
                (0, 0) => c.tn += 1,
                (1, 0) => c.fp += 1,
                (0, 1) => c.fn_ += 1,
                _ => return Err(Error::InvalidInput(format!("labels must be 0 or 1, got ({p}, {t})"))),
            }
        }
        Ok(c)
    }

    /// Precision, recall, F1 and accuracy. A zero denominator yields 0 for
    /// that metric and sets `zero_division`.
    pub fn metrics(&self) -> Result<EvalMetrics> {
        let total = self.total();
        if total == 0 {
            return Err(Error::InvalidInput("no rows to evaluate".into()));
        }
        let mut zero_division = false;
        let mut ratio = |num: u64, den: u64| {
            if den == 0 {
                zero_division = true;
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let accuracy = ratio(self.tp + self.tn, total);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            zero_division = true;
            0.0
        };
        Ok(EvalMetrics {
            precision,
            recall,
            f1,
            accuracy,
            zero_division,
            counts: *self,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Some metric had a zero denominator and was reported as 0.
    pub zero_division: bool,
    pub counts: ConfusionCounts,
}

pub fn evaluate(predicted: &[u8], truth: &[u8]) -> Result<EvalMetrics> {
    ConfusionCounts::from_labels(predicted, truth)?.metrics()
}

pub const METRICS_CSV_HEADER: [&str; 5] = ["classifier", "precision", "recall", "f1", "accuracy"];

pub fn metrics_to_csv(rows: &[(String, EvalMetrics)]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(METRICS_CSV_HEADER)?;
    for (name, m) in rows {
        wtr.write_record([
            name.clone(),
            m.precision.to_string(),
            m.recall.to_string(),
            m.f1.to_string(),
            m.accuracy.to_string(),
        ])?;
    }
    crate::error::finish_csv(wtr)
}

/// Parses a metrics CSV back into `(classifier, [precision, recall, f1, accuracy])`.
pub fn metrics_from_csv(text: &str) -> Result<Vec<(String, [f64; 4])>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut vals = [0.0; 4];
        for (i, v) in vals.iter_mut().enumerate() {
            let cell = rec.get(i + 1).unwrap_or("");
            *v = cell
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad metric value `{cell}`")))?;
        }
        out.push((rec[0].to_string(), vals));
    }
    Ok(out)
}
