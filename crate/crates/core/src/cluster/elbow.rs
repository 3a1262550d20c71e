use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans_fit_with, validate_points, KMeansConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_K_MAX: usize = 30;

/// Chord distances within this of the maximum count as ties; the smallest k
/// among them wins.
pub const ELBOW_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ElbowCurve<T> {
    pub ks: Vec<usize>,
    pub wcss: Vec<T>,
    pub chosen_k: usize,
}

/// Picks the interior k whose point on the curve lies farthest from the chord
/// joining the first and last points, with both axes rescaled to [0, 1].
pub fn choose_elbow<T: Scalar>(ks: &[usize], wcss: &[T]) -> Result<usize> {
    if ks.len() != wcss.len() {
        return Err(Error::LengthMismatch {
            left: ks.len(),
            right: wcss.len(),
        });
    }
    if ks.len() < 3 || ks.windows(2).any(|w| w[0] >= w[1]) {
        let (lo, hi) = (ks.first().copied().unwrap_or(0), ks.last().copied().unwrap_or(0));
        return Err(Error::DegenerateRange(lo, hi));
    }
    let (k0, k1) = (ks[0] as f64, ks[ks.len() - 1] as f64);
    let w: Vec<f64> = wcss.iter().map(|v| v.as_f64()).collect();
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    let wmax = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = wmax - wmin;
    let xs: Vec<f64> = ks.iter().map(|&k| (k as f64 - k0) / (k1 - k0)).collect();
    let ys: Vec<f64> = w
        .iter()
        .map(|&v| if span > 0.0 { (v - wmin) / span } else { 0.0 })
        .collect();
    let (x0, y0) = (xs[0], ys[0]);
    let (x1, y1) = (xs[xs.len() - 1], ys[ys.len() - 1]);
    let norm = ((y1 - y0).powi(2) + (x1 - x0).powi(2)).sqrt();
    let dist: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| ((y1 - y0) * x - (x1 - x0) * y + x1 * y0 - y1 * x0).abs() / norm)
        .collect();
    let interior = 1..ks.len() - 1;
    let best = dist[interior.clone()].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let idx = interior
        .into_iter()
        .find(|&i| dist[i] >= best - ELBOW_TIE_TOLERANCE)
        .expect("interior is nonempty");
    Ok(ks[idx])
}

/// Best-of-restarts WCSS for each k in `k_min..=k_max` and the elbow choice.
pub fn elbow<T: Scalar>(
    points: &[Vec<T>],
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
) -> Result<ElbowCurve<T>> {
    validate_points(points)?;
    if k_min == 0 || k_max < k_min + 2 {
        return Err(Error::DegenerateRange(k_min, k_max));
    }
    if k_max > points.len() {
        return Err(Error::TooFewPoints {
            needed: k_max,
            got: points.len(),
        });
    }
    let config = KMeansConfig {
        restarts,
        ..KMeansConfig::default()
    };
    let ks: Vec<usize> = (k_min..=k_max).collect();
    let wcss = ks
        .iter()
        .map(|&k| kmeans_fit_with(points, k, seed, &config).map(|m| m.wcss))
        .collect::<Result<Vec<T>>>()?;
    let chosen_k = choose_elbow(&ks, &wcss)?;
    Ok(ElbowCurve { ks, wcss, chosen_k })
}

impl<T: Scalar> ElbowCurve<T> {
    pub const CSV_HEADER: [&'static str; 2] = ["k", "wcss"];

    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(Self::CSV_HEADER)?;
        for (k, w) in self.ks.iter().zip(&self.wcss) {
            wtr.write_record([k.to_string(), w.to_string()])?;
        }
        crate::error::finish_csv(wtr)
    }

    /// Reads `k,wcss` rows and re-applies the elbow rule.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let (mut ks, mut wcss) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let bad = |s: &str| Error::InvalidInput(format!("bad elbow row value `{s}`"));
            ks.push(rec[0].parse::<usize>().map_err(|_| bad(&rec[0]))?);
            wcss.push(T::lit(rec[1].parse::<f64>().map_err(|_| bad(&rec[1]))?));
        }
        let chosen_k = choose_elbow(&ks, &wcss)?;
        Ok(Self { ks, wcss, chosen_k })
    }
}
