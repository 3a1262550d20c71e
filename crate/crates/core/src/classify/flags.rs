use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cleaning::{derive_ptsc, AggregateFeatures, Feature, PtscQuality};
use crate::dataset::CoinSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlagThresholds {
    /// Circulating share of total supply below which a coin is flagged.
    pub low_ptsc: f64,
    /// Volume standard deviation over mean above which a coin is flagged.
    pub volume_cv: f64,
}

impl Default for FlagThresholds {
    fn default() -> Self {
        Self {
            low_ptsc: 0.5,
            volume_cv: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flag", rename_all = "snake_case")]
pub enum ManipulabilityFlag {
    /// No maximum supply cap.
    UnlimitedIssuance,
    LowCirculation { ptsc: f64 },
    VolatileVolume { ratio: f64 },
    /// The named input was missing or degenerate.
    InsufficientData { feature: Feature },
}

impl ManipulabilityFlag {
    pub fn name(&self) -> &'static str {
        match self {
            ManipulabilityFlag::UnlimitedIssuance => "unlimited_issuance",
            ManipulabilityFlag::LowCirculation { .. } => "low_circulation",
            ManipulabilityFlag::VolatileVolume { .. } => "volatile_volume",
            ManipulabilityFlag::InsufficientData { .. } => "insufficient_data",
        }
    }
}

impl fmt::Display for ManipulabilityFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManipulabilityFlag::InsufficientData { feature } => write!(f, "insufficient_data({feature})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Supply and volume warning signs for one coin. `stats` should cover the
/// coin's own history.
pub fn manipulability_flags(
    snapshot: &CoinSnapshot,
    stats: &AggregateFeatures,
    thresholds: &FlagThresholds,
) -> Vec<ManipulabilityFlag> {
    let mut flags = Vec::new();
    if snapshot.max_supply.is_none() {
        flags.push(ManipulabilityFlag::UnlimitedIssuance);
    }
    let ptsc = derive_ptsc(snapshot.circulating_supply, snapshot.total_supply);
    match (ptsc.value, ptsc.quality) {
        (Some(v), PtscQuality::Ok | PtscQuality::AboveOne) => {
            if v < thresholds.low_ptsc {
                flags.push(ManipulabilityFlag::LowCirculation { ptsc: v });
            }
        }
        _ => flags.push(ManipulabilityFlag::InsufficientData { feature: Feature::Ptsc }),
    }
    match stats.get(Feature::Volume24h) {
        Some(s) if s.mean > 0.0 => {
            let ratio = s.std / s.mean;
            if ratio > thresholds.volume_cv {
                flags.push(ManipulabilityFlag::VolatileVolume { ratio });
            }
        }
        _ => flags.push(ManipulabilityFlag::InsufficientData {
            feature: Feature::Volume24h,
        }),
    }
    flags
}
