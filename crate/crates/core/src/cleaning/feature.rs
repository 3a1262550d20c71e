use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::derive::{derive_market_cap, derive_ptsc};
use crate::dataset::CoinSnapshot;
use crate::error::Error;

/// Analysis column: a raw snapshot field or a derived quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Price,
    MaxSupply,
    TotalSupply,
    CirculatingSupply,
    Volume24h,
    MarketCap,
    NumMarketPairs,
    /// Circulating over total supply.
    Ptsc,
    TotalValueLocked,
    StakingReward,
    TotalStakingPercentage,
    WhalesPercentage,
}

impl Feature {
    pub const ALL: [Feature; 12] = [
        Feature::Price,
        Feature::MaxSupply,
        Feature::TotalSupply,
        Feature::CirculatingSupply,
        Feature::Volume24h,
        Feature::MarketCap,
        Feature::NumMarketPairs,
        Feature::Ptsc,
        Feature::TotalValueLocked,
        Feature::StakingReward,
        Feature::TotalStakingPercentage,
        Feature::WhalesPercentage,
    ];

    /// Inputs of the risk classifiers.
    pub const CLASSIFIER: [Feature; 7] = [
        Feature::Price,
        Feature::MaxSupply,
        Feature::TotalSupply,
        Feature::CirculatingSupply,
        Feature::Volume24h,
        Feature::MarketCap,
        Feature::Ptsc,
    ];

    /// Columns of the daily clustering snapshot.
    pub const CLUSTER: [Feature; 8] = [
        Feature::MarketCap,
        Feature::Volume24h,
        Feature::NumMarketPairs,
        Feature::Ptsc,
        Feature::TotalValueLocked,
        Feature::StakingReward,
        Feature::TotalStakingPercentage,
        Feature::WhalesPercentage,
    ];

    /// Parameters correlated against price row by row.
    pub const PRICE_FACTORS: [Feature; 5] = [
        Feature::MaxSupply,
        Feature::TotalSupply,
        Feature::CirculatingSupply,
        Feature::Volume24h,
        Feature::Ptsc,
    ];

    /// Columns summarized per coin by mean and standard deviation.
    pub const AGGREGATED: [Feature; 5] = [
        Feature::Price,
        Feature::MaxSupply,
        Feature::TotalSupply,
        Feature::Volume24h,
        Feature::Ptsc,
    ];

    /// Supply/market matrix variables.
    pub const SUPPLY_MATRIX: [Feature; 6] = [
        Feature::MaxSupply,
        Feature::TotalSupply,
        Feature::CirculatingSupply,
        Feature::Volume24h,
        Feature::MarketCap,
        Feature::NumMarketPairs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Price => "price",
            Feature::MaxSupply => "max_supply",
            Feature::TotalSupply => "total_supply",
            Feature::CirculatingSupply => "circulating_supply",
            Feature::Volume24h => "volume_24h",
            Feature::MarketCap => "market_cap",
            Feature::NumMarketPairs => "num_market_pairs",
            Feature::Ptsc => "ptsc",
            Feature::TotalValueLocked => "total_value_locked",
            Feature::StakingReward => "staking_reward",
            Feature::TotalStakingPercentage => "total_staking_percentage",
            Feature::WhalesPercentage => "whales_percentage",
        }
    }

    /// Value for one snapshot. Market cap falls back to price times
    /// circulating supply when the feed left it empty.
    pub fn extract(self, s: &CoinSnapshot) -> Option<f64> {
        match self {
            Feature::Price => s.price,
            Feature::MaxSupply => s.max_supply,
            Feature::TotalSupply => s.total_supply,
            Feature::CirculatingSupply => s.circulating_supply,
            Feature::Volume24h => s.volume_24h,
            Feature::MarketCap => s
                .market_cap
                .or_else(|| derive_market_cap(s.price, s.circulating_supply)),
            Feature::NumMarketPairs => s.num_market_pairs,
            Feature::Ptsc => derive_ptsc(s.circulating_supply, s.total_supply).value,
            Feature::TotalValueLocked => s.total_value_locked,
            Feature::StakingReward => s.staking_reward,
            Feature::TotalStakingPercentage => s.total_staking_percentage,
            Feature::WhalesPercentage => s.whales_percentage,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown feature `{s}`")))
    }
}
