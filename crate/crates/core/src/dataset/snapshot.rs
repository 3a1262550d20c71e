use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::key::CoinKey;

/// Raw numeric fields carried by a snapshot row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Price,
    MaxSupply,
    TotalSupply,
    CirculatingSupply,
    Volume24h,
    MarketCap,
    NumMarketPairs,
    TotalValueLocked,
    StakingReward,
    TotalStakingPercentage,
    WhalesPercentage,
}

impl Field {
    /// Columns of the historical feed, in CSV order.
    pub const BASE: [Field; 7] = [
        Field::Price,
        Field::MaxSupply,
        Field::TotalSupply,
        Field::CirculatingSupply,
        Field::Volume24h,
        Field::MarketCap,
        Field::NumMarketPairs,
    ];

    /// Optional columns not present in the historical feed.
    pub const EXTENDED: [Field; 4] = [
        Field::TotalValueLocked,
        Field::StakingReward,
        Field::TotalStakingPercentage,
        Field::WhalesPercentage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Price => "price",
            Field::MaxSupply => "max_supply",
            Field::TotalSupply => "total_supply",
            Field::CirculatingSupply => "circulating_supply",
            Field::Volume24h => "volume_24h",
            Field::MarketCap => "market_cap",
            Field::NumMarketPairs => "num_market_pairs",
            Field::TotalValueLocked => "total_value_locked",
            Field::StakingReward => "staking_reward",
            Field::TotalStakingPercentage => "total_staking_percentage",
            Field::WhalesPercentage => "whales_percentage",
        }
    }

    pub fn is_extended(self) -> bool {
        Self::EXTENDED.contains(&self)
    }
}

/// One coin's on-chain parameters on one UTC day. Absent values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinSnapshot {
    pub key: CoinKey,
    pub date: NaiveDate,
    pub price: Option<f64>,
    /// `None` means no issuance cap.
    pub max_supply: Option<f64>,
    pub total_supply: Option<f64>,
    pub circulating_supply: Option<f64>,
    pub volume_24h: Option<f64>,
    pub market_cap: Option<f64>,
    pub num_market_pairs: Option<f64>,
    #[serde(default)]
    pub total_value_locked: Option<f64>,
    #[serde(default)]
    pub staking_reward: Option<f64>,
    #[serde(default)]
    pub total_staking_percentage: Option<f64>,
    #[serde(default)]
    pub whales_percentage: Option<f64>,
}

impl CoinSnapshot {
    /// A snapshot with every numeric field absent.
    pub fn empty(key: CoinKey, date: NaiveDate) -> Self {
        Self {
            key,
            date,
            price: None,
            max_supply: None,
            total_supply: None,
            circulating_supply: None,
            volume_24h: None,
            market_cap: None,
            num_market_pairs: None,
            total_value_locked: None,
            staking_reward: None,
            total_staking_percentage: None,
            whales_percentage: None,
        }
    }

    pub fn get(&self, field: Field) -> Option<f64> {
        match field {
            Field::Price => self.price,
            Field::MaxSupply => self.max_supply,
            Field::TotalSupply => self.total_supply,
            Field::CirculatingSupply => self.circulating_supply,
            Field::Volume24h => self.volume_24h,
            Field::MarketCap => self.market_cap,
            Field::NumMarketPairs => self.num_market_pairs,
            Field::TotalValueLocked => self.total_value_locked,
            Field::StakingReward => self.staking_reward,
            Field::TotalStakingPercentage => self.total_staking_percentage,
            Field::WhalesPercentage => self.whales_percentage,
        }
    }

    pub fn set(&mut self, field: Field, value: Option<f64>) {
        let slot = match field {
            Field::Price => &mut self.price,
            Field::MaxSupply => &mut self.max_supply,
            Field::TotalSupply => &mut self.total_supply,
            Field::CirculatingSupply => &mut self.circulating_supply,
            Field::Volume24h => &mut self.volume_24h,
            Field::MarketCap => &mut self.market_cap,
            Field::NumMarketPairs => &mut self.num_market_pairs,
            Field::TotalValueLocked => &mut self.total_value_locked,
            Field::StakingReward => &mut self.staking_reward,
            Field::TotalStakingPercentage => &mut self.total_staking_percentage,
            Field::WhalesPercentage => &mut self.whales_percentage,
        };
        *slot = value;
    }

    pub fn has_extended(&self) -> bool {
        Field::EXTENDED.iter().any(|&f| self.get(f).is_some())
    }

    /// Circulating supply above total supply. Real feeds contain these rows,
    /// so they are flagged rather than rejected.
    pub fn circulating_exceeds_total(&self) -> bool {
        matches!(
            (self.circulating_supply, self.total_supply),
            (Some(c), Some(t)) if c > t
        )
    }
}
