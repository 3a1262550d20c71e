use serde::Serialize;

use crate::scalar::Scalar;

/// Price times circulating supply; absent if either input is.
pub fn derive_market_cap<T: Scalar>(price: Option<T>, circulating_supply: Option<T>) -> Option<T> {
    Some(price? * circulating_supply?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PtscQuality {
    Ok,
    MissingInput,
    /// Total supply is zero; the ratio is undefined.
    ZeroTotal,
    /// Circulating supply exceeds total supply. The value is kept.
    AboveOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ptsc<T> {
    pub value: Option<T>,
    pub quality: PtscQuality,
}

/// Share of the total supply that circulates.
pub fn derive_ptsc<T: Scalar>(circulating_supply: Option<T>, total_supply: Option<T>) -> Ptsc<T> {
    match (circulating_supply, total_supply) {
        (Some(c), Some(t)) if t > T::zero() => {
            let value = c / t;
            let quality = if value > T::one() {
                PtscQuality::AboveOne
            } else {
                PtscQuality::Ok
            };
            Ptsc {
                value: Some(value),
                quality,
            }
        }
        (Some(_), Some(_)) => Ptsc {
            value: None,
            quality: PtscQuality::ZeroTotal,
        },
        _ => Ptsc {
            value: None,
            quality: PtscQuality::MissingInput,
        },
    }
}
