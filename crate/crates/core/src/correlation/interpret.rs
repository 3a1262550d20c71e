use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    VeryWeak,
    Weak,
    Medium,
    Strong,
    VeryStrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Positive,
    Negative,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub strength: Strength,
    pub direction: Direction,
}

impl Strength {
    pub fn as_str(self) -> &'static str {
        match self {
            Strength::VeryWeak => "very weak",
            Strength::Weak => "weak",
            Strength::Medium => "medium",
            Strength::Strong => "strong",
            Strength::VeryStrong => "very strong",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Positive => write!(f, "{} (positive)", self.strength.as_str()),
            Direction::Negative => write!(f, "{} (negative)", self.strength.as_str()),
            Direction::None => f.write_str(self.strength.as_str()),
        }
    }
}

/// Bands on |c|, closed-open: [0, .2) very weak, [.2, .4) weak,
/// [.4, .6) medium, [.6, .8) strong, [.8, 1] very strong.
pub fn interpret<T: Scalar>(coefficient: T) -> Result<Interpretation> {
    let c = coefficient.as_f64();
    if !c.is_finite() || !(-1.0..=1.0).contains(&c) {
        return Err(Error::InvalidInput(format!("coefficient {c} outside [-1, 1]")));
    }
    let a = c.abs();
    let strength = if a < 0.20 {
        Strength::VeryWeak
    } else if a < 0.40 {
        Strength::Weak
    } else if a < 0.60 {
        Strength::Medium
    } else if a < 0.80 {
        Strength::Strong
    } else {
        Strength::VeryStrong
    };
    let direction = if c > 0.0 {
        Direction::Positive
    } else if c < 0.0 {
        Direction::Negative
    } else {
        Direction::None
    };
    Ok(Interpretation {
        strength,
        direction,
    })
}
