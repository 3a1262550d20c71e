use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies one coin series as `name_symbol`.
///
/// Several listed coins share a name or a symbol, never both, so the pair is
/// the series identity. Name and symbol are trimmed before joining.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "KeyParts", into = "KeyParts")]
pub struct CoinKey {
    value: String,
    name_len: usize,
}

impl CoinKey {
    pub fn new(name: &str, symbol: &str) -> Result<Self> {
        let name = name.trim();
        let symbol = symbol.trim();
        if name.is_empty() {
            return Err(Error::InvalidInput("coin name is empty".into()));
        }
        if symbol.is_empty() {
            return Err(Error::InvalidInput("coin symbol is empty".into()));
        }
        Ok(Self {
            value: format!("{name}_{symbol}"),
            name_len: name.len(),
        })
    }

    pub fn as_str(&self) -> &str {
        &self.value
    }

    pub fn name(&self) -> &str {
        &self.value[..self.name_len]
    }

    pub fn symbol(&self) -> &str {
        &self.value[self.name_len + 1..]
    }
}

/// Builds the `name_symbol` key for a coin.
pub fn coin_key(name: &str, symbol: &str) -> Result<CoinKey> {
    CoinKey::new(name, symbol)
}

impl fmt::Display for CoinKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

#[derive(Serialize, Deserialize)]
struct KeyParts {
    name: String,
    symbol: String,
}

impl TryFrom<KeyParts> for CoinKey {
    type Error = Error;

    fn try_from(p: KeyParts) -> Result<Self> {
        CoinKey::new(&p.name, &p.symbol)
    }
}

impl From<CoinKey> for KeyParts {
    fn from(k: CoinKey) -> Self {
        KeyParts {
            name: k.name().to_string(),
            symbol: k.symbol().to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joins_with_underscore() {
        assert_eq!(coin_key("Bitcoin", "BTC").unwrap().as_str(), "Bitcoin_BTC");
        assert_eq!(coin_key("A", "A").unwrap().as_str(), "A_A");
    }

    #[test]
    fn trims_before_joining() {
        let k = coin_key(" Wabi ", "WABI").unwrap();
        assert_eq!(k.as_str(), "Wabi_WABI");
        assert_eq!(k.name(), "Wabi");
        assert_eq!(k.symbol(), "WABI");
    }

    #[test]
    fn rejects_empty_parts() {
        assert!(coin_key("", "BTC").is_err());
        assert!(coin_key("Bitcoin", "   ").is_err());
    }

    #[test]
    fn name_with_underscore_keeps_parts() {
        let k = coin_key("wrapped_eth", "WETH").unwrap();
        assert_eq!(k.name(), "wrapped_eth");
        assert_eq!(k.symbol(), "WETH");
        let json = serde_json::to_string(&k).unwrap();
        let back: CoinKey = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
    }
}
