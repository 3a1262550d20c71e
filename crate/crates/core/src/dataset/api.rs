//! Client for a CoinMarketCap-style historical listings endpoint.
//!
//! Request: `GET {base_url}/v1/cryptocurrency/listings/historical?date=YYYY-MM-DD&start=S&limit=L&convert=USD`
//! with the key in the `X-CMC_PRO_API_KEY` header. Each page holds a `data`
//! array of coin objects; a page shorter than `limit` ends the day. Field
//! mapping (see `tests/fixtures/api_payload.json`):
//!
//! | payload path                 | snapshot field       |
//! |------------------------------|----------------------|
//! | `name`, `symbol`             | key                  |
//! | `max_supply`                 | max_supply           |
//! | `total_supply`               | total_supply         |
//! | `circulating_supply`         | circulating_supply   |
//! | `num_market_pairs`           | num_market_pairs     |
//! | `quote.USD.price`            | price                |
//! | `quote.USD.volume_24h`       | volume_24h           |
//! | `quote.USD.market_cap`       | market_cap           |
//!
//! The keys above are required; `null` maps to absent. The snapshot date is the
//! requested `date`. Bodies of successful responses are cached on disk keyed by
//! endpoint and parameters, so reruns work offline.

use std::fmt;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::key::CoinKey;
use super::snapshot::{CoinSnapshot, Field};
use super::store::Dataset;
use crate::error::{Error, Result};

pub const API_KEY_ENV: &str = "CHAINLENS_API_KEY";
pub const CACHE_DIR_ENV: &str = "CHAINLENS_CACHE_DIR";
pub const HISTORICAL_ENDPOINT: &str = "/v1/cryptocurrency/listings/historical";
const KEY_HEADER: &str = "X-CMC_PRO_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            initial_backoff: Duration::from_millis(500),
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    fn backoff(&self, attempt: u32) -> Duration {
        self.initial_backoff
            .mul_f64(self.multiplier.powi(attempt.saturating_sub(1) as i32))
    }
}

#[derive(Clone)]
pub struct ApiClientConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Requests per second.
    pub rate_limit: f64,
    pub retry: RetryPolicy,
    pub page_size: usize,
    pub cache_dir: Option<PathBuf>,
    pub timeout: Duration,
}

impl fmt::Debug for ApiClientConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApiClientConfig")
            .field("base_url", &self.base_url)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("start", &self.start)
            .field("end", &self.end)
            .field("rate_limit", &self.rate_limit)
            .field("retry", &self.retry)
            .field("page_size", &self.page_size)
            .field("cache_dir", &self.cache_dir)
            .finish()
    }
}

impl ApiClientConfig {
    /// Config with defaults; key and cache directory come from the environment.
    pub fn new(base_url: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Self {
        Self {
            base_url: base_url.into(),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
            start,
            end,
            rate_limit: 1.0,
            retry: RetryPolicy::default(),
            page_size: 5000,
            cache_dir: std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from),
            timeout: Duration::from_secs(30),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.start > self.end {
            return Err(Error::EmptyRange {
                start: self.start,
                end: self.end,
            });
        }
        if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
            return Err(Error::InvalidInput("rate_limit must be positive".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(Error::InvalidInput("retry.max_attempts must be at least 1".into()));
        }
        if self.page_size == 0 {
            return Err(Error::InvalidInput("page_size must be at least 1".into()));
        }
        Ok(())
    }
}

struct Client<'a> {
    config: &'a ApiClientConfig,
    agent: ureq::Agent,
    last_request: Option<Instant>,
}

impl<'a> Client<'a> {
    fn new(config: &'a ApiClientConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        Self {
            config,
            agent,
            last_request: None,
        }
    }

    fn throttle(&mut self) {
        let gap = Duration::from_secs_f64(1.0 / self.config.rate_limit);
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < gap {
                thread::sleep(gap - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }

    fn get(&mut self, endpoint: &str, params: &[(&str, String)]) -> Result<String> {
        let cache_path = self
            .config
            .cache_dir
            .as_deref()
            .map(|dir| dir.join(format!("{}.json", cache_key(endpoint, params))));
        if let Some(path) = &cache_path {
            if let Ok(body) = std::fs::read_to_string(path) {
                return Ok(body);
            }
        }
        let url = format!("{}{}", self.config.base_url.trim_end_matches('/'), endpoint);
        let mut attempt = 0;
        loop {
            attempt += 1;
            self.throttle();
            let mut req = self.agent.get(&url);
            for (k, v) in params {
                req = req.query(*k, v);
            }
            if let Some(key) = &self.config.api_key {
                req = req.header(KEY_HEADER, key);
            }
            let err: Error = match req.call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    match status {
                        200..=299 => {
                            let body = resp
                                .body_mut()
                                .read_to_string()
                                .map_err(|e| Error::Http(e.to_string()))?;
                            if let Some(path) = &cache_path {
                                write_cache(path, &body)?;
                            }
                            return Ok(body);
                        }
                        401 | 403 => return Err(Error::Auth { status }),
                        429 => Error::RateLimitExhausted { attempts: attempt },
                        500..=599 => Error::Http(format!("server error {status}")),
                        _ => return Err(Error::Http(format!("unexpected status {status}"))),
                    }
                }
                Err(e) => Error::Http(e.to_string()),
            };
            if attempt >= self.config.retry.max_attempts {
                return Err(err);
            }
            log::debug!("attempt {attempt} failed ({err}); backing off");
            thread::sleep(self.config.retry.backoff(attempt));
        }
    }
}

fn write_cache(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Cache file stem for a request: hex SHA-256 over the endpoint and the
/// parameters sorted by name.
pub fn cache_key(endpoint: &str, params: &[(&str, String)]) -> String {
    let mut sorted: Vec<_> = params.iter().collect();
    sorted.sort();
    let mut hasher = Sha256::new();
    hasher.update(endpoint.as_bytes());
    for (k, v) in sorted {
        hasher.update(b"\0");
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn required<'v>(obj: &'v Value, path: &[&str]) -> Result<&'v Value> {
    let mut cur = obj;
    for (i, part) in path.iter().enumerate() {
        cur = cur.get(part).ok_or_else(|| Error::SchemaDrift {
            field: path[..=i].join("."),
        })?;
    }
    Ok(cur)
}

fn number(obj: &Value, path: &[&str]) -> Result<Option<f64>> {
    let v = required(obj, path)?;
    if v.is_null() {
        return Ok(None);
    }
    let x = v.as_f64().ok_or_else(|| Error::SchemaDrift {
        field: format!("{} (expected number)", path.join(".")),
    })?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidInput(format!(
            "{} = {x} is not a finite nonnegative number",
            path.join(".")
        )));
    }
    Ok(Some(x))
}

fn optional_number(obj: &Value, field: &str) -> Option<f64> {
    obj.get(field).and_then(Value::as_f64).filter(|x| x.is_finite() && *x >= 0.0)
}

/// Maps one page body to snapshots for `date`.
pub fn parse_page(body: &str, date: NaiveDate) -> Result<Vec<CoinSnapshot>> {
    let root: Value = serde_json::from_str(body)?;
    let data = required(&root, &["data"])?
        .as_array()
        .ok_or_else(|| Error::SchemaDrift {
            field: "data (expected array)".into(),
        })?;
    data.iter().map(|coin| parse_coin(coin, date)).collect()
}

fn parse_coin(coin: &Value, date: NaiveDate) -> Result<CoinSnapshot> {
    let text = |field: &str| -> Result<&str> {
        required(coin, &[field])?.as_str().ok_or_else(|| Error::SchemaDrift {
            field: format!("{field} (expected string)"),
        })
    };
    let key = CoinKey::new(text("name")?, text("symbol")?)?;
    let mut s = CoinSnapshot::empty(key, date);
    s.max_supply = number(coin, &["max_supply"])?;
    s.total_supply = number(coin, &["total_supply"])?;
    s.circulating_supply = number(coin, &["circulating_supply"])?;
    s.num_market_pairs = number(coin, &["num_market_pairs"])?;
    s.price = number(coin, &["quote", "USD", "price"])?;
    s.volume_24h = number(coin, &["quote", "USD", "volume_24h"])?;
    s.market_cap = number(coin, &["quote", "USD", "market_cap"])?;
    for field in Field::EXTENDED {
        s.set(field, optional_number(coin, field.name()));
    }
    Ok(s)
}

/// Pulls every day in the configured range, page by page, and merges the
/// result into one dataset.
pub fn fetch_history(config: &ApiClientConfig) -> Result<Dataset> {
    config.validate()?;
    let mut client = Client::new(config);
    let mut snapshots = Vec::new();
    let mut date = config.start;
    while date <= config.end {
        let mut start = 1usize;
        loop {
            let params = [
                ("date", date.format("%Y-%m-%d").to_string()),
                ("start", start.to_string()),
                ("limit", config.page_size.to_string()),
                ("convert", "USD".to_string()),
            ];
            let body = client.get(HISTORICAL_ENDPOINT, &params)?;
            let page = parse_page(&body, date)?;
            let n = page.len();
            snapshots.extend(page);
            if n < config.page_size {
                break;
            }
            start += config.page_size;
        }
        date = date.succ_opt().expect("date in range");
    }
    Dataset::from_snapshots(snapshots, false)
}
