//! Loading, persisting and indexing per-day coin snapshots.

pub mod api;
mod csv_io;
mod key;
mod snapshot;
mod store;

pub use api::{fetch_history, ApiClientConfig, RetryPolicy};
pub use csv_io::{load_csv, parse_day, read_csv, save_csv, to_csv_string, write_csv, CsvSchema};
pub use key::{coin_key, CoinKey};
pub use snapshot::{CoinSnapshot, Field};
pub use store::{snapshot_at, Dataset};
