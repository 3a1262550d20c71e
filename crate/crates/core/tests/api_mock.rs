use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use chainlens::dataset::{fetch_history, ApiClientConfig, RetryPolicy};
use chainlens::Error;
use chrono::NaiveDate;

const PAYLOAD: &str = include_str!("fixtures/api_payload.json");
const EMPTY_PAGE: &str = r#"{"data":[]}"#;

struct Mock {
    url: String,
    requests: Arc<Mutex<Vec<String>>>,
    handle: JoinHandle<()>,
}

impl Mock {
    /// Serves the scripted `(status, body)` responses in order, one per
    /// connection, then stops.
    fn start(script: Vec<(u16, String)>) -> Mock {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&requests);
        let handle = thread::spawn(move || {
            for (status, body) in script {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut head = String::new();
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                        break;
                    }
                    head.push_str(&line);
                }
                log.lock().unwrap().push(head);
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        Mock { url, requests, handle }
    }

    fn finish(self) -> Vec<String> {
        self.handle.join().unwrap();
        Arc::try_unwrap(self.requests).unwrap().into_inner().unwrap()
    }
}

fn day(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn config(url: &str, start: &str, end: &str) -> ApiClientConfig {
    let mut c = ApiClientConfig::new(url, day(start), day(end));
    c.api_key = Some("test-key".into());
    c.cache_dir = None;
    c.rate_limit = 1000.0;
    c.page_size = 2;
    c.timeout = Duration::from_secs(5);
    c.retry = RetryPolicy {
        max_attempts: 3,
        initial_backoff: Duration::from_millis(1),
        multiplier: 2.0,
    };
    c
}

#[test]
fn paginates_and_maps_fields() {
    let mock = Mock::start(vec![(200, PAYLOAD.into()), (200, EMPTY_PAGE.into())]);
    let ds = fetch_history(&config(&mock.url, "2021-01-01", "2021-01-01")).unwrap();
    let requests = mock.finish();
    assert_eq!(requests.len(), 2);
    assert!(requests[0].contains("start=1"));
    assert!(requests[1].contains("start=3"));
    assert!(requests[0].contains("date=2021-01-01"));
    assert!(requests[0].to_ascii_lowercase().contains("x-cmc_pro_api_key: test-key"));
    assert_eq!(ds.len(), 2);
    let eth = ds.rows().find(|s| s.key.as_str() == "Ethereum_ETH").unwrap();
    assert_eq!(eth.max_supply, None);
    assert_eq!(eth.volume_24h, None);
    assert_eq!(eth.price, Some(730.37));
    assert_eq!(eth.date, day("2021-01-01"));
}

#[test]
fn retries_after_rate_limit() {
    let mock = Mock::start(vec![
        (429, "{}".into()),
        (503, "{}".into()),
        (200, EMPTY_PAGE.into()),
    ]);
    let ds = fetch_history(&config(&mock.url, "2021-01-01", "2021-01-01")).unwrap();
    assert_eq!(mock.finish().len(), 3);
    assert!(ds.is_empty());
}

#[test]
fn gives_up_after_max_attempts() {
    let mock = Mock::start(vec![(429, "{}".into()); 3]);
    let err = fetch_history(&config(&mock.url, "2021-01-01", "2021-01-01")).unwrap_err();
    assert_eq!(mock.finish().len(), 3);
    assert!(matches!(err, Error::RateLimitExhausted { attempts: 3 }), "{err:?}");
}

#[test]
fn auth_failure_is_not_retried() {
    let mock = Mock::start(vec![(401, "{}".into())]);
    let err = fetch_history(&config(&mock.url, "2021-01-01", "2021-01-01")).unwrap_err();
    assert_eq!(mock.finish().len(), 1);
    assert!(matches!(err, Error::Auth { status: 401 }));
}

#[test]
fn schema_drift_names_field() {
    let drifted = PAYLOAD.replace("\"num_market_pairs\": 9800,", "");
    let mock = Mock::start(vec![(200, drifted)]);
    let err = fetch_history(&config(&mock.url, "2021-01-01", "2021-01-01")).unwrap_err();
    mock.finish();
    match err {
        Error::SchemaDrift { field } => assert_eq!(field, "num_market_pairs"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cached_responses_skip_the_network() {
    let dir = tempfile::tempdir().unwrap();
    let mock = Mock::start(vec![(200, EMPTY_PAGE.into()), (200, EMPTY_PAGE.into())]);
    let mut cfg = config(&mock.url, "2021-01-01", "2021-01-02");
    cfg.cache_dir = Some(dir.path().to_path_buf());
    fetch_history(&cfg).unwrap();
    assert_eq!(mock.finish().len(), 2);
    // no server is listening now; every page must come from the cache
    let again = fetch_history(&cfg).unwrap();
    assert!(again.is_empty());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}
