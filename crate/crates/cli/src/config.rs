//! Run configuration: a TOML file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chainlens::classify::{ClassifierKind, ClassifierSpec, FlagThresholds, SplitMode};
use chainlens::correlation::CorrelationMethod;
use chainlens::synthetic::SyntheticSpec;
use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(format!("expected a positive integer or `auto`, got `{s}`")),
        }
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KChoice::Auto => s.serialize_str("auto"),
            KChoice::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(k) if k >= 1 => Ok(KChoice::Fixed(k as usize)),
            Repr::Num(k) => Err(serde::de::Error::custom(format!("k must be at least 1, got {k}"))),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiSettings {
    pub base_url: Option<String>,
    /// Falls back to the top-level `start` / `end`.
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub rate_limit: f64,
    pub page_size: usize,
    pub max_attempts: u32,
}

impl Default for ApiSettings {
    fn default() -> Self {
        Self {
            base_url: None,
            start: None,
            end: None,
            rate_limit: 1.0,
            page_size: 5000,
            max_attempts: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Snapshot CSV; defaults to `<out>/dataset.csv`.
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Defaults to the last day in the dataset.
    pub cutoff: Option<NaiveDate>,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub methods: Vec<CorrelationMethod>,
    pub k: KChoice,
    pub k_max: usize,
    pub restarts: usize,
    /// Snapshot day for clustering; defaults to the cutoff.
    pub cluster_date: Option<NaiveDate>,
    pub classifiers: Vec<ClassifierSpec>,
    pub split: f64,
    pub split_mode: SplitMode,
    pub formats: Vec<Format>,
    pub bucket_width_days: i64,
    pub flags: FlagThresholds,
    pub api: ApiSettings,
    pub synthetic: SyntheticSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out: PathBuf::from("out"),
            seed: 0,
            cutoff: None,
            start: None,
            end: None,
            methods: CorrelationMethod::ALL.to_vec(),
            k: KChoice::Auto,
            k_max: chainlens::cluster::DEFAULT_K_MAX,
            restarts: chainlens::cluster::DEFAULT_RESTARTS,
            cluster_date: None,
            classifiers: ClassifierKind::ALL.iter().map(|k| k.default_spec()).collect(),
            split: 0.8,
            split_mode: SplitMode::Row,
            formats: Format::ALL.to_vec(),
            bucket_width_days: chainlens::survival::DEFAULT_BUCKET_WIDTH_DAYS,
            flags: FlagThresholds::default(),
            api: ApiSettings::default(),
            synthetic: SyntheticSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, UsageError> {
        toml::from_str(text).map_err(|e| UsageError(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let fail = |m: String| Err(UsageError(m));
        if !(self.split > 0.0 && self.split < 1.0) {
            return fail(format!("split must be in (0, 1), got {}", self.split));
        }
        if self.methods.is_empty() {
            return fail("no correlation methods selected".into());
        }
        if self.classifiers.is_empty() {
            return fail("no classifiers selected".into());
        }
        if self.formats.is_empty() {
            return fail("no output formats selected".into());
        }
        if self.k_max < 1 || self.restarts < 1 {
            return fail("k_max and restarts must be at least 1".into());
        }
        if self.bucket_width_days < 1 {
            return fail("bucket_width_days must be at least 1".into());
        }
        if let (Some(a), Some(b)) = (self.start, self.end) {
            if a > b {
                return fail(format!("start {a} is after end {b}"));
            }
        }
        for spec in &self.classifiers {
            spec.validate().map_err(|e| UsageError(e.to_string()))?;
        }
        self.synthetic.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(())
    }

    pub fn input_path(&self) -> PathBuf {
        self.input.clone().unwrap_or_else(|| self.out.join("dataset.csv"))
    }
}
