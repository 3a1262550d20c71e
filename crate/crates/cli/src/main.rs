//! `chainlens` command-line driver.

mod commands;
mod config;
mod output;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use chainlens::classify::ClassifierKind;
use chainlens::correlation::CorrelationMethod;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Format, KChoice, RunConfig};

/// Bad flags, config or missing prerequisites. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "chainlens", version, about = "On-chain cryptocurrency analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic snapshot history to `<out>/dataset.csv`.
    Generate,
    /// Validate a snapshot CSV (or fetch from the history API) into `<out>/dataset.csv`.
    Ingest,
    /// Derived features, imputation and per-coin aggregates.
    Clean,
    /// Coin lifetimes, survival summary and Pareto charts.
    Lifetimes,
    /// Price correlation matrices.
    Correlate,
    /// k-means clustering of one day's snapshot.
    Cluster,
    /// Train and evaluate the risk classifiers.
    Classify,
    /// Supply and volume warning signs per coin.
    Flags,
    /// Combine existing artifacts into `report.md`.
    Report,
    /// Render a CSV artifact (pareto, elbow or metrics) as SVG.
    Plot {
        artifact: PathBuf,
    },
    /// generate, clean, lifetimes, correlate, cluster, classify, flags and report in order.
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pearson,
    Kendall,
    Spearman,
    All,
}

#[derive(Args)]
struct Overrides {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "YYYY-MM-DD")]
    cutoff: Option<NaiveDate>,
    #[arg(long, global = true, value_delimiter = ',')]
    method: Vec<MethodArg>,
    /// Number of clusters or `auto`.
    #[arg(long, global = true)]
    k: Option<KChoice>,
    /// Classifier name or `all`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_classifier)]
    classifier: Vec<Option<ClassifierKind>>,
    /// Training share of the train/test split.
    #[arg(long, global = true)]
    split: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,
}

fn parse_classifier(s: &str) -> Result<Option<ClassifierKind>, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    s.parse::<ClassifierKind>().map(Some).map_err(|_| {
        let names: Vec<&str> = ClassifierKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("unknown classifier `{s}`; expected one of {} or all", names.join(", "))
    })
}

impl Overrides {
    fn apply(&self, mut cfg: RunConfig) -> RunConfig {
        if let Some(p) = &self.input {
            cfg.input = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.out = p.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
            cfg.synthetic.seed = seed;
        }
        if self.cutoff.is_some() {
            cfg.cutoff = self.cutoff;
        }
        if !self.method.is_empty() {
            let mut methods = Vec::new();
            for m in &self.method {
                match m {
                    MethodArg::Pearson => methods.push(CorrelationMethod::Pearson),
                    MethodArg::Kendall => methods.push(CorrelationMethod::Kendall),
                    MethodArg::Spearman => methods.push(CorrelationMethod::Spearman),
                    MethodArg::All => methods.extend(CorrelationMethod::ALL),
                }
            }
            methods.sort();
            methods.dedup();
            cfg.methods = methods;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if !self.classifier.is_empty() {
            let kinds: Vec<ClassifierKind> = if self.classifier.contains(&None) {
                ClassifierKind::ALL.to_vec()
            } else {
                self.classifier.iter().flatten().copied().collect()
            };
            // keep hyperparameters from the file for kinds it configures
            cfg.classifiers = kinds
                .iter()
                .map(|&kind| {
                    cfg.classifiers
                        .iter()
                        .find(|s| s.kind() == kind)
                        .cloned()
                        .unwrap_or_else(|| kind.default_spec())
                })
                .collect();
        }
        if let Some(split) = self.split {
            cfg.split = split;
        }
        if !self.format.is_empty() {
            let mut formats = self.format.clone();
            formats.sort();
            formats.dedup();
            cfg.formats = formats;
        }
        cfg
    }
}

fn emit_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

fn classify_error(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return (2, "usage");
        }
        if cause.downcast_ref::<report::MissingArtifacts>().is_some() {
            return (1, "missing_artifact");
        }
        if let Some(e) = cause.downcast_ref::<chainlens::Error>() {
            return (1, e.kind());
        }
    }
    (1, "runtime")
}

fn run_stage(cfg: &RunConfig, command: &Command) -> anyhow::Result<()> {
    let outcome = match command {
        Command::Generate => commands::generate(cfg)?,
        Command::Ingest => commands::ingest(cfg)?,
        Command::Clean => commands::clean(cfg)?,
        Command::Lifetimes => commands::lifetimes_cmd(cfg)?,
        Command::Correlate => commands::correlate(cfg)?,
        Command::Cluster => commands::cluster(cfg)?,
        Command::Classify => commands::classify(cfg)?,
        Command::Flags => commands::flags(cfg)?,
        Command::Report => commands::report_cmd(cfg)?,
        Command::Plot { artifact } => commands::plot(cfg, artifact)?,
        Command::Pipeline => unreachable!("expanded by run"),
    };
    let written = outcome.staged.commit()?;
    log::info!("wrote {} files", written.len());
    println!("{}", outcome.summary);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let base = match &cli.overrides.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = cli.overrides.apply(base);
    cfg.validate()?;
    if let Command::Pipeline = cli.command {
        let cfg = RunConfig { input: None, ..cfg };
        for stage in [
            Command::Generate,
            Command::Clean,
            Command::Lifetimes,
            Command::Correlate,
            Command::Cluster,
            Command::Classify,
            Command::Flags,
            Command::Report,
        ] {
            run_stage(&cfg, &stage)?;
        }
        return Ok(());
    }
    run_stage(&cfg, &cli.command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let message = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            emit_error("usage", message);
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, kind) = classify_error(&err);
            emit_error(kind, &format!("{err:#}"));
            ExitCode::from(code)
        }
    }
}
