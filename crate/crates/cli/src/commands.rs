//! One function per subcommand. Each computes all of its artifacts before
//! anything is written.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use chainlens::classify::{
    evaluate, fit, fit_majority, label_risky, manipulability_flags, metrics_to_csv, prepare_split, EvalMetrics,
    ModelDocument,
};
use chainlens::cleaning::{aggregate_stats, derive_ptsc, impute_max_supply, impute_mean, AggregateFeatures, Feature};
use chainlens::cluster::{cluster_report, ClusterOptions, KMeansConfig};
use chainlens::correlation::{price_factor_report, reports_to_csv};
use chainlens::dataset::{fetch_history, load_csv, to_csv_string, ApiClientConfig, CsvSchema, Dataset};
use chainlens::plot::emit_plot_data;
use chainlens::survival::{lifetimes, pareto, survival_summary, ParetoFilter};
use chainlens::synthetic::generate_synthetic;
use chainlens::FeatureTable;
use chrono::NaiveDate;
use serde_json::json;

use crate::config::{KChoice, RunConfig};
use crate::output::Staged;
use crate::report;
use crate::UsageError;

pub struct Outcome {
    pub staged: Staged,
    pub summary: String,
}

fn staged(cfg: &RunConfig) -> Staged {
    Staged::new(&cfg.out, &cfg.formats)
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.input_path();
    if !path.exists() {
        bail!(UsageError(format!(
            "input {} does not exist; pass --input or run `generate` / `ingest` first",
            path.display()
        )));
    }
    Ok(load_csv(&path, &CsvSchema::default())?)
}

fn date_span(ds: &Dataset) -> Result<(NaiveDate, NaiveDate)> {
    ds.date_range().ok_or_else(|| anyhow!("dataset is empty"))
}

fn cutoff(cfg: &RunConfig, ds: &Dataset) -> Result<NaiveDate> {
    Ok(match cfg.cutoff {
        Some(c) => c,
        None => date_span(ds)?.1,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(wtr: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    wtr.into_inner().map_err(|e| anyhow!("csv flush failed: {}", e.error()))
}

/// Adds `<stem>.csv` and, when it is a plottable artifact, `<stem>.svg`.
fn add_plotted(out: &mut Staged, stem: &str, csv_text: String) -> Result<()> {
    let plot = emit_plot_data(&csv_text)?;
    out.add(format!("{stem}.csv"), csv_text);
    out.add(format!("{stem}.svg"), plot.svg);
    Ok(())
}

pub fn generate(cfg: &RunConfig) -> Result<Outcome> {
    let ds = generate_synthetic(&cfg.synthetic)?;
    let mut out = staged(cfg);
    out.add("dataset.csv", to_csv_string(&ds)?);
    out.add_json("synthetic_spec.json", &cfg.synthetic)?;
    let summary = format!(
        "generate: {} coins, {} rows (seed {})",
        ds.series_count(),
        ds.len(),
        cfg.synthetic.seed
    );
    Ok(Outcome { staged: out, summary })
}

pub fn ingest(cfg: &RunConfig) -> Result<Outcome> {
    let (ds, source) = match (&cfg.input, &cfg.api.base_url) {
        (Some(path), _) => (load_csv(path, &CsvSchema::default())?, path.display().to_string()),
        (None, Some(url)) => {
            let start = cfg.api.start.or(cfg.start);
            let end = cfg.api.end.or(cfg.end);
            let (Some(start), Some(end)) = (start, end) else {
                bail!(UsageError("API ingest needs `start` and `end` dates".into()));
            };
            let mut api = ApiClientConfig::new(url.clone(), start, end);
            api.rate_limit = cfg.api.rate_limit;
            api.page_size = cfg.api.page_size;
            api.retry.max_attempts = cfg.api.max_attempts;
            (fetch_history(&api)?, url.clone())
        }
        (None, None) => bail!(UsageError("ingest needs --input or an [api] base_url".into())),
    };
    let (first, last) = date_span(&ds)?;
    let mut out = staged(cfg);
    out.add("dataset.csv", to_csv_string(&ds)?);
    out.add_json(
        "ingest_summary.json",
        &json!({
            "source": source,
            "coins": ds.series_count(),
            "rows": ds.len(),
            "first_day": first,
            "last_day": last,
            "extended_columns": ds.has_extended_columns(),
        }),
    )?;
    let summary = format!("ingest: {} coins, {} rows, {first}..{last}", ds.series_count(), ds.len());
    Ok(Outcome { staged: out, summary })
}

pub fn clean(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let table = FeatureTable::from_dataset(&ds, &Feature::ALL);

    let mut missing = BTreeMap::new();
    let mut empty_columns = Vec::new();
    for f in Feature::ALL {
        let col = table.column(f.name())?;
        let absent = col.iter().filter(|v| v.is_none()).count();
        missing.insert(f.name(), absent);
        if absent == col.len() {
            empty_columns.push(f.name());
        }
    }
    let mut filled = table.clone();
    if !empty_columns.contains(&Feature::MaxSupply.name()) {
        filled = impute_max_supply(&filled)?;
    }
    let mean_cols: Vec<&str> = Feature::ALL
        .iter()
        .map(|f| f.name())
        .filter(|n| *n != Feature::MaxSupply.name() && !empty_columns.contains(n))
        .collect();
    let filled = impute_mean(&filled, &mean_cols)?;

    let mut wtr = csv_writer();
    let mut header = vec!["coin_key".to_string(), "date".to_string()];
    header.extend(Feature::ALL.iter().map(|f| f.name().to_string()));
    wtr.write_record(&header)?;
    let columns: Vec<&[Option<f64>]> = Feature::ALL
        .iter()
        .map(|f| filled.column(f.name()))
        .collect::<Result<_, _>>()?;
    for (i, s) in ds.rows().enumerate() {
        let mut rec = vec![s.key.to_string(), s.date.to_string()];
        rec.extend(columns.iter().map(|c| fmt_opt(c[i])));
        wtr.write_record(&rec)?;
    }
    let features_csv = finish(wtr)?;

    let (first, last) = date_span(&ds)?;
    let aggregates = aggregate_stats(&ds, first, last)?;
    let mut wtr = csv_writer();
    let mut header = vec!["coin_key".to_string()];
    for f in Feature::AGGREGATED {
        header.push(format!("mean_{}", f.name()));
        header.push(format!("std_{}", f.name()));
    }
    wtr.write_record(&header)?;
    for (key, agg) in &aggregates {
        let mut rec = vec![key.to_string()];
        for f in Feature::AGGREGATED {
            rec.push(fmt_opt(agg.mean(f)));
            rec.push(fmt_opt(agg.std(f)));
        }
        wtr.write_record(&rec)?;
    }
    let aggregates_csv = finish(wtr)?;

    let mut ptsc_quality: BTreeMap<String, usize> = BTreeMap::new();
    for s in ds.rows() {
        let q = derive_ptsc(s.circulating_supply, s.total_supply).quality;
        let name = serde_json::to_value(q)?.as_str().unwrap_or("unknown").to_string();
        *ptsc_quality.entry(name).or_default() += 1;
    }

    let mut out = staged(cfg);
    out.add("features.csv", features_csv);
    out.add("aggregates.csv", aggregates_csv);
    out.add_json(
        "clean_summary.json",
        &json!({
            "rows": ds.len(),
            "coins": ds.series_count(),
            "missing_before_imputation": missing,
            "empty_columns": empty_columns,
            "ptsc_quality": ptsc_quality,
        }),
    )?;
    let total_missing: usize = missing.values().sum();
    let summary = format!(
        "clean: {} rows, {} cells imputed, {} empty columns",
        ds.len(),
        total_missing - empty_columns.len() * ds.len(),
        empty_columns.len()
    );
    Ok(Outcome { staged: out, summary })
}

pub fn lifetimes_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let cutoff = cutoff(cfg, &ds)?;
    let records = lifetimes(&ds, Some(cutoff));
    let summary = survival_summary(&records)?;

    let mut wtr = csv_writer();
    wtr.write_record(["coin_key", "first_day", "last_day", "lifetime_days", "disappeared"])?;
    for r in &records {
        wtr.write_record([
            r.key.to_string(),
            r.first_day.to_string(),
            r.last_day.to_string(),
            r.lifetime_days.to_string(),
            r.disappeared.to_string(),
        ])?;
    }
    let mut out = staged(cfg);
    out.add("lifetimes.csv", finish(wtr)?);
    for (filter, stem) in [
        (ParetoFilter::Disappeared, "pareto_disappeared"),
        (ParetoFilter::Existing, "pareto_existing"),
    ] {
        let p = pareto(&records, cfg.bucket_width_days, filter)?;
        if p.buckets.is_empty() {
            out.add(format!("{stem}.csv"), p.to_csv()?);
        } else {
            add_plotted(&mut out, stem, p.to_csv()?)?;
        }
    }
    out.add_json("survival_summary.json", &json!({ "cutoff": cutoff, "summary": summary }))?;
    let line = format!(
        "lifetimes: {} coins, {} disappeared ({:.2}%) before {cutoff}",
        summary.total,
        summary.disappeared,
        summary.disappeared_fraction * 100.0
    );
    Ok(Outcome { staged: out, summary: line })
}

pub fn correlate(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let (first, last) = date_span(&ds)?;
    let start = cfg.start.unwrap_or(first);
    let end = cfg.end.unwrap_or(last);
    let report = price_factor_report(&ds, start, end, &cfg.methods)?;
    let mut out = staged(cfg);
    out.add("correlation_pooled.csv", reports_to_csv(&report.pooled)?);
    out.add("correlation_aggregate.csv", reports_to_csv(&report.aggregate)?);
    out.add("correlation_supply.csv", reports_to_csv(&report.supply_matrix)?);
    out.add_json("correlation.json", &report)?;
    let headline = report
        .pooled
        .iter()
        .filter_map(|r| {
            r.get(Feature::Price.name(), Feature::TotalSupply.name())
                .map(|c| format!("{}={c:.4}", r.method))
        })
        .collect::<Vec<_>>()
        .join(" ");
    let summary = format!("correlate: {start}..{end}, price vs total_supply {headline}");
    Ok(Outcome { staged: out, summary })
}

pub fn cluster(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let date = match cfg.cluster_date {
        Some(d) => d,
        None => cutoff(cfg, &ds)?,
    };
    let options = ClusterOptions {
        k: match cfg.k {
            KChoice::Auto => None,
            KChoice::Fixed(k) => Some(k),
        },
        k_max: cfg.k_max,
        seed: cfg.seed,
        kmeans: KMeansConfig {
            restarts: cfg.restarts,
            ..KMeansConfig::default()
        },
    };
    let report = cluster_report(&ds, date, &Feature::CLUSTER, &options)?;
    let mut out = staged(cfg);
    out.add("clusters.csv", report.assignments_csv()?);
    if let Some(curve) = &report.elbow {
        add_plotted(&mut out, "elbow", curve.to_csv()?)?;
    }
    out.add_json("cluster_model.json", &report)?;
    let summary = format!(
        "cluster: {} coins on {date}, k={} ({}), wcss={:.6}, {} excluded",
        report.keys.len(),
        report.model.k,
        cfg.k,
        report.model.wcss,
        report.excluded.len()
    );
    Ok(Outcome { staged: out, summary })
}

pub fn classify(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let cutoff = cutoff(cfg, &ds)?;
    let span = match (cfg.start, cfg.end) {
        (None, None) => None,
        (a, b) => {
            let (first, last) = date_span(&ds)?;
            Some((a.unwrap_or(first), b.unwrap_or(last)))
        }
    };
    let features = Feature::CLASSIFIER;
    let rows = label_risky(&ds, cutoff, span, &features)?;
    let split = prepare_split::<f64>(&rows, &features, cfg.split, cfg.seed, cfg.split_mode)?;
    let truth: Vec<u8> = split.test.iter().map(|r| r.label).collect();

    let mut out = staged(cfg);
    let mut results: Vec<(String, EvalMetrics)> = Vec::new();
    for spec in &cfg.classifiers {
        let name = spec.kind().to_string();
        let model = fit(spec, &split.train, cfg.seed).with_context(|| format!("training {name}"))?;
        let m = evaluate(&model.predict_rows(&split.test)?, &truth)?;
        out.add(format!("models/{name}.json"), ModelDocument::new(Some(*spec), model).to_json()?);
        results.push((name, m));
    }
    let baseline = fit_majority(&split.train)?;
    let m = evaluate(&baseline.predict_rows(&split.test)?, &truth)?;
    out.add("models/majority_baseline.json", ModelDocument::new(None, baseline).to_json()?);
    results.push(("majority_baseline".into(), m));

    add_plotted(&mut out, "metrics", metrics_to_csv(&results)?)?;
    let risky_train = split.train.iter().filter(|r| r.label == 1).count();
    let risky_test = truth.iter().filter(|&&l| l == 1).count();
    out.add_json(
        "classify_summary.json",
        &json!({
            "cutoff": cutoff,
            "features": features,
            "split": cfg.split,
            "split_mode": cfg.split_mode,
            "seed": cfg.seed,
            "train_rows": split.train.len(),
            "test_rows": split.test.len(),
            "risky_train_rows": risky_train,
            "risky_test_rows": risky_test,
            "preprocessor": split.preprocessor,
            "metrics": results.iter().map(|(n, m)| json!({ "classifier": n, "metrics": m })).collect::<Vec<_>>(),
        }),
    )?;
    let best = results
        .iter()
        .max_by(|a, b| a.1.f1.total_cmp(&b.1.f1).then(b.0.cmp(&a.0)))
        .expect("at least the baseline");
    let summary = format!(
        "classify: {} train / {} test rows, best f1 {:.4} ({})",
        split.train.len(),
        split.test.len(),
        best.1.f1,
        best.0
    );
    Ok(Outcome { staged: out, summary })
}

pub fn flags(cfg: &RunConfig) -> Result<Outcome> {
    let ds = load_dataset(cfg)?;
    let cutoff = cutoff(cfg, &ds)?;
    let mut wtr = csv_writer();
    wtr.write_record(["coin_key", "date", "flags"])?;
    let mut listing = Vec::new();
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (key, series) in ds.iter_series() {
        let upto: Vec<_> = series.iter().filter(|s| s.date <= cutoff).collect();
        let Some(last) = upto.last() else { continue };
        let stats = AggregateFeatures::from_rows(upto.iter().copied(), &Feature::AGGREGATED);
        let found = manipulability_flags(last, &stats, &cfg.flags);
        for f in &found {
            *counts.entry(f.name()).or_default() += 1;
        }
        let names: Vec<String> = found.iter().map(ToString::to_string).collect();
        wtr.write_record([key.to_string(), last.date.to_string(), names.join(";")])?;
        listing.push(json!({ "coin_key": key, "date": last.date, "flags": found }));
    }
    let mut out = staged(cfg);
    out.add("flags.csv", finish(wtr)?);
    out.add_json(
        "flags.json",
        &json!({ "cutoff": cutoff, "thresholds": cfg.flags, "counts": counts, "coins": listing }),
    )?;
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let summary = format!("flags: {} coins checked at {cutoff}; {}", listing.len(), parts.join(" "));
    Ok(Outcome { staged: out, summary })
}

pub fn report_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let doc = report::compose(&cfg.out)?;
    let mut out = staged(cfg);
    out.add("report.md", doc.markdown);
    let summary = format!("report: {} sections from {} artifacts", doc.sections, doc.artifacts);
    Ok(Outcome { staged: out, summary })
}

pub fn plot(cfg: &RunConfig, artifact: &Path) -> Result<Outcome> {
    let text = std::fs::read_to_string(artifact).with_context(|| format!("reading {}", artifact.display()))?;
    let data = emit_plot_data(&text)?;
    let stem = artifact
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| anyhow!("artifact path has no file name"))?;
    // the plotted numbers go next to the SVG under their own name so the
    // source artifact is never overwritten
    let mut out = Staged::new(&cfg.out, &crate::config::Format::ALL);
    out.add(format!("{stem}.svg"), data.svg);
    out.add(format!("{stem}.plot.csv"), data.csv);
    let summary = format!("plot: {} chart for {}", data.artifact, artifact.display());
    Ok(Outcome { staged: out, summary })
}
