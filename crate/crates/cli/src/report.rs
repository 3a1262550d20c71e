//! Composes the artifacts already in the output directory into one
//! Markdown document. Nothing is recomputed.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use anyhow::{Context, Result};

/// Artifacts the report cannot do without.
pub const REQUIRED: [&str; 5] = [
    "survival_summary.json",
    "pareto_disappeared.csv",
    "correlation_pooled.csv",
    "clusters.csv",
    "metrics.csv",
];

#[derive(Debug)]
pub struct MissingArtifacts(pub Vec<String>);

impl fmt::Display for MissingArtifacts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "missing artifacts: {}", self.0.join(", "))
    }
}

impl std::error::Error for MissingArtifacts {}

pub struct Document {
    pub markdown: String,
    pub sections: usize,
    pub artifacts: usize,
}

struct Reader<'a> {
    dir: &'a Path,
    used: usize,
}

impl Reader<'_> {
    fn read(&mut self, name: &str) -> Result<Option<String>> {
        let path = self.dir.join(name);
        if !path.exists() {
            return Ok(None);
        }
        self.used += 1;
        std::fs::read_to_string(&path)
            .map(Some)
            .with_context(|| format!("reading {}", path.display()))
    }

    fn has(&self, name: &str) -> bool {
        self.dir.join(name).exists()
    }
}

/// Renders CSV text as a Markdown table, keeping at most `limit` data rows.
fn table(csv_text: &str, limit: usize) -> Result<String> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let header = rdr.headers()?.clone();
    let mut s = String::new();
    let _ = writeln!(s, "| {} |", header.iter().collect::<Vec<_>>().join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
    let mut total = 0;
    for rec in rdr.records() {
        let rec = rec?;
        total += 1;
        if total <= limit {
            let _ = writeln!(s, "| {} |", rec.iter().collect::<Vec<_>>().join(" | "));
        }
    }
    if total > limit {
        let _ = writeln!(s, "\n{} more rows in the CSV.", total - limit);
    }
    Ok(s)
}

fn figure(s: &mut String, r: &Reader, name: &str, alt: &str) {
    if r.has(name) {
        let _ = writeln!(s, "![{alt}]({name})\n");
    }
}

pub fn compose(dir: &Path) -> Result<Document> {
    let missing: Vec<String> = REQUIRED
        .iter()
        .filter(|n| !dir.join(n).exists())
        .map(|n| n.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(MissingArtifacts(missing).into());
    }
    let mut r = Reader { dir, used: 0 };
    let mut md = String::from("# Analysis report\n\n");
    let mut sections = 0;

    let survival: serde_json::Value = serde_json::from_str(&r.read("survival_summary.json")?.unwrap_or_default())?;
    md.push_str("## Survival\n\n");
    let _ = writeln!(md, "Cutoff: {}\n", survival["cutoff"].as_str().unwrap_or("?"));
    md.push_str("| statistic | value |\n|---|---|\n");
    if let Some(obj) = survival["summary"].as_object() {
        for (k, v) in obj {
            let _ = writeln!(md, "| {k} | {} |", if v.is_null() { "n/a".to_string() } else { v.to_string() });
        }
    }
    md.push('\n');
    md.push_str("### Lifetimes of disappeared coins\n\n");
    md.push_str(&table(&r.read("pareto_disappeared.csv")?.unwrap_or_default(), 25)?);
    md.push('\n');
    figure(&mut md, &r, "pareto_disappeared.svg", "pareto of disappeared coins");
    if let Some(text) = r.read("pareto_existing.csv")? {
        md.push_str("### Lifetimes of existing coins\n\n");
        md.push_str(&table(&text, 25)?);
        md.push('\n');
        figure(&mut md, &r, "pareto_existing.svg", "pareto of existing coins");
    }
    sections += 1;

    md.push_str("## Correlation\n\n### Price and its factors, pooled rows\n\n");
    md.push_str(&table(&r.read("correlation_pooled.csv")?.unwrap_or_default(), usize::MAX)?);
    md.push('\n');
    for (name, title) in [
        ("correlation_aggregate.csv", "Per-coin means and standard deviations"),
        ("correlation_supply.csv", "Supply and market variables"),
    ] {
        if let Some(text) = r.read(name)? {
            let _ = writeln!(md, "### {title}\n");
            md.push_str(&table(&text, usize::MAX)?);
            md.push('\n');
        }
    }
    sections += 1;

    md.push_str("## Clusters\n\n");
    let clusters = r.read("clusters.csv")?.unwrap_or_default();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rdr = csv::Reader::from_reader(clusters.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        let id: usize = rec.get(1).unwrap_or("").parse().context("cluster id in clusters.csv")?;
        *sizes.entry(id).or_default() += 1;
    }
    md.push_str("| cluster_id | coins |\n|---|---|\n");
    for (id, n) in &sizes {
        let _ = writeln!(md, "| {id} | {n} |");
    }
    md.push('\n');
    if let Some(text) = r.read("elbow.csv")? {
        md.push_str("### Elbow curve\n\n");
        md.push_str(&table(&text, usize::MAX)?);
        md.push('\n');
        figure(&mut md, &r, "elbow.svg", "elbow curve");
    }
    sections += 1;

    md.push_str("## Classification\n\n");
    md.push_str(&table(&r.read("metrics.csv")?.unwrap_or_default(), usize::MAX)?);
    md.push('\n');
    figure(&mut md, &r, "metrics.svg", "classifier metrics");
    sections += 1;

    if let Some(text) = r.read("flags.json")? {
        let flags: serde_json::Value = serde_json::from_str(&text)?;
        md.push_str("## Manipulability flags\n\n| flag | coins |\n|---|---|\n");
        if let Some(obj) = flags["counts"].as_object() {
            for (k, v) in obj {
                let _ = writeln!(md, "| {k} | {v} |");
            }
        }
        md.push('\n');
        sections += 1;
    }

    Ok(Document {
        markdown: md,
        sections,
        artifacts: r.used,
    })
}
