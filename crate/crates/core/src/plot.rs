//! Self-contained SVG charts for the Pareto, elbow and metrics artifacts.
//!
//! The artifact type is recognised from its CSV header.

use std::fmt::Write as _;

use crate::classify::{metrics_from_csv, METRICS_CSV_HEADER};
use crate::cluster::ElbowCurve;
use crate::error::{Error, Result};
use crate::survival::ParetoData;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const METRIC_COLORS: [&str; 4] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];
const METRIC_NAMES: [&str; 4] = ["precision", "recall", "f1", "accuracy"];

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Pareto(ParetoData),
    Elbow(ElbowCurve<f64>),
    /// `(classifier, [precision, recall, f1, accuracy])`
    Metrics(Vec<(String, [f64; 4])>),
}

impl Artifact {
    pub fn name(&self) -> &'static str {
        match self {
            Artifact::Pareto(_) => "pareto",
            Artifact::Elbow(_) => "elbow",
            Artifact::Metrics(_) => "metrics",
        }
    }

    /// Parses a CSV artifact, dispatching on its header row.
    pub fn from_csv(text: &str) -> Result<Self> {
        let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
        let fields: Vec<&str> = header.split(',').collect();
        if fields == ParetoData::CSV_HEADER {
            Ok(Artifact::Pareto(ParetoData::from_csv(text)?))
        } else if fields == ElbowCurve::<f64>::CSV_HEADER {
            Ok(Artifact::Elbow(ElbowCurve::from_csv(text)?))
        } else if fields == METRICS_CSV_HEADER {
            Ok(Artifact::Metrics(metrics_from_csv(text)?))
        } else {
            Err(Error::UnknownArtifact(header.to_string()))
        }
    }

    /// The plotted numbers, in the artifact's own CSV layout.
    pub fn to_csv(&self) -> Result<String> {
        match self {
            Artifact::Pareto(p) => p.to_csv(),
            Artifact::Elbow(e) => e.to_csv(),
            Artifact::Metrics(rows) => {
                let mut wtr = csv::Writer::from_writer(Vec::new());
                wtr.write_record(METRICS_CSV_HEADER)?;
                for (name, v) in rows {
                    let mut rec = vec![name.clone()];
                    rec.extend(v.iter().map(f64::to_string));
                    wtr.write_record(rec)?;
                }
                crate::error::finish_csv(wtr)
            }
        }
    }

    pub fn to_svg(&self) -> String {
        match self {
            Artifact::Pareto(p) => pareto_svg(p),
            Artifact::Elbow(e) => elbow_svg(e),
            Artifact::Metrics(m) => metrics_svg(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub artifact: &'static str,
    pub svg: String,
    pub csv: String,
}

/// Renders a CSV artifact as SVG and returns it with the plotted numbers.
pub fn emit_plot_data(csv_text: &str) -> Result<PlotData> {
    let artifact = Artifact::from_csv(csv_text)?;
    Ok(PlotData {
        artifact: artifact.name(),
        svg: artifact.to_svg(),
        csv: artifact.to_csv()?,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Shortest of a few fixed precisions, for tick labels.
fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Self { out }
    }

    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn y_of(v: f64, max: f64) -> f64 {
        let frac = if max > 0.0 { v / max } else { 0.0 };
        TOP + Self::plot_h() * (1.0 - frac)
    }

    /// Axis frame with five ticks on the left (and optionally right) axis.
    fn axes(&mut self, y_max: f64, right_max: Option<f64>, x_label: &str, y_label: &str) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            self.out,
            r#"<path d="M{x0} {y0} V{y1} H{x1}" fill="none" stroke="black"/>"#
        );
        for i in 0..=5 {
            let v = y_max * i as f64 / 5.0;
            let y = Self::y_of(v, y_max);
            let _ = writeln!(
                self.out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                x0,
                x0 - 6.0,
                y + 4.0,
                tick_label(v)
            );
            if let Some(rmax) = right_max {
                let _ = writeln!(
                    self.out,
                    r#"<text x="{:.1}" y="{:.1}">{}%</text>"#,
                    x1 + 6.0,
                    y + 4.0,
                    tick_label(rmax * i as f64 / 5.0)
                );
            }
        }
        if right_max.is_some() {
            let _ = writeln!(self.out, r#"<path d="M{x1} {y0} V{y1}" stroke="black"/>"#);
        }
        let _ = writeln!(
            self.out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.out,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    fn x_tick(&mut self, x: f64, label: &str) {
        let y = HEIGHT - BOTTOM;
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="9">{}</text>"#,
            y + 14.0,
            escape(label)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn pareto_svg(p: &ParetoData) -> String {
    let mut c = Canvas::new("Lifetime distribution (Pareto)");
    let max = p.buckets.iter().map(|b| b.count).max().unwrap_or(0) as f64;
    c.axes(max, Some(100.0), "lifetime bucket (days)", "coins");
    let n = p.buckets.len().max(1) as f64;
    let slot = Canvas::plot_w() / n;
    let mut line = Vec::new();
    for (i, b) in p.buckets.iter().enumerate() {
        let x = LEFT + slot * i as f64;
        let y = Canvas::y_of(b.count as f64, max);
        let _ = writeln!(
            c.out,
            r##"<rect x="{:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="#4c72b0"><title>{}-{}: {}</title></rect>"##,
            x + slot * 0.1,
            slot * 0.8,
            HEIGHT - BOTTOM - y,
            b.start,
            b.end,
            b.count
        );
        c.x_tick(x + slot / 2.0, &format!("{}-{}", b.start, b.end));
        line.push(format!(
            "{:.1},{:.1}",
            x + slot / 2.0,
            Canvas::y_of(b.cumulative_pct, 100.0)
        ));
    }
    if !line.is_empty() {
        let _ = writeln!(
            c.out,
            r##"<polyline points="{}" fill="none" stroke="#c44e52" stroke-width="2"/>"##,
            line.join(" ")
        );
    }
    c.finish()
}

fn elbow_svg(e: &ElbowCurve<f64>) -> String {
    let mut c = Canvas::new(&format!("Elbow curve (chosen k = {})", e.chosen_k));
    let max = e.wcss.iter().copied().fold(0.0, f64::max);
    c.axes(max, None, "k", "WCSS");
    let (k0, k1) = (
        *e.ks.first().unwrap_or(&0) as f64,
        *e.ks.last().unwrap_or(&1) as f64,
    );
    let span = (k1 - k0).max(1.0);
    let x_of = |k: usize| LEFT + Canvas::plot_w() * (k as f64 - k0) / span;
    let points: Vec<String> = e
        .ks
        .iter()
        .zip(&e.wcss)
        .map(|(&k, &w)| format!("{:.1},{:.1}", x_of(k), Canvas::y_of(w, max)))
        .collect();
    let _ = writeln!(
        c.out,
        r##"<polyline points="{}" fill="none" stroke="#4c72b0" stroke-width="2"/>"##,
        points.join(" ")
    );
    for (&k, &w) in e.ks.iter().zip(&e.wcss) {
        let (x, y) = (x_of(k), Canvas::y_of(w, max));
        let (r, fill) = if k == e.chosen_k { (6.0, "#c44e52") } else { (3.0, "#4c72b0") };
        let _ = writeln!(
            c.out,
            r#"<circle cx="{x:.1}" cy="{y:.1}" r="{r}" fill="{fill}"><title>k={k}: {w}</title></circle>"#
        );
        c.x_tick(x, &k.to_string());
    }
    c.finish()
}

fn metrics_svg(rows: &[(String, [f64; 4])]) -> String {
    let mut c = Canvas::new("Classifier evaluation");
    c.axes(1.0, None, "classifier", "score");
    let slot = Canvas::plot_w() / rows.len().max(1) as f64;
    let bar = slot * 0.8 / 4.0;
    for (i, (name, vals)) in rows.iter().enumerate() {
        let x0 = LEFT + slot * i as f64 + slot * 0.1;
        for (j, &v) in vals.iter().enumerate() {
            let y = Canvas::y_of(v.clamp(0.0, 1.0), 1.0);
            let _ = writeln!(
                c.out,
                r#"<rect x="{:.1}" y="{y:.1}" width="{bar:.1}" height="{:.1}" fill="{}"><title>{} {}: {v}</title></rect>"#,
                x0 + bar * j as f64,
                HEIGHT - BOTTOM - y,
                METRIC_COLORS[j],
                escape(name),
                METRIC_NAMES[j]
            );
        }
        c.x_tick(LEFT + slot * (i as f64 + 0.5), name);
    }
    for (j, name) in METRIC_NAMES.iter().enumerate() {
        let x = LEFT + 10.0 + 90.0 * j as f64;
        let _ = writeln!(
            c.out,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            HEIGHT - 32.0,
            METRIC_COLORS[j],
            x + 14.0,
            HEIGHT - 23.0
        );
    }
    c.finish()
}
