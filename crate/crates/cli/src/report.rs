//! Text, CSV and SVG renderings of churn reports, timelines and fits.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serp_refind::churn::{
    page_filters, ChurnReport, IntervalSpec, ProbCell, Rate, RateCell, RateKind, TemporalMatrix,
    TransitionMatrix, STATES,
};
use serp_refind::{Observation, RefindabilityModel, Vertical, MAX_PAGES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    RatesTable,
    ProbTable,
    PageLevelChart,
    TemporalGrid,
    FitCurve,
    CompareTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Svg,
}

impl ReportKind {
    pub const ALL: [ReportKind; 6] = [
        ReportKind::RatesTable,
        ReportKind::ProbTable,
        ReportKind::PageLevelChart,
        ReportKind::TemporalGrid,
        ReportKind::FitCurve,
        ReportKind::CompareTable,
    ];

    pub fn formats(self) -> &'static [ReportFormat] {
        use ReportFormat::*;
        match self {
            ReportKind::RatesTable | ReportKind::ProbTable | ReportKind::CompareTable => {
                &[Text, Csv]
            }
            ReportKind::PageLevelChart | ReportKind::FitCurve => &[Svg, Csv],
            ReportKind::TemporalGrid => &[Svg, Text],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReportKind::RatesTable => "rates",
            ReportKind::ProbTable => "prob",
            ReportKind::PageLevelChart => "page-chart",
            ReportKind::TemporalGrid => "temporal-grid",
            ReportKind::FitCurve => "fit-curve",
            ReportKind::CompareTable => "compare",
        }
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReportKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        ReportKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| anyhow!("unknown report kind {s:?}"))
    }
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Svg => "svg",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReportFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "svg" => Ok(ReportFormat::Svg),
            _ => bail!("unknown report format {s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportSpec {
    pub kind: ReportKind,
    pub format: ReportFormat,
    /// `None` writes to stdout.
    pub output: Option<std::path::PathBuf>,
}

impl ReportSpec {
    pub fn new(
        kind: ReportKind,
        format: ReportFormat,
        output: Option<std::path::PathBuf>,
    ) -> Result<Self> {
        ensure!(
            kind.formats().contains(&format),
            "{kind} cannot be rendered as {format} (supported: {})",
            kind.formats()
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(", ")
        );
        Ok(ReportSpec {
            kind,
            format,
            output,
        })
    }
}

fn page_label(page: Option<u8>) -> String {
    page.map_or_else(|| "all".to_string(), |p| p.to_string())
}

fn parse_page(s: &str) -> Result<Option<u8>> {
    if s == "all" {
        return Ok(None);
    }
    let p: u8 = s.parse().with_context(|| format!("bad page {s:?}"))?;
    ensure!((1..=MAX_PAGES).contains(&p), "page {p} out of range");
    Ok(Some(p))
}

// ---------------------------------------------------------------- CSV

pub const CSV_HEADER: [&str; 6] = ["metric", "vertical", "interval", "page", "value", "n"];
const PROB_METRIC: &str = "prob_seen";

/// Rate rows, probability rows, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvSection {
    Rates,
    Probabilities,
    All,
}

/// One row per report cell. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn report_to_csv(report: &ChurnReport, section: CsvSection) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let vertical = report.vertical.as_str();
    if section != CsvSection::Probabilities {
        for c in &report.rates {
            w.write_record([
                c.kind.metric_name(),
                vertical,
                &c.interval.to_string(),
                &page_label(c.page),
                &c.value.to_string(),
                &c.samples.to_string(),
            ])?;
        }
    }
    if section != CsvSection::Rates {
        for c in &report.probabilities {
            w.write_record([
                PROB_METRIC,
                vertical,
                &format!("k={}", c.k),
                &page_label(c.page),
                &c.rate.value().to_string(),
                &c.rate.denominator.to_string(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Inverse of [`report_to_csv`].
pub fn report_from_csv(text: &str) -> Result<ChurnReport> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    ensure!(
        r.headers()? == &csv::StringRecord::from(CSV_HEADER.to_vec()),
        "unexpected CSV header"
    );
    let mut vertical = None;
    let mut rates = Vec::new();
    let mut probabilities = Vec::new();
    for (line, record) in r.records().enumerate() {
        let rec = record?;
        let ctx = || format!("CSV row {}", line + 2);
        let v: Vertical = rec[1].parse().with_context(ctx)?;
        ensure!(
            *vertical.get_or_insert(v) == v,
            "{}: mixed verticals",
            ctx()
        );
        let page = parse_page(&rec[3]).with_context(ctx)?;
        let value: f64 = rec[4].parse().with_context(ctx)?;
        let n: usize = rec[5].parse().with_context(ctx)?;
        match &rec[0] {
            PROB_METRIC => {
                let k = rec[2]
                    .strip_prefix("k=")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| anyhow!("{}: bad k {:?}", ctx(), &rec[2]))?;
                let numerator = (value * n as f64).round() as usize;
                let rate = Rate::new(numerator, n);
                ensure!(
                    rate.value() == value,
                    "{}: {value} is not a ratio over {n}",
                    ctx()
                );
                probabilities.push(ProbCell { k, page, rate });
            }
            metric => {
                let kind = [RateKind::Replacement, RateKind::NewStory]
                    .into_iter()
                    .find(|k| k.metric_name() == metric)
                    .ok_or_else(|| anyhow!("{}: unknown metric {metric:?}", ctx()))?;
                let interval: IntervalSpec = rec[2].parse().with_context(ctx)?;
                rates.push(RateCell {
                    kind,
                    interval,
                    page,
                    value,
                    samples: n,
                });
            }
        }
    }
    Ok(ChurnReport {
        vertical: vertical.unwrap_or(Vertical::General),
        rates,
        probabilities,
    })
}

/// `k,p` rows of an observed curve, optionally with the model value.
pub fn curve_csv(points: &[(f64, f64)], model: Option<&RefindabilityModel>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if model.is_some() {
        w.write_record(["k", "p", "model"])?;
    } else {
        w.write_record(["k", "p"])?;
    }
    for &(k, p) in points {
        let mut rec = vec![k.to_string(), p.to_string()];
        if let Some(m) = model {
            rec.push(m.eval(k).to_string());
        }
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Reads `k,p` points from CSV with a header row. Extra columns are ignored.
pub fn points_from_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let rec = record?;
        ensure!(
            rec.len() >= 2,
            "points row {} needs k and p columns",
            line + 2
        );
        let k: f64 = rec[0]
            .trim()
            .parse()
            .with_context(|| format!("points row {}", line + 2))?;
        let p: f64 = rec[1]
            .trim()
            .parse()
            .with_context(|| format!("points row {}", line + 2))?;
        out.push((k, p));
    }
    Ok(out)
}

// ---------------------------------------------------------------- text

fn pct(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

/// Intervals down, page filters across, one block per rate kind.
pub fn rates_table_text(report: &ChurnReport) -> String {
    let mut intervals: Vec<IntervalSpec> = Vec::new();
    for c in &report.rates {
        if !intervals.contains(&c.interval) {
            intervals.push(c.interval);
        }
    }
    let mut out = String::new();
    for kind in [RateKind::Replacement, RateKind::NewStory] {
        let _ = writeln!(out, "{} ({})", kind.metric_name(), report.vertical);
        let _ = write!(out, "{:<10}", "interval");
        for page in page_filters() {
            let _ = write!(
                out,
                "{:>9}",
                page.map_or("all".to_string(), |p| format!("p{p}"))
            );
        }
        out.push('\n');
        for &interval in &intervals {
            let _ = write!(out, "{:<10}", interval.to_string());
            for page in page_filters() {
                let cell = report
                    .rate(kind, interval, page)
                    .map_or("-".to_string(), |c| pct(c.value));
                let _ = write!(out, "{cell:>9}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn prob_table_text(report: &ChurnReport) -> String {
    let mut ks: Vec<usize> = report.probabilities.iter().map(|c| c.k).collect();
    ks.dedup();
    let mut out = format!("P(seen after k days) ({})\n{:<5}", report.vertical, "k");
    for page in page_filters() {
        let _ = write!(
            out,
            "{:>9}",
            page.map_or("all".to_string(), |p| format!("p{p}"))
        );
    }
    let _ = writeln!(out, "{:>7}", "n");
    for k in ks {
        let _ = write!(out, "{k:<5}");
        for page in page_filters() {
            let cell = report
                .prob(k, page)
                .map_or("-".to_string(), |r| format!("{:.4}", r.value()));
            let _ = write!(out, "{cell:>9}");
        }
        let n = report.prob(k, None).map_or(0, |r| r.denominator);
        let _ = writeln!(out, "{n:>7}");
    }
    out
}

pub fn transitions_text(m: &TransitionMatrix) -> String {
    let mut out = format!("{:<6}", "from\\to");
    for j in 0..STATES {
        let _ = write!(out, "{j:>8}");
    }
    let _ = writeln!(out, "{:>8}", "n");
    for i in 0..STATES {
        let _ = write!(out, "{i:<6}");
        for j in 0..STATES {
            let cell = m
                .probability(i, j)
                .map_or("-".to_string(), |p| format!("{p:.4}"));
            let _ = write!(out, "{cell:>8}");
        }
        let _ = writeln!(out, "{:>8}", m.row_total(i));
    }
    out
}

/// Counts as CSV: `from,to,count,probability`.
pub fn transitions_csv(m: &TransitionMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["from", "to", "count", "probability"])?;
    for i in 0..STATES {
        for j in 0..STATES {
            w.write_record([
                i.to_string(),
                j.to_string(),
                m.count(i, j).to_string(),
                m.probability(i, j).map_or(String::new(), |p| p.to_string()),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// One line per story: first-seen date, URI and the day-by-day pages
/// (`-` for a day without a snapshot).
pub fn temporal_grid_text(matrix: &TemporalMatrix) -> Result<String> {
    ensure!(!matrix.is_empty(), "temporal matrix is empty");
    let mut out = String::new();
    if let Some(start) = matrix.start {
        let _ = writeln!(
            out,
            "# day 0 = {start}, {} stories x {} days",
            matrix.n_rows(),
            matrix.n_cols()
        );
    }
    for (row, cells) in matrix.rows.iter().zip(&matrix.cells) {
        let line: String = cells.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(out, "{line} {} {}", row.first_seen, row.canonical_uri);
    }
    Ok(out)
}

/// Vertical-by-vertical comparison of the all-pages rates, with fitted
/// models when available.
#[derive(Debug, Clone)]
pub struct CompareColumn {
    pub label: String,
    pub report: ChurnReport,
    pub model: Option<RefindabilityModel>,
}

fn compare_rows(columns: &[CompareColumn]) -> Vec<(String, Vec<Option<f64>>)> {
    let mut intervals: Vec<IntervalSpec> = Vec::new();
    for col in columns {
        for c in &col.report.rates {
            if !intervals.contains(&c.interval) {
                intervals.push(c.interval);
            }
        }
    }
    let mut rows = Vec::new();
    for kind in [RateKind::Replacement, RateKind::NewStory] {
        for &iv in &intervals {
            rows.push((
                format!("{} {iv}", kind.metric_name()),
                columns
                    .iter()
                    .map(|c| c.report.rate(kind, iv, None).map(|r| r.value))
                    .collect(),
            ));
        }
    }
    for k in [1usize, 7, 30] {
        rows.push((
            format!("prob_seen k={k}"),
            columns
                .iter()
                .map(|c| c.report.prob(k, None).map(Rate::value))
                .collect(),
        ));
    }
    if columns.iter().any(|c| c.model.is_some()) {
        for (name, f) in [
            (
                "model a",
                (|m: &RefindabilityModel| m.a) as fn(&RefindabilityModel) -> f64,
            ),
            ("model b", |m| m.b),
            ("model c", |m| m.c),
            ("model P(1)", |m| m.eval(1.0)),
        ] {
            rows.push((
                name.to_string(),
                columns.iter().map(|c| c.model.as_ref().map(f)).collect(),
            ));
        }
    }
    rows
}

pub fn compare_table_text(columns: &[CompareColumn]) -> String {
    let mut out = format!("{:<24}", "measure");
    for c in columns {
        let _ = write!(out, "{:>12}", c.label);
    }
    out.push('\n');
    for (name, values) in compare_rows(columns) {
        let _ = write!(out, "{name:<24}");
        for v in values {
            let _ = write!(
                out,
                "{:>12}",
                v.map_or("-".to_string(), |v| format!("{v:.4}"))
            );
        }
        out.push('\n');
    }
    out
}

pub fn compare_table_csv(columns: &[CompareColumn]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["measure".to_string()];
    header.extend(columns.iter().map(|c| c.label.clone()));
    w.write_record(&header)?;
    for (name, values) in compare_rows(columns) {
        let mut rec = vec![name];
        rec.extend(
            values
                .into_iter()
                .map(|v| v.map_or(String::new(), |v| v.to_string())),
        );
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

// ---------------------------------------------------------------- SVG

/// Fill colors of the temporal grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub pages: [String; MAX_PAGES as usize],
    pub blank: String,
    pub hatch: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            pages: [
                "rgb(34,185,4)".into(),
                "rgb(128,255,104)".into(),
                "rgb(230,230,0)".into(),
                "rgb(109,109,109)".into(),
                "rgb(251,0,6)".into(),
            ],
            blank: "rgb(255,255,255)".into(),
            hatch: "rgb(160,160,160)".into(),
        }
    }
}

impl Palette {
    pub fn fill(&self, obs: Observation) -> String {
        match obs {
            Observation::Page(p) => self.pages[(p - 1) as usize].clone(),
            Observation::Absent => self.blank.clone(),
            Observation::Missing => format!("url(#{HATCH_ID})"),
        }
    }
}

const HATCH_ID: &str = "missing-day";
const CELL: usize = 8;
const MARGIN: usize = 24;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Story-by-day grid: one `rect` per cell, colored by page. Days without
/// a snapshot use a hatch pattern.
pub fn render_temporal_grid(matrix: &TemporalMatrix, palette: &Palette) -> Result<String> {
    ensure!(!matrix.is_empty(), "temporal matrix is empty");
    let (rows, cols) = (matrix.n_rows(), matrix.n_cols());
    let width = cols * CELL + 2 * MARGIN;
    let height = rows * CELL + 2 * MARGIN + 16;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" data-rows="{rows}" data-cols="{cols}">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><pattern id="{HATCH_ID}" patternUnits="userSpaceOnUse" width="4" height="4"><path d="M-1,1 l2,-2 M0,4 l4,-4 M3,5 l2,-2" stroke="{}" stroke-width="1"/></pattern></defs>"#,
        palette.hatch
    );
    if let Some(start) = matrix.start {
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="11">stories by first appearance, days from {start}</text>"#,
            MARGIN - 8
        );
    }
    let _ = writeln!(
        s,
        r#"<g class="cells" stroke="rgb(230,230,230)" stroke-width="0.5">"#
    );
    for (r, cells) in matrix.cells.iter().enumerate() {
        for (c, obs) in cells.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                MARGIN + c * CELL,
                MARGIN + r * CELL,
                palette.fill(*obs)
            );
        }
    }
    s.push_str("</g>\n");
    // legend uses circles so the rect count stays equal to the cell count
    let y = MARGIN + rows * CELL + 12;
    let _ = writeln!(
        s,
        r#"<g class="legend" font-family="sans-serif" font-size="9">"#
    );
    for (i, color) in palette.pages.iter().enumerate() {
        let x = MARGIN + i * 44;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="4" fill="{color}"/><text x="{}" y="{}">page {}</text>"#,
            x + 4,
            y - 3,
            x + 10,
            y,
            i + 1
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

struct Plot {
    width: f64,
    height: f64,
    left: f64,
    top: f64,
    x_max: f64,
}

impl Plot {
    fn new(x_max: f64) -> Self {
        Plot {
            width: 480.0,
            height: 260.0,
            left: 48.0,
            top: 20.0,
            x_max: x_max.max(1.0),
        }
    }

    fn x(&self, k: f64) -> f64 {
        self.left + k / self.x_max * self.width
    }

    fn y(&self, p: f64) -> f64 {
        self.top + (1.0 - p.clamp(0.0, 1.0)) * self.height
    }

    fn open(&self, title: &str, s: &mut String) {
        let (w, h) = (self.width + self.left + 20.0, self.height + self.top + 40.0);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="12">{}</text>"#,
            self.left,
            escape(title)
        );
        let (x0, y0, x1, y1) = (
            self.left,
            self.top,
            self.left + self.width,
            self.top + self.height,
        );
        let _ = writeln!(
            s,
            r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#
        );
        for tick in 0..=4 {
            let p = tick as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{p:.2}</text>"#,
                x0 - 4.0,
                self.y(p) + 3.0
            );
        }
        for tick in 0..=5 {
            let k = self.x_max * tick as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{k:.0}</text>"#,
                self.x(k),
                y1 + 14.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">days after first appearance (k)</text>"#,
            x0 + self.width / 2.0,
            y1 + 30.0
        );
    }

    fn polyline(&self, points: &[(f64, f64)], color: &str, extra: &str, s: &mut String) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(k, p)| format!("{:.2},{:.2}", self.x(k), self.y(p)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>"#,
            pts.join(" ")
        );
    }
}

/// Probability of being seen after k days, overall and per page.
pub fn render_page_level_chart(report: &ChurnReport, palette: &Palette) -> Result<String> {
    ensure!(
        !report.probabilities.is_empty(),
        "report has no probability cells"
    );
    let x_max = report.probabilities.iter().map(|c| c.k).max().unwrap_or(0) as f64;
    let plot = Plot::new(x_max);
    let mut s = String::new();
    plot.open(
        &format!("P(seen after k days), {} vertical", report.vertical),
        &mut s,
    );
    for (i, page) in page_filters().enumerate() {
        let pts: Vec<(f64, f64)> = report
            .probabilities
            .iter()
            .filter(|c| c.page == page)
            .map(|c| (c.k as f64, c.rate.value()))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let (color, label) = match page {
            None => ("black".to_string(), "all pages".to_string()),
            Some(p) => (palette.pages[(p - 1) as usize].clone(), format!("page {p}")),
        };
        plot.polyline(&pts, &color, &format!(r#" data-series="{label}""#), &mut s);
        let ly = plot.top + 10.0 + i as f64 * 12.0;
        let lx = plot.left + plot.width - 70.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{lx:.1}" cy="{:.1}" r="3" fill="{color}"/><text x="{:.1}" y="{ly:.1}">{label}</text>"#,
            ly - 3.0,
            lx + 6.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Observed points with the fitted curve drawn over them.
pub fn render_fit_curve(
    points: &[(f64, f64)],
    model: &RefindabilityModel,
    label: &str,
) -> Result<String> {
    ensure!(!points.is_empty(), "no points to plot");
    let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let plot = Plot::new(x_max);
    let mut s = String::new();
    plot.open(&format!("{label}: {model}"), &mut s);
    for &(k, p) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="rgb(34,120,200)"/>"#,
            plot.x(k),
            plot.y(p)
        );
    }
    let steps = 200;
    let curve: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let k = plot.x_max * i as f64 / steps as f64;
            (k, model.eval(k))
        })
        .collect();
    plot.polyline(&curve, "rgb(251,0,6)", r#" class="model""#, &mut s);
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use serp_refind::churn::temporal_matrix;
    use serp_refind::StoryTimeline;

    fn tl(uri: &str, day: i64, obs: &[u8]) -> StoryTimeline {
        StoryTimeline {
            canonical_uri: uri.into(),
            first_seen: NaiveDate::from_ymd_opt(2017, 6, 1).unwrap() + chrono::Duration::days(day),
            observations: obs
                .iter()
                .map(|&p| {
                    if p == 0 {
                        Observation::Absent
                    } else {
                        Observation::Page(p)
                    }
                })
                .collect(),
        }
    }

    fn fills(svg: &str) -> Vec<&str> {
        svg.lines()
            .filter(|l| l.starts_with("<rect"))
            .map(|l| {
                l.split("fill=\"")
                    .nth(1)
                    .unwrap()
                    .split('"')
                    .next()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn toy_grid_has_one_rect_per_cell() {
        let tls = [
            tl("s0", 0, &[4, 2, 0, 0]),
            tl("s1", 0, &[1, 2, 0, 1]),
            tl("s2", 0, &[1, 1, 1, 1]),
        ];
        let m = temporal_matrix(tls.iter());
        let pal = Palette::default();
        let svg = render_temporal_grid(&m, &pal).unwrap();
        let f = fills(&svg);
        assert_eq!(f.len(), 12);
        assert_eq!(
            &f[..4],
            &[pal.pages[3].as_str(), &pal.pages[1], &pal.blank, &pal.blank]
        );
    }

    #[test]
    fn single_cell_grid() {
        let m = temporal_matrix([tl("s", 0, &[1])].iter());
        let svg = render_temporal_grid(&m, &Palette::default()).unwrap();
        assert_eq!(fills(&svg), vec!["rgb(34,185,4)"]);
    }

    #[test]
    fn missing_column_is_hatched() {
        let mut t = tl("s", 0, &[1, 0, 2]);
        t.observations[1] = Observation::Missing;
        let mut u = tl("u", 0, &[3, 0, 0]);
        u.observations[1] = Observation::Missing;
        let m = temporal_matrix([t, u].iter());
        let svg = render_temporal_grid(&m, &Palette::default()).unwrap();
        let f = fills(&svg);
        assert_eq!(f[1], "url(#missing-day)");
        assert_eq!(f[4], "url(#missing-day)");
        assert_eq!(f.iter().filter(|x| x.starts_with("url")).count(), 2);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let m = temporal_matrix(std::iter::empty());
        assert!(render_temporal_grid(&m, &Palette::default()).is_err());
        assert!(temporal_grid_text(&m).is_err());
    }

    #[test]
    fn kind_format_combinations() {
        assert!(ReportSpec::new(ReportKind::TemporalGrid, ReportFormat::Csv, None).is_err());
        assert!(ReportSpec::new(ReportKind::TemporalGrid, ReportFormat::Svg, None).is_ok());
        assert!(ReportSpec::new(ReportKind::TemporalGrid, ReportFormat::Text, None).is_ok());
        assert!(ReportSpec::new(ReportKind::RatesTable, ReportFormat::Svg, None).is_err());
        for k in ReportKind::ALL {
            assert_eq!(k.name().parse::<ReportKind>().unwrap(), k);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let report = ChurnReport {
            vertical: Vertical::News,
            rates: vec![
                RateCell {
                    kind: RateKind::Replacement,
                    interval: IntervalSpec::Daily,
                    page: None,
                    value: 0.1 + 0.2,
                    samples: 3,
                },
                RateCell {
                    kind: RateKind::NewStory,
                    interval: IntervalSpec::Custom(3),
                    page: Some(5),
                    value: 1.0 / 3.0,
                    samples: 1,
                },
            ],
            probabilities: vec![
                ProbCell {
                    k: 0,
                    page: None,
                    rate: Rate::new(7, 7),
                },
                ProbCell {
                    k: 12,
                    page: Some(2),
                    rate: Rate::new(2, 3),
                },
            ],
        };
        let text = report_to_csv(&report, CsvSection::All).unwrap();
        assert!(text.starts_with("metric,vertical,interval,page,value,n\n"));
        assert!(text.contains("prob_seen,news,k=12,2,"));
        assert_eq!(report_from_csv(&text).unwrap(), report);
    }

    #[test]
    fn points_csv_round_trip() {
        let pts = vec![(0.0, 1.0), (1.0, 0.4188), (2.5, 1.0 / 7.0)];
        let text = curve_csv(&pts, None).unwrap();
        assert_eq!(points_from_csv(&text).unwrap(), pts);
    }

    #[test]
    fn charts_are_deterministic() {
        let model = RefindabilityModel {
            a: 0.0362,
            b: 0.9560,
            c: 0.9159,
            sse: 0.0,
        };
        let pts: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, model.eval(k as f64))).collect();
        let a = render_fit_curve(&pts, &model, "general").unwrap();
        assert_eq!(a, render_fit_curve(&pts, &model, "general").unwrap());
        assert_eq!(a.matches("<circle").count(), 10);
    }
}
