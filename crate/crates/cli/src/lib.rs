//! Command-line front end for collecting SERP snapshots and reporting on
//! story churn and refindability.

use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serp_refind::churn::{
    churn_report_with, temporal_matrix, transition_matrix, IntervalSpec, ReportConfig,
};
use serp_refind::refind::{fit_exponential, ModelDocument};
use serp_refind::serp::{build_snapshot, FetchMode, FetchPlan, SerpFetcher, DEFAULT_ENDPOINT};
use serp_refind::store::{build_timelines, collection_stats, CollectionStore};
use serp_refind::synth::{drop_days, gen_stream, Kernel, SynthParams};
use serp_refind::{Error, Vertical};

pub mod dataset;
pub mod report;

use dataset::{load_paths, load_text, to_jsonl, LoadOptions, Loaded};
use report::{CompareColumn, CsvSection, Palette, ReportFormat, ReportKind, ReportSpec};

/// Environment variable naming the default store directory.
pub const STORE_ENV: &str = "SERP_REFIND_STORE";

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const STORE_MISSING: u8 = 3;
    pub const INSUFFICIENT_DATA: u8 = 4;
    pub const RATE_LIMITED: u8 = 5;
    pub const PARSE: u8 = 6;
}

#[derive(Debug, Parser)]
#[command(
    name = "serp-refind",
    version,
    about = "Track news stories across search result pages and measure refindability"
)]
pub struct Cli {
    /// Collection store directory; `-` reads JSONL snapshots from stdin.
    #[arg(long, global = true, env = STORE_ENV, value_name = "DIR")]
    pub store: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch one day's SERP pages and add the snapshot to the store.
    Scrape(ScrapeArgs),
    /// Import snapshot documents (JSON or JSONL files, or directories).
    Ingest(IngestArgs),
    /// Print collection size and duration.
    Stats(FormatArgs),
    /// Print per-story page timelines.
    Timelines(FormatArgs),
    /// Average replacement and new-story rates per interval and page.
    Metrics(MetricsArgs),
    /// Probability of seeing a story again k days after first appearance.
    Prob(ProbArgs),
    /// Day-to-day page transition probabilities.
    Transitions(FormatArgs),
    /// Fit P(k) = a + b*e^(-ck) to observed probabilities.
    Fit(FitArgs),
    /// Compare several stores side by side.
    Compare(CompareArgs),
    /// Render a table or chart.
    Report(ReportArgs),
    /// Generate a seeded synthetic collection.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ScrapeArgs {
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value = "general")]
    pub vertical: Vertical,
    #[arg(long, default_value_t = 5)]
    pub pages: u8,
    /// Read pages from this fixture tree instead of the network.
    #[arg(long, value_name = "DIR")]
    pub fixture: Option<PathBuf>,
    /// Seconds to wait before each live request.
    #[arg(long, default_value_t = 3.0, value_name = "SECS")]
    pub delay: f64,
    #[arg(long, requires = "date_end")]
    pub date_start: Option<NaiveDate>,
    #[arg(long, requires = "date_start")]
    pub date_end: Option<NaiveDate>,
    /// Snapshot date; defaults to today.
    #[arg(long)]
    pub date: Option<NaiveDate>,
    #[arg(long, default_value = DEFAULT_ENDPOINT, hide = true)]
    pub endpoint: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Override the topic of every record.
    #[arg(long)]
    pub topic: Option<String>,
    /// Override the vertical of every record.
    #[arg(long)]
    pub vertical: Option<Vertical>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// daily, weekly, monthly or a number of days; repeatable.
    #[arg(long = "interval", value_name = "INTERVAL")]
    pub intervals: Vec<IntervalSpec>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long, default_value_t = 30)]
    pub max_k: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Vertical label of the fitted model; must match the store if both are given.
    #[arg(long)]
    pub vertical: Option<Vertical>,
    /// CSV of `k,p` points to fit instead of the store's curve.
    #[arg(long, value_name = "FILE")]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub max_k: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Store directories to compare.
    #[arg(required = true)]
    pub stores: Vec<PathBuf>,
    /// Fit a refindability model per store.
    #[arg(long)]
    pub fit: bool,
    #[arg(long, default_value_t = 30)]
    pub max_k: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub kind: ReportKind,
    #[arg(long)]
    pub format: ReportFormat,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub max_k: usize,
    /// Extra stores for the compare table.
    #[arg(long = "with", value_name = "DIR")]
    pub with: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 30)]
    pub days: usize,
    #[arg(long, default_value_t = 5)]
    pub pages: u8,
    #[arg(long, default_value_t = 10)]
    pub per_page: usize,
    #[arg(long, default_value_t = 0.3)]
    pub replacement_rate: f64,
    /// JSON file holding a 6x6 row-stochastic matrix over states 0-5.
    #[arg(long, value_name = "FILE")]
    pub kernel: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "synthetic")]
    pub topic: String,
    #[arg(long, default_value = "general")]
    pub vertical: Vertical,
    #[arg(long, default_value = "2017-05-25")]
    pub start_date: NaiveDate,
    /// Leave out the snapshot of this date; repeatable.
    #[arg(long = "gap", value_name = "DATE")]
    pub gaps: Vec<NaiveDate>,
}

/// Error classes with their own exit status.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::StoreMissing(_) => (exit::STORE_MISSING, "store_missing"),
                Error::EmptyStore
                | Error::InsufficientData(_)
                | Error::Underdetermined { .. }
                | Error::UndefinedRate(_) => (exit::INSUFFICIENT_DATA, "insufficient_data"),
                Error::RateLimited { .. } => (exit::RATE_LIMITED, "rate_limited"),
                Error::Parse(_) | Error::Json(_) | Error::MalformedUri { .. } => {
                    (exit::PARSE, "parse")
                }
                Error::NotFound(_) => (exit::FAILURE, "not_found"),
                Error::Transport(_) => (exit::FAILURE, "transport"),
                _ => (exit::FAILURE, "error"),
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
        {
            return (exit::PARSE, "parse");
        }
    }
    (exit::FAILURE, "error")
}

/// `error kind=<kind> code=<n> message=<json string>`
pub fn error_line(err: &anyhow::Error) -> (u8, String) {
    let (code, kind) = classify(err);
    let message = serde_json::to_string(&format!("{err:#}")).unwrap_or_default();
    (
        code,
        format!("error kind={kind} code={code} message={message}"),
    )
}

/// Parses `std::env::args`, runs the command and maps failures to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse().and_then(check_usage) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = e.print();
            if code == exit::USAGE {
                let msg = serde_json::to_string(&e.kind().to_string()).unwrap_or_default();
                eprintln!("error kind=usage code={code} message={msg}");
            }
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            let (code, line) = error_line(&e);
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}

/// Argument checks clap cannot express declaratively.
fn check_usage(cli: Cli) -> std::result::Result<Cli, clap::Error> {
    if let Command::Report(a) = &cli.command {
        if let Err(e) = ReportSpec::new(a.kind, a.format, None) {
            return Err(Cli::command().error(clap::error::ErrorKind::ArgumentConflict, e));
        }
    }
    Ok(cli)
}

fn read_stdin() -> Result<String> {
    let mut text = String::new();
    if !io::stdin().is_terminal() {
        io::stdin().read_to_string(&mut text)?;
    }
    Ok(text)
}

fn store_from_loaded(loaded: Loaded) -> Result<CollectionStore> {
    let Some(first) = loaded.snapshots.first() else {
        return Err(Error::EmptyStore.into());
    };
    let mut store = CollectionStore::in_memory(first.query.clone(), first.vertical);
    for s in loaded.snapshots {
        store.ingest(s)?;
    }
    Ok(store)
}

fn is_stdin(path: &Option<PathBuf>) -> bool {
    path.as_deref().is_none_or(|p| p == Path::new("-"))
}

/// Opens the store named by `--store`, or reads JSONL from stdin.
pub fn load_store(path: &Option<PathBuf>) -> Result<CollectionStore> {
    if is_stdin(path) {
        let mut loaded = Loaded::default();
        load_text(&read_stdin()?, &LoadOptions::default(), &mut loaded)?;
        return store_from_loaded(loaded);
    }
    let dir = path.as_ref().expect("checked above");
    Ok(CollectionStore::open(dir)?)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn json_line<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, &s)
}

/// Executes `cli`, writing command output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Scrape(a) => scrape(&cli.store, a, out),
        Command::Ingest(a) => ingest(&cli.store, a, out),
        Command::Stats(a) => stats(&load_store(&cli.store)?, a.format, out),
        Command::Timelines(a) => timelines(&load_store(&cli.store)?, a.format, out),
        Command::Metrics(a) => metrics(&load_store(&cli.store)?, a, out),
        Command::Prob(a) => prob(&load_store(&cli.store)?, a, out),
        Command::Transitions(a) => transitions(&load_store(&cli.store)?, a.format, out),
        Command::Fit(a) => fit(&cli.store, a, out),
        Command::Compare(a) => compare(a, out),
        Command::Report(a) => report_cmd(&load_store(&cli.store)?, a, out),
        Command::Synth(a) => synth(&cli.store, a, out),
    }
}

fn write_or_stream(
    store_arg: &Option<PathBuf>,
    store: &CollectionStore,
    out: &mut dyn Write,
) -> Result<()> {
    if is_stdin(store_arg) {
        let snaps: Vec<_> = store.snapshots().collect();
        emit(out, &to_jsonl(&snaps)?)
    } else {
        let dir = store_arg.as_ref().expect("checked above");
        let mut disk = CollectionStore::open_or_create(dir, store.topic(), store.vertical())?;
        for s in store.snapshots() {
            disk.ingest(s.clone())?;
        }
        eprintln!("{} snapshots written to {}", store.len(), dir.display());
        Ok(())
    }
}

fn scrape(store_arg: &Option<PathBuf>, a: ScrapeArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.delay >= 0.0 && a.delay.is_finite()) {
        bail!(Error::invalid(
            "delay",
            "must be a non-negative number of seconds"
        ));
    }
    let mut plan = match &a.fixture {
        Some(dir) => FetchPlan::fixture(a.query.clone(), a.vertical, dir),
        None => FetchPlan {
            mode: FetchMode::Live {
                endpoint: a.endpoint.clone(),
            },
            politeness_delay: Duration::from_secs_f64(a.delay),
            ..FetchPlan::live(a.query.clone(), a.vertical)
        },
    };
    plan.pages = a.pages;
    plan.date_range = a.date_start.zip(a.date_end);
    let date = a.date.unwrap_or_else(|| chrono::Local::now().date_naive());
    let mut fetcher = SerpFetcher::new(plan)?;
    let snapshot = build_snapshot(&mut fetcher, date)?;
    eprintln!(
        "{} {} {date}: {} results",
        a.query,
        a.vertical,
        snapshot.len()
    );
    if is_stdin(store_arg) {
        emit(out, &to_jsonl(&[&snapshot])?)
    } else {
        let dir = store_arg.as_ref().expect("checked above");
        let mut store = CollectionStore::open_or_create(dir, &a.query, a.vertical)?;
        store.ingest(snapshot)?;
        Ok(())
    }
}

fn ingest(store_arg: &Option<PathBuf>, a: IngestArgs, out: &mut dyn Write) -> Result<()> {
    let opts = LoadOptions {
        topic: a.topic,
        vertical: a.vertical,
    };
    let loaded = load_paths(&a.paths, &opts)?;
    let (n, skipped) = (loaded.snapshots.len(), loaded.skipped_links);
    let store = store_from_loaded(loaded)?;
    if skipped > 0 {
        eprintln!("skipped {skipped} links with unusable URIs");
    }
    eprintln!("ingested {n} documents into {} snapshots", store.len());
    write_or_stream(store_arg, &store, out)
}

fn stats(store: &CollectionStore, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let s = collection_stats(store);
    let m = store.manifest();
    match format {
        OutputFormat::Json => json_line(
            out,
            &serde_json::json!({
                "topic": m.topic,
                "vertical": m.vertical,
                "snapshots": store.len(),
                "total_links": s.total_links,
                "unique_uris": s.unique_uris,
                "duration_days": s.duration_days,
                "start_date": m.start_date,
                "gaps": m.gaps,
            }),
        ),
        OutputFormat::Csv => emit(
            out,
            &format!(
                "topic,vertical,snapshots,total_links,unique_uris,duration_days,gaps\n{},{},{},{},{},{},{}\n",
                m.topic,
                m.vertical,
                store.len(),
                s.total_links,
                s.unique_uris,
                s.duration_days,
                m.gaps.len()
            ),
        ),
        OutputFormat::Text => emit(
            out,
            &format!(
                "topic          {}\nvertical       {}\nsnapshots      {}\ntotal links    {}\nunique URIs    {}\nduration days  {}\nmissing days   {}\n",
                m.topic,
                m.vertical,
                store.len(),
                s.total_links,
                s.unique_uris,
                s.duration_days,
                m.gaps.len()
            ),
        ),
    }
}

fn timelines(store: &CollectionStore, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let tls = build_timelines(store)?;
    let matrix = temporal_matrix(tls.values());
    match format {
        OutputFormat::Text => {
            for row in &matrix.rows {
                let t = &tls[&row.canonical_uri];
                writeln!(out, "{t} {} {}", t.first_seen, t.canonical_uri)?;
            }
            Ok(())
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["canonical_uri", "first_seen", "observations"])?;
            for row in &matrix.rows {
                let t = &tls[&row.canonical_uri];
                let obs: Vec<String> = t.observations.iter().map(|o| o.to_string()).collect();
                w.write_record([
                    t.canonical_uri.clone(),
                    t.first_seen.to_string(),
                    obs.join(" "),
                ])?;
            }
            emit(out, &String::from_utf8(w.into_inner()?)?)
        }
        OutputFormat::Json => {
            let rows: Vec<_> = matrix
                .rows
                .iter()
                .map(|row| {
                    let t = &tls[&row.canonical_uri];
                    serde_json::json!({
                        "canonical_uri": t.canonical_uri,
                        "first_seen": t.first_seen,
                        "observations": t.observations.iter().map(|o| o.page_value()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_line(out, &rows)
        }
    }
}

fn report_config(intervals: Vec<IntervalSpec>, max_k: usize) -> ReportConfig {
    let mut config = ReportConfig {
        max_k,
        ..ReportConfig::default()
    };
    if !intervals.is_empty() {
        config.intervals = intervals;
    }
    config
}

fn compute_report(
    store: &CollectionStore,
    config: &ReportConfig,
) -> Result<serp_refind::churn::ChurnReport> {
    let tls = build_timelines(store)?;
    if store.len() < 2 {
        return Err(Error::InsufficientData("at least two snapshots are needed".into()).into());
    }
    Ok(churn_report_with(store, &tls, config)?)
}

fn metrics(store: &CollectionStore, a: MetricsArgs, out: &mut dyn Write) -> Result<()> {
    let report = compute_report(store, &report_config(a.intervals, 0))?;
    if report.rates.is_empty() {
        return Err(Error::InsufficientData("no snapshot pair is that far apart".into()).into());
    }
    match a.format {
        OutputFormat::Text => emit(out, &report::rates_table_text(&report)),
        OutputFormat::Csv => emit(out, &report::report_to_csv(&report, CsvSection::Rates)?),
        OutputFormat::Json => json_line(out, &rates_json(&report)),
    }
}

fn rates_json(report: &serp_refind::churn::ChurnReport) -> serde_json::Value {
    let cells: Vec<_> = report
        .rates
        .iter()
        .map(|c| {
            serde_json::json!({
                "metric": c.kind.metric_name(),
                "interval": c.interval.to_string(),
                "page": c.page,
                "value": c.value,
                "n": c.samples,
            })
        })
        .collect();
    serde_json::json!({ "vertical": report.vertical, "rates": cells })
}

fn prob(store: &CollectionStore, a: ProbArgs, out: &mut dyn Write) -> Result<()> {
    let report = compute_report(store, &report_config(vec![], a.max_k))?;
    match a.format {
        OutputFormat::Text => emit(out, &report::prob_table_text(&report)),
        OutputFormat::Csv => emit(
            out,
            &report::report_to_csv(&report, CsvSection::Probabilities)?,
        ),
        OutputFormat::Json => {
            let cells: Vec<_> = report
                .probabilities
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "k": c.k, "page": c.page, "seen": c.rate.numerator,
                        "eligible": c.rate.denominator, "value": c.rate.value(),
                    })
                })
                .collect();
            json_line(out, &cells)
        }
    }
}

fn transitions(store: &CollectionStore, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    let tls = build_timelines(store)?;
    let m = transition_matrix(tls.values())?;
    match format {
        OutputFormat::Text => emit(out, &report::transitions_text(&m)),
        OutputFormat::Csv => emit(out, &report::transitions_csv(&m)?),
        OutputFormat::Json => json_line(out, m.counts()),
    }
}

type Curve = Vec<(f64, f64)>;

/// Observed `(k, P(k))` curve of `store` and the date of its last snapshot.
fn store_curve(store: &CollectionStore, max_k: usize) -> Result<(Curve, Option<NaiveDate>)> {
    let report = compute_report(store, &report_config(vec![IntervalSpec::Daily], max_k))?;
    Ok((report.prob_curve(), store.last_date()))
}

fn fit(store_arg: &Option<PathBuf>, a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let (points, vertical, fitted_at) = match &a.points {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (
                report::points_from_csv(&text)?,
                a.vertical.unwrap_or_default(),
                None,
            )
        }
        None => {
            let store = load_store(store_arg)?;
            if let Some(v) = a.vertical {
                if v != store.vertical() {
                    bail!(Error::Mismatch {
                        field: "vertical",
                        expected: v.to_string(),
                        found: store.vertical().to_string(),
                    });
                }
            }
            let (points, at) = store_curve(&store, a.max_k)?;
            (points, store.vertical(), at)
        }
    };
    let fit = fit_exponential(&points)?;
    let doc = ModelDocument::new(vertical, &fit, fitted_at);
    match a.format {
        OutputFormat::Json => json_line(out, &doc),
        OutputFormat::Csv => emit(out, &report::curve_csv(&points, Some(&fit.model))?),
        OutputFormat::Text => {
            writeln!(out, "{}", fit.model)?;
            writeln!(
                out,
                "vertical={} a={} b={} c={} sse={:e} n={}{}{}",
                vertical,
                fit.model.a,
                fit.model.b,
                fit.model.c,
                fit.model.sse,
                fit.n_points,
                if fit.degenerate { " degenerate" } else { "" },
                if fit.clamped { " clamped" } else { "" },
            )?;
            Ok(())
        }
    }
}

fn compare_columns(stores: &[PathBuf], with_fit: bool, max_k: usize) -> Result<Vec<CompareColumn>> {
    let mut columns = Vec::new();
    for dir in stores {
        let store = CollectionStore::open(dir)?;
        let report = compute_report(&store, &report_config(vec![], max_k))?;
        let model = if with_fit {
            Some(fit_exponential(&report.prob_curve())?.model)
        } else {
            None
        };
        columns.push(CompareColumn {
            label: format!("{}/{}", store.topic(), store.vertical()),
            report,
            model,
        });
    }
    Ok(columns)
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<()> {
    let columns = compare_columns(&a.stores, a.fit, a.max_k)?;
    match a.format {
        OutputFormat::Csv => emit(out, &report::compare_table_csv(&columns)?),
        _ => emit(out, &report::compare_table_text(&columns)),
    }
}

fn report_cmd(store: &CollectionStore, a: ReportArgs, out: &mut dyn Write) -> Result<()> {
    let spec = ReportSpec::new(a.kind, a.format, a.output)?;
    let palette = Palette::default();
    let config = report_config(vec![], a.max_k);
    let text = match (spec.kind, spec.format) {
        (ReportKind::TemporalGrid, fmt) => {
            let tls = build_timelines(store)?;
            let m = temporal_matrix(tls.values());
            if fmt == ReportFormat::Svg {
                report::render_temporal_grid(&m, &palette)?
            } else {
                report::temporal_grid_text(&m)?
            }
        }
        (ReportKind::RatesTable, ReportFormat::Csv) => {
            report::report_to_csv(&compute_report(store, &config)?, CsvSection::Rates)?
        }
        (ReportKind::RatesTable, _) => report::rates_table_text(&compute_report(store, &config)?),
        (ReportKind::ProbTable, ReportFormat::Csv) => {
            report::report_to_csv(&compute_report(store, &config)?, CsvSection::Probabilities)?
        }
        (ReportKind::ProbTable, _) => report::prob_table_text(&compute_report(store, &config)?),
        (ReportKind::PageLevelChart, ReportFormat::Csv) => {
            report::report_to_csv(&compute_report(store, &config)?, CsvSection::Probabilities)?
        }
        (ReportKind::PageLevelChart, _) => {
            report::render_page_level_chart(&compute_report(store, &config)?, &palette)?
        }
        (ReportKind::FitCurve, fmt) => {
            let (points, _) = store_curve(store, a.max_k)?;
            let model = fit_exponential(&points)?.model;
            if fmt == ReportFormat::Csv {
                report::curve_csv(&points, Some(&model))?
            } else {
                report::render_fit_curve(&points, &model, store.vertical().as_str())?
            }
        }
        (ReportKind::CompareTable, fmt) => {
            let mut columns = vec![CompareColumn {
                label: format!("{}/{}", store.topic(), store.vertical()),
                report: compute_report(store, &config)?,
                model: None,
            }];
            columns.extend(compare_columns(&a.with, false, a.max_k)?);
            if fmt == ReportFormat::Csv {
                report::compare_table_csv(&columns)?
            } else {
                report::compare_table_text(&columns)
            }
        }
    };
    match &spec.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => emit(out, &text),
    }
}

fn synth(store_arg: &Option<PathBuf>, a: SynthArgs, out: &mut dyn Write) -> Result<()> {
    let transition_kernel = match &a.kernel {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(
                serde_json::from_str::<Kernel>(&text)
                    .with_context(|| format!("parsing {}", path.display()))?,
            )
        }
        None => None,
    };
    let params = SynthParams {
        days: a.days,
        pages: a.pages,
        per_page: a.per_page,
        replacement_rate: a.replacement_rate,
        transition_kernel,
        seed: a.seed,
        topic: a.topic,
        vertical: a.vertical,
        start_date: a.start_date,
    };
    let mut store = gen_stream(&params)?;
    if !a.gaps.is_empty() {
        store = drop_days(&store, &a.gaps)?;
    }
    write_or_stream(store_arg, &store, out)
}
