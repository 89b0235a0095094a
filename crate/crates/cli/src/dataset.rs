//! Loading snapshot documents from files, directories and JSONL streams.
//!
//! Besides the store's own snapshot format, loosely shaped records are
//! accepted: field names such as `url`/`link`/`href`, `topic`/`q`,
//! `timestamp`/`scraped_at`, bare URI strings in the link list, and
//! missing page or rank fields (filled in from list position, ten per page).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use chrono::NaiveDate;
use serde_json::{Map, Value};
use serp_refind::{
    dedup_snapshot, SerpResult, SerpSnapshot, Vertical, DEFAULT_PAGE_CAPACITY, MAX_PAGES,
};

const QUERY_KEYS: &[&str] = &["query", "topic", "q", "keyword"];
const VERTICAL_KEYS: &[&str] = &["vertical", "type", "serp_type", "tab"];
const DATE_KEYS: &[&str] = &[
    "date",
    "day",
    "timestamp",
    "datetime",
    "scraped_at",
    "collected_at",
];
const LINKS_KEYS: &[&str] = &["links", "results", "items", "uris", "urls", "serp"];
const URI_KEYS: &[&str] = &["uri", "url", "link", "href"];

/// Overrides applied to every loaded record.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub topic: Option<String>,
    pub vertical: Option<Vertical>,
}

#[derive(Debug, Default)]
pub struct Loaded {
    pub snapshots: Vec<SerpSnapshot>,
    /// Links dropped because their URI could not be canonicalized.
    pub skipped_links: usize,
}

fn field<'a>(obj: &'a Map<String, Value>, keys: &[&str]) -> Option<&'a Value> {
    keys.iter()
        .find_map(|k| obj.get(*k))
        .filter(|v| !v.is_null())
}

fn parse_date(v: &Value) -> Result<NaiveDate> {
    let s = v
        .as_str()
        .ok_or_else(|| anyhow!("date is not a string: {v}"))?;
    let day = s.get(..10).unwrap_or(s);
    NaiveDate::parse_from_str(day, "%Y-%m-%d").with_context(|| format!("bad date {s:?}"))
}

fn as_index(v: Option<&Value>) -> Option<u64> {
    match v? {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn lenient_snapshot(
    obj: &Map<String, Value>,
    opts: &LoadOptions,
    skipped: &mut usize,
) -> Result<SerpSnapshot> {
    let query = match (&opts.topic, field(obj, QUERY_KEYS)) {
        (Some(t), _) => t.clone(),
        (None, Some(Value::String(q))) => q.clone(),
        _ => bail!("record has no query/topic"),
    };
    let vertical = match (opts.vertical, field(obj, VERTICAL_KEYS)) {
        (Some(v), _) => v,
        (None, Some(Value::String(v))) => v.parse()?,
        _ => Vertical::General,
    };
    let date = parse_date(field(obj, DATE_KEYS).ok_or_else(|| anyhow!("record has no date"))?)?;
    let links = field(obj, LINKS_KEYS)
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("record for {date} has no link list"))?;

    let mut snap = SerpSnapshot::new(query, vertical, date);
    let mut last_rank = 0u32;
    for (i, link) in links.iter().enumerate() {
        let (uri, title, page, rank) = match link {
            Value::String(u) => (u.as_str(), "", None, None),
            Value::Object(o) => (
                field(o, URI_KEYS).and_then(Value::as_str).unwrap_or(""),
                o.get("title").and_then(Value::as_str).unwrap_or(""),
                as_index(o.get("page")),
                as_index(o.get("rank").or_else(|| o.get("position"))),
            ),
            other => bail!("unexpected link entry {other}"),
        };
        let rank = rank.map_or(i as u32 + 1, |r| r as u32).max(last_rank + 1);
        let page = page.unwrap_or((i / DEFAULT_PAGE_CAPACITY) as u64 + 1);
        if !(1..=MAX_PAGES as u64).contains(&page) {
            *skipped += 1;
            continue;
        }
        match SerpResult::new(uri, title, page as u8, rank) {
            Ok(r) => {
                last_rank = rank;
                snap.results.push(r);
            }
            Err(_) => *skipped += 1,
        }
    }
    Ok(dedup_snapshot(snap))
}

fn load_value(v: Value, opts: &LoadOptions, out: &mut Loaded) -> Result<()> {
    match v {
        Value::Array(items) => {
            for item in items {
                load_value(item, opts, out)?;
            }
        }
        Value::Object(obj) => {
            // exact store format first, so stored documents keep their ranks
            let strict = serde_json::from_value::<SerpSnapshot>(Value::Object(obj.clone()))
                .ok()
                .filter(|s| s.validate(None).is_ok());
            let mut snap = match strict {
                Some(s) => s,
                None => lenient_snapshot(&obj, opts, &mut out.skipped_links)?,
            };
            if let Some(t) = &opts.topic {
                snap.query = t.clone();
            }
            if let Some(v) = opts.vertical {
                snap.vertical = v;
            }
            out.snapshots.push(snap);
        }
        other => bail!("expected a snapshot object, found {other}"),
    }
    Ok(())
}

/// Parses a JSON document, or one JSON value per line.
pub fn load_text(text: &str, opts: &LoadOptions, out: &mut Loaded) -> Result<()> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return load_value(v, opts, out);
    }
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).with_context(|| format!("line {}", n + 1))?;
        load_value(v, opts, out).with_context(|| format!("line {}", n + 1))?;
    }
    Ok(())
}

fn collect_files(path: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        entries.sort();
        for e in entries {
            collect_files(&e, files)?;
        }
    } else if path.is_file() {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if matches!(ext, "json" | "jsonl" | "ndjson")
            && path.file_name().is_some_and(|n| n != "collection.json")
        {
            files.push(path.to_path_buf());
        }
    } else {
        bail!(serp_refind::Error::NotFound(path.to_path_buf()));
    }
    Ok(())
}

/// Loads every `.json`/`.jsonl` file below `paths`, in sorted path order.
pub fn load_paths(paths: &[PathBuf], opts: &LoadOptions) -> Result<Loaded> {
    let mut files = Vec::new();
    for p in paths {
        collect_files(p, &mut files)?;
    }
    let mut out = Loaded::default();
    for f in files {
        let text = fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
        load_text(&text, opts, &mut out).with_context(|| format!("parsing {}", f.display()))?;
    }
    Ok(out)
}

/// One compact snapshot document per line.
pub fn to_jsonl(snapshots: &[&SerpSnapshot]) -> Result<String> {
    let mut out = String::new();
    for s in snapshots {
        out.push_str(&serde_json::to_string(s)?);
        out.push('\n');
    }
    Ok(out)
}
