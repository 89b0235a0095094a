//! Brute-force reference implementation of the churn measures.
//!
//! Everything here is recomputed by scanning the raw snapshot lists: no
//! hash sets, no timelines, nothing from the `churn` module except the
//! output types. It is quadratic and only meant for desk-scale stores.

use chrono::NaiveDate;

use crate::churn::{
    ChurnReport, IntervalSpec, ProbCell, Rate, RateCell, RateKind, ReportConfig, TransitionMatrix,
    STATES,
};
use crate::error::{Error, Result};
use crate::model::MAX_PAGES;
use crate::store::CollectionStore;

pub const MAX_STORIES: usize = 200;
pub const MAX_DAYS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub report: ChurnReport,
    pub transitions: TransitionMatrix,
}

struct Day {
    date: NaiveDate,
    links: Vec<(String, u8)>,
}

struct Raw {
    days: Vec<Day>,
    uris: Vec<String>,
}

impl Raw {
    fn day(&self, date: NaiveDate) -> Option<&Day> {
        self.days.iter().find(|d| d.date == date)
    }

    fn last_date(&self) -> NaiveDate {
        self.days.iter().map(|d| d.date).max().expect("non-empty")
    }

    fn first_seen(&self, uri: &str) -> NaiveDate {
        self.days
            .iter()
            .filter(|d| d.links.iter().any(|(u, _)| u == uri))
            .map(|d| d.date)
            .min()
            .expect("uri comes from some snapshot")
    }
}

fn page_on(day: &Day, uri: &str) -> Option<u8> {
    day.links.iter().find(|(u, _)| u == uri).map(|(_, p)| *p)
}

fn filtered(day: &Day, page: Option<u8>) -> Vec<&str> {
    let mut out = Vec::new();
    for (u, p) in &day.links {
        if page.is_none() || page == Some(*p) {
            out.push(u.as_str());
        }
    }
    out
}

fn shift(date: NaiveDate, days: i64) -> NaiveDate {
    date + chrono::Duration::days(days)
}

fn naive_rate(earlier: &[&str], later: &[&str], kind: RateKind) -> Option<f64> {
    let (base, other) = match kind {
        RateKind::Replacement => (earlier, later),
        RateKind::NewStory => (later, earlier),
    };
    if base.is_empty() {
        return None;
    }
    let mut gone = 0usize;
    for u in base {
        if !other.contains(u) {
            gone += 1;
        }
    }
    Some(gone as f64 / base.len() as f64)
}

fn pages() -> Vec<Option<u8>> {
    let mut v = vec![None];
    for p in 1..=MAX_PAGES {
        v.push(Some(p));
    }
    v
}

/// Recomputes every churn measure of `store` by direct enumeration.
pub fn oracle_metrics(store: &CollectionStore, config: &ReportConfig) -> Result<OracleOutput> {
    let mut raw = Raw {
        days: Vec::new(),
        uris: Vec::new(),
    };
    for snap in store.snapshots() {
        let mut links = Vec::new();
        for r in &snap.results {
            links.push((r.canonical_uri.clone(), r.page));
            if !raw.uris.contains(&r.canonical_uri) {
                raw.uris.push(r.canonical_uri.clone());
            }
        }
        raw.days.push(Day {
            date: snap.date,
            links,
        });
    }
    if raw.days.is_empty() {
        return Err(Error::EmptyStore);
    }
    let first = raw.days.iter().map(|d| d.date).min().expect("non-empty");
    let last = raw.last_date();
    let span = (last - first).num_days() as usize + 1;
    if raw.uris.len() > MAX_STORIES || span > MAX_DAYS {
        return Err(Error::OracleTooLarge {
            stories: raw.uris.len(),
            days: span,
            max_stories: MAX_STORIES,
            max_days: MAX_DAYS,
        });
    }

    let mut rates = Vec::new();
    for kind in [RateKind::Replacement, RateKind::NewStory] {
        for interval in &config.intervals {
            for page in pages() {
                if let Some(cell) = interval_cell(&raw, *interval, kind, page) {
                    rates.push(cell);
                }
            }
        }
    }

    let mut probabilities = Vec::new();
    for k in 0..=config.max_k {
        for page in pages() {
            let mut eligible = 0;
            let mut hits = 0;
            for uri in &raw.uris {
                let target = shift(raw.first_seen(uri), k as i64);
                if target > last {
                    continue;
                }
                let Some(day) = raw.day(target) else { continue };
                eligible += 1;
                match (page_on(day, uri), page) {
                    (Some(_), None) => hits += 1,
                    (Some(p), Some(m)) if p == m => hits += 1,
                    _ => {}
                }
            }
            if eligible > 0 {
                probabilities.push(ProbCell {
                    k,
                    page,
                    rate: Rate::new(hits, eligible),
                });
            }
        }
    }

    let mut counts = [[0u64; STATES]; STATES];
    let mut date = first;
    while date < last {
        let next = shift(date, 1);
        if let (Some(today), Some(tomorrow)) = (raw.day(date), raw.day(next)) {
            for uri in &raw.uris {
                if raw.first_seen(uri) > date {
                    continue;
                }
                let from = page_on(today, uri).unwrap_or(0) as usize;
                let to = page_on(tomorrow, uri).unwrap_or(0) as usize;
                counts[from][to] += 1;
            }
        }
        date = next;
    }

    Ok(OracleOutput {
        report: ChurnReport {
            vertical: store.vertical(),
            rates,
            probabilities,
        },
        transitions: TransitionMatrix::from_counts(counts),
    })
}

fn interval_cell(
    raw: &Raw,
    interval: IntervalSpec,
    kind: RateKind,
    page: Option<u8>,
) -> Option<RateCell> {
    let mut sum = 0.0;
    let mut samples = 0;
    for day in &raw.days {
        let Some(later) = raw.day(shift(day.date, interval.days() as i64)) else {
            continue;
        };
        if let Some(r) = naive_rate(&filtered(day, page), &filtered(later, page), kind) {
            sum += r;
            samples += 1;
        }
    }
    (samples > 0).then(|| RateCell {
        kind,
        interval,
        page,
        value: sum / samples as f64,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SerpResult, SerpSnapshot, Vertical};
    use crate::synth::{gen_stream, SynthParams};

    #[test]
    fn toy_two_day_store() {
        let mut store = CollectionStore::in_memory("toy", Vertical::General);
        for (i, uris) in [["a", "b"], ["b", "c"]].iter().enumerate() {
            let date = shift("2017-06-01".parse().unwrap(), i as i64);
            let mut s = SerpSnapshot::new("toy", Vertical::General, date);
            for (j, u) in uris.iter().enumerate() {
                s.results
                    .push(SerpResult::new(format!("http://{u}.org"), "", 1, j as u32 + 1).unwrap());
            }
            store.ingest(s).unwrap();
        }
        let out = oracle_metrics(&store, &ReportConfig::default()).unwrap();
        let cell = out
            .report
            .rate(RateKind::Replacement, IntervalSpec::Daily, None)
            .unwrap();
        assert_eq!((cell.value, cell.samples), (0.5, 1));
    }

    #[test]
    fn static_stream_has_no_churn() {
        let store = gen_stream(&SynthParams {
            days: 20,
            replacement_rate: 0.0,
            pages: 2,
            per_page: 5,
            ..SynthParams::default()
        })
        .unwrap();
        let out = oracle_metrics(&store, &ReportConfig::default()).unwrap();
        assert!(out.report.rates.iter().all(|c| c.value == 0.0));
        assert!(out
            .report
            .probabilities
            .iter()
            .filter(|c| c.page.is_none())
            .all(|c| c.rate.numerator == c.rate.denominator));
    }

    #[test]
    fn refuses_large_stores() {
        let store = gen_stream(&SynthParams {
            days: 61,
            replacement_rate: 0.0,
            pages: 1,
            per_page: 1,
            ..SynthParams::default()
        })
        .unwrap();
        assert!(matches!(
            oracle_metrics(&store, &ReportConfig::default()),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
