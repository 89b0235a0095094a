//! Churn and refindability measures over collections and story timelines.
//!
//! Rates compare the URI sets of two snapshots. Probabilities are fractions
//! of story timelines. Days without a snapshot never enter a denominator:
//! interval pairs touching one are skipped and timeline days marked
//! [`Observation::Missing`] make a story ineligible for that day.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{Observation, StoryTimeline, Vertical, MAX_PAGES};
use crate::store::{add_days, CollectionStore};

/// Number of transition states: 0 (out of view) and pages 1-5.
pub const STATES: usize = MAX_PAGES as usize + 1;

/// An exact fraction `numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rate {
    pub numerator: usize,
    pub denominator: usize,
}

impl Rate {
    pub fn new(numerator: usize, denominator: usize) -> Self {
        Rate {
            numerator,
            denominator,
        }
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Rational equality regardless of reduction, e.g. 1/3 == 2/6.
    pub fn ratio_eq(self, other: Rate) -> bool {
        self.numerator as u128 * other.denominator as u128
            == other.numerator as u128 * self.denominator as u128
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// `|u0 \ u1| / |u0|`: share of the earlier stories no longer present.
pub fn replacement_rate<T: Eq + Hash>(u0: &HashSet<T>, u1: &HashSet<T>) -> Result<Rate> {
    if u0.is_empty() {
        return Err(Error::UndefinedRate("earlier URI set"));
    }
    Ok(Rate::new(u0.difference(u1).count(), u0.len()))
}

/// `|u1 \ u0| / |u1|`: share of the later stories that are new.
pub fn new_story_rate<T: Eq + Hash>(u0: &HashSet<T>, u1: &HashSet<T>) -> Result<Rate> {
    if u1.is_empty() {
        return Err(Error::UndefinedRate("later URI set"));
    }
    Ok(Rate::new(u1.difference(u0).count(), u1.len()))
}

/// Overlap coefficient `|A ∩ B| / min(|A|, |B|)`.
pub fn overlap<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> Result<Rate> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::UndefinedRate(if a.is_empty() {
            "set A"
        } else {
            "set B"
        }));
    }
    Ok(Rate::new(a.intersection(b).count(), a.len().min(b.len())))
}

/// Recall with respect to `a`: `|A ∩ B| / |A|`.
pub fn recall<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> Result<Rate> {
    if a.is_empty() {
        return Err(Error::UndefinedRate("set A"));
    }
    Ok(Rate::new(a.intersection(b).count(), a.len()))
}

/// Spacing between the two snapshots compared by an interval rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalSpec {
    Daily,
    Weekly,
    /// Exactly 30 days.
    Monthly,
    Custom(u32),
}

impl IntervalSpec {
    pub const STANDARD: [IntervalSpec; 3] = [
        IntervalSpec::Daily,
        IntervalSpec::Weekly,
        IntervalSpec::Monthly,
    ];

    pub fn custom(days: u32) -> Result<Self> {
        if days == 0 {
            return Err(Error::invalid("interval", "must span at least one day"));
        }
        Ok(match days {
            1 => IntervalSpec::Daily,
            7 => IntervalSpec::Weekly,
            30 => IntervalSpec::Monthly,
            n => IntervalSpec::Custom(n),
        })
    }

    pub fn days(self) -> u32 {
        match self {
            IntervalSpec::Daily => 1,
            IntervalSpec::Weekly => 7,
            IntervalSpec::Monthly => 30,
            IntervalSpec::Custom(n) => n,
        }
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalSpec::Daily => f.write_str("daily"),
            IntervalSpec::Weekly => f.write_str("weekly"),
            IntervalSpec::Monthly => f.write_str("monthly"),
            IntervalSpec::Custom(n) => write!(f, "{n}d"),
        }
    }
}

impl FromStr for IntervalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "daily" | "day" => Ok(IntervalSpec::Daily),
            "weekly" | "week" => Ok(IntervalSpec::Weekly),
            "monthly" | "month" => Ok(IntervalSpec::Monthly),
            other => other
                .trim_end_matches('d')
                .parse::<u32>()
                .map_err(|_| {
                    Error::invalid(
                        "interval",
                        format!("{other:?} is not daily|weekly|monthly|<days>"),
                    )
                })
                .and_then(IntervalSpec::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateKind {
    Replacement,
    NewStory,
}

impl RateKind {
    pub fn metric_name(self) -> &'static str {
        match self {
            RateKind::Replacement => "replacement_rate",
            RateKind::NewStory => "new_story_rate",
        }
    }
}

/// Mean pairwise rate and the number of anchor days it averages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRate {
    pub value: f64,
    pub samples: usize,
}

fn uri_set(store: &CollectionStore, date: NaiveDate, page: Option<u8>) -> Option<HashSet<&str>> {
    store
        .snapshot(date)
        .map(|s| s.canonical_uris(page).collect())
}

/// Average rate over every anchor day `d` with snapshots on both `d` and
/// `d + interval`. With `page`, both URI sets are restricted to that page.
/// Pairs whose rate denominator set is empty are skipped.
pub fn avg_interval_rate(
    store: &CollectionStore,
    interval: IntervalSpec,
    which: RateKind,
    page: Option<u8>,
) -> Result<IntervalRate> {
    let mut sum = 0.0;
    let mut samples = 0usize;
    for snap in store.snapshots() {
        let Some(later) = add_days(snap.date, interval.days() as u64) else {
            continue;
        };
        let (Some(u0), Some(u1)) = (uri_set(store, snap.date, page), uri_set(store, later, page))
        else {
            continue;
        };
        let rate = match which {
            RateKind::Replacement => replacement_rate(&u0, &u1),
            RateKind::NewStory => new_story_rate(&u0, &u1),
        };
        if let Ok(rate) = rate {
            sum += rate.value();
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(Error::InsufficientData(format!(
            "no pair of snapshots {} day(s) apart{}",
            interval.days(),
            page.map(|p| format!(" with results on page {p}"))
                .unwrap_or_default()
        )));
    }
    Ok(IntervalRate {
        value: sum / samples as f64,
        samples,
    })
}

fn prob_matching<'a, I, F>(timelines: I, k: usize, hit: F) -> Result<Rate>
where
    I: IntoIterator<Item = &'a StoryTimeline>,
    F: Fn(Observation) -> bool,
{
    let mut eligible = 0;
    let mut hits = 0;
    for obs in timelines.into_iter().filter_map(|t| t.at(k)) {
        if obs.is_missing() {
            continue;
        }
        eligible += 1;
        if hit(obs) {
            hits += 1;
        }
    }
    if eligible == 0 {
        return Err(Error::InsufficientData(format!(
            "no timeline observed {k} days after first sighting"
        )));
    }
    Ok(Rate::new(hits, eligible))
}

/// Fraction of stories seen on pages 1-5 exactly `k` days after they were
/// first seen. Stories whose timeline ends before day `k`, or whose day `k`
/// has no snapshot, are left out of the denominator.
pub fn prob_seen<'a, I>(timelines: I, k: usize) -> Result<Rate>
where
    I: IntoIterator<Item = &'a StoryTimeline>,
{
    prob_matching(timelines, k, Observation::is_seen)
}

/// Like [`prob_seen`] but only counts sightings on page `m`.
pub fn prob_seen_on_page<'a, I>(timelines: I, k: usize, m: u8) -> Result<Rate>
where
    I: IntoIterator<Item = &'a StoryTimeline>,
{
    if !(1..=MAX_PAGES).contains(&m) {
        return Err(Error::invalid(
            "page",
            format!("{m} is outside 1-{MAX_PAGES}"),
        ));
    }
    prob_matching(timelines, k, |o| o == Observation::Page(m))
}

/// Day-to-day page transition counts over states 0 (out of view) to 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TransitionMatrix {
    counts: [[u64; STATES]; STATES],
}

impl TransitionMatrix {
    pub fn from_counts(counts: [[u64; STATES]; STATES]) -> Self {
        TransitionMatrix { counts }
    }

    pub fn counts(&self) -> &[[u64; STATES]; STATES] {
        &self.counts
    }

    pub fn count(&self, from: usize, to: usize) -> u64 {
        self.counts[from][to]
    }

    pub fn row_total(&self, from: usize) -> u64 {
        self.counts[from].iter().sum()
    }

    pub fn total(&self) -> u64 {
        (0..STATES).map(|i| self.row_total(i)).sum()
    }

    /// Rows with no outgoing observation are unobserved, not uniform.
    pub fn is_row_observed(&self, from: usize) -> bool {
        self.row_total(from) > 0
    }

    /// Maximum-likelihood estimate of `P(from -> to)`; `None` for an
    /// unobserved row.
    pub fn probability(&self, from: usize, to: usize) -> Option<f64> {
        let total = self.row_total(from);
        (total > 0).then(|| self.counts[from][to] as f64 / total as f64)
    }
}

/// Counts transitions between consecutive timeline days. A pair is counted
/// only when neither day is a missing scrape.
pub fn transition_counts<'a, I>(timelines: I) -> TransitionMatrix
where
    I: IntoIterator<Item = &'a StoryTimeline>,
{
    let mut counts = [[0u64; STATES]; STATES];
    for t in timelines {
        for pair in t.observations.windows(2) {
            if let (Some(from), Some(to)) = (pair[0].page_value(), pair[1].page_value()) {
                counts[from as usize][to as usize] += 1;
            }
        }
    }
    TransitionMatrix { counts }
}

/// Estimates the page transition matrix, failing when nothing is countable.
pub fn transition_matrix<'a, I>(timelines: I) -> Result<TransitionMatrix>
where
    I: IntoIterator<Item = &'a StoryTimeline>,
{
    let m = transition_counts(timelines);
    if m.total() == 0 {
        return Err(Error::InsufficientData(
            "no two consecutive days with snapshots in any timeline".into(),
        ));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalRow {
    pub canonical_uri: String,
    pub first_seen: NaiveDate,
}

/// Story x calendar-day grid of observations. Cells before a story's first
/// sighting are [`Observation::Absent`]; a day without a snapshot is
/// [`Observation::Missing`] for every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalMatrix {
    pub start: Option<NaiveDate>,
    pub rows: Vec<TemporalRow>,
    pub cells: Vec<Vec<Observation>>,
}

impl TemporalMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.n_cols() == 0
    }
}

pub fn temporal_matrix<'a, I>(timelines: I) -> TemporalMatrix
where
    I: IntoIterator<Item = &'a StoryTimeline>,
{
    let mut sorted: Vec<&StoryTimeline> = timelines.into_iter().collect();
    sorted.sort_by(|a, b| (a.first_seen, &a.canonical_uri).cmp(&(b.first_seen, &b.canonical_uri)));
    let Some(earliest) = sorted.first() else {
        return TemporalMatrix {
            start: None,
            rows: Vec::new(),
            cells: Vec::new(),
        };
    };
    let start = earliest.first_seen;
    let cols = sorted
        .iter()
        .map(|t| (t.first_seen - start).num_days() as usize + t.days())
        .max()
        .unwrap_or(0);

    // The earliest timeline spans every column, and a day lacking a
    // snapshot is missing in all timelines that cover it.
    let mut missing = vec![false; cols];
    for t in &sorted {
        let offset = (t.first_seen - start).num_days() as usize;
        for (k, obs) in t.observations.iter().enumerate() {
            if obs.is_missing() {
                missing[offset + k] = true;
            }
        }
    }

    let mut rows = Vec::with_capacity(sorted.len());
    let mut cells = Vec::with_capacity(sorted.len());
    for t in sorted {
        let offset = (t.first_seen - start).num_days() as usize;
        let mut row: Vec<Observation> = missing
            .iter()
            .map(|&m| {
                if m {
                    Observation::Missing
                } else {
                    Observation::Absent
                }
            })
            .collect();
        for (k, obs) in t.observations.iter().enumerate() {
            row[offset + k] = *obs;
        }
        rows.push(TemporalRow {
            canonical_uri: t.canonical_uri.clone(),
            first_seen: t.first_seen,
        });
        cells.push(row);
    }
    TemporalMatrix {
        start: Some(start),
        rows,
        cells,
    }
}

/// What [`churn_report`] computes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub intervals: Vec<IntervalSpec>,
    /// Largest `k` of the probability-by-day curve.
    pub max_k: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            intervals: IntervalSpec::STANDARD.to_vec(),
            max_k: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCell {
    pub kind: RateKind,
    pub interval: IntervalSpec,
    /// `None` for all pages together.
    pub page: Option<u8>,
    pub value: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbCell {
    pub k: usize,
    pub page: Option<u8>,
    pub rate: Rate,
}

/// Aggregated rates and probabilities of one collection. Only cells with at
/// least one sample are present.
#[derive(Debug, Clone, PartialEq)]
pub struct ChurnReport {
    pub vertical: Vertical,
    pub rates: Vec<RateCell>,
    pub probabilities: Vec<ProbCell>,
}

impl ChurnReport {
    pub fn rate(
        &self,
        kind: RateKind,
        interval: IntervalSpec,
        page: Option<u8>,
    ) -> Option<&RateCell> {
        self.rates
            .iter()
            .find(|c| c.kind == kind && c.interval == interval && c.page == page)
    }

    pub fn prob(&self, k: usize, page: Option<u8>) -> Option<Rate> {
        self.probabilities
            .iter()
            .find(|c| c.k == k && c.page == page)
            .map(|c| c.rate)
    }

    /// Overall `(k, P(k))` points, the input of the refindability fit.
    pub fn prob_curve(&self) -> Vec<(f64, f64)> {
        self.probabilities
            .iter()
            .filter(|c| c.page.is_none())
            .map(|c| (c.k as f64, c.rate.value()))
            .collect()
    }
}

/// Page filters in report order: all pages, then 1 through 5.
pub fn page_filters() -> impl Iterator<Item = Option<u8>> {
    std::iter::once(None).chain((1..=MAX_PAGES).map(Some))
}

/// Computes every rate and probability cell of `store`.
pub fn churn_report(store: &CollectionStore, config: &ReportConfig) -> Result<ChurnReport> {
    let timelines = crate::store::build_timelines(store)?;
    churn_report_with(store, &timelines, config)
}

pub fn churn_report_with(
    store: &CollectionStore,
    timelines: &BTreeMap<String, StoryTimeline>,
    config: &ReportConfig,
) -> Result<ChurnReport> {
    let mut rates = Vec::new();
    for kind in [RateKind::Replacement, RateKind::NewStory] {
        for &interval in &config.intervals {
            for page in page_filters() {
                match avg_interval_rate(store, interval, kind, page) {
                    Ok(r) => rates.push(RateCell {
                        kind,
                        interval,
                        page,
                        value: r.value,
                        samples: r.samples,
                    }),
                    Err(Error::InsufficientData(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let mut probabilities = Vec::new();
    for k in 0..=config.max_k {
        for page in page_filters() {
            let rate = match page {
                None => prob_seen(timelines.values(), k),
                Some(m) => prob_seen_on_page(timelines.values(), k, m),
            };
            match rate {
                Ok(rate) => probabilities.push(ProbCell { k, page, rate }),
                Err(Error::InsufficientData(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }

    Ok(ChurnReport {
        vertical: store.vertical(),
        rates,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SerpResult, SerpSnapshot};
    use proptest::prelude::*;

    fn set<'a>(items: &[&'a str]) -> HashSet<&'a str> {
        items.iter().copied().collect()
    }

    fn timeline(uri: &str, pages: &[Option<u8>]) -> StoryTimeline {
        StoryTimeline {
            canonical_uri: uri.into(),
            first_seen: "2017-05-25".parse().unwrap(),
            observations: pages
                .iter()
                .map(|p| match p {
                    Some(0) => Observation::Absent,
                    Some(p) => Observation::Page(*p),
                    None => Observation::Missing,
                })
                .collect(),
        }
    }

    fn toy_timelines() -> Vec<StoryTimeline> {
        vec![
            timeline("s0", &[Some(4), Some(2), Some(0), Some(0)]),
            timeline("s1", &[Some(1), Some(2), Some(0), Some(1)]),
            timeline("s2", &[Some(1), Some(1), Some(1), Some(1)]),
        ]
    }

    #[test]
    fn replacement_rate_examples() {
        assert_eq!(
            replacement_rate(&set(&["a", "b", "c"]), &set(&["a", "b", "x", "y"])).unwrap(),
            Rate::new(1, 3)
        );
        assert_eq!(
            replacement_rate(&set(&["a", "b"]), &set(&["a", "b"]))
                .unwrap()
                .value(),
            0.0
        );
        assert_eq!(
            replacement_rate(&set(&["a", "b"]), &set(&["c"]))
                .unwrap()
                .value(),
            1.0
        );
        assert!(matches!(
            replacement_rate(&set(&[]), &set(&["c"])),
            Err(Error::UndefinedRate(_))
        ));
    }

    #[test]
    fn new_story_rate_examples() {
        assert_eq!(
            new_story_rate(&set(&["a", "b", "c"]), &set(&["a", "b", "c", "d", "e"])).unwrap(),
            Rate::new(2, 5)
        );
        assert_eq!(
            new_story_rate(&set(&["a"]), &set(&["a"])).unwrap().value(),
            0.0
        );
        assert_eq!(
            new_story_rate(&set(&["a"]), &set(&["b", "c"]))
                .unwrap()
                .value(),
            1.0
        );
        assert!(matches!(
            new_story_rate(&set(&["a"]), &set(&[])),
            Err(Error::UndefinedRate(_))
        ));
    }

    #[test]
    fn overlap_and_recall_examples() {
        let a = set(&["a", "b", "c", "d"]);
        assert_eq!(overlap(&a, &a).unwrap().value(), 1.0);
        assert_eq!(overlap(&a, &set(&["c", "d"])).unwrap().value(), 1.0);
        assert_eq!(overlap(&a, &set(&["c", "x"])).unwrap().value(), 0.5);
        assert!(overlap(&a, &set(&[])).is_err());
        assert_eq!(recall(&a, &a).unwrap().value(), 1.0);
        assert_eq!(recall(&a, &set(&["c", "x"])).unwrap().value(), 0.25);
        assert_eq!(recall(&a, &set(&[])).unwrap().value(), 0.0);
        assert!(recall(&set(&[]), &a).is_err());
    }

    #[test]
    fn prob_seen_examples() {
        let tl = toy_timelines();
        assert_eq!(prob_seen(&tl, 0).unwrap().value(), 1.0);
        assert_eq!(prob_seen(&tl, 3).unwrap(), Rate::new(2, 3));
        assert!(matches!(prob_seen(&tl, 4), Err(Error::InsufficientData(_))));
        assert_eq!(prob_seen_on_page(&tl, 3, 1).unwrap(), Rate::new(2, 3));
        assert_eq!(prob_seen_on_page(&tl, 3, 2).unwrap(), Rate::new(0, 3));
        assert!(prob_seen_on_page(&tl, 3, 6).is_err());
        let one = [timeline("x", &[Some(3)])];
        assert_eq!(prob_seen_on_page(&one, 0, 3).unwrap().value(), 1.0);
    }

    #[test]
    fn prob_seen_excludes_missing_and_short() {
        let tl = vec![
            timeline("a", &[Some(1), None, Some(1)]),
            timeline("b", &[Some(2), Some(0)]),
            timeline("c", &[Some(2)]),
        ];
        assert_eq!(prob_seen(&tl, 1).unwrap(), Rate::new(0, 1));
        assert_eq!(prob_seen(&tl, 2).unwrap(), Rate::new(1, 1));
    }

    #[test]
    fn transition_examples() {
        let m = transition_matrix(&[timeline("a", &[Some(1), Some(1), Some(1)])]).unwrap();
        assert_eq!(m.probability(1, 1), Some(1.0));
        assert!((0..STATES)
            .filter(|&i| i != 1)
            .all(|i| !m.is_row_observed(i) && m.probability(i, 0).is_none()));

        let m = transition_matrix(&[timeline("a", &[Some(5), Some(1)])]).unwrap();
        assert_eq!(m.probability(5, 1), Some(1.0));

        let m = transition_matrix(&[timeline("a", &[Some(5), None, Some(1), Some(0), Some(2)])])
            .unwrap();
        assert_eq!(m.total(), 2);
        assert_eq!(m.count(1, 0), 1);
        assert_eq!(m.count(0, 2), 1);

        assert!(transition_matrix(&[timeline("a", &[Some(1)])]).is_err());
    }

    #[test]
    fn temporal_matrix_examples() {
        let tl = toy_timelines();
        let m = temporal_matrix(tl.iter().rev());
        assert_eq!((m.n_rows(), m.n_cols()), (3, 4));
        assert_eq!(m.rows[0].canonical_uri, "s0");
        let row0: Vec<_> = m.cells[0].iter().map(|o| o.page_value().unwrap()).collect();
        assert_eq!(row0, vec![4, 2, 0, 0]);

        let single = temporal_matrix(&tl[..1]);
        assert_eq!((single.n_rows(), single.n_cols()), (1, 4));

        assert!(temporal_matrix(std::iter::empty()).is_empty());
    }

    #[test]
    fn temporal_matrix_gap_column() {
        let mut late = timeline("late", &[Some(2), Some(0)]);
        late.first_seen = "2017-05-27".parse().unwrap();
        let early = timeline("early", &[Some(1), None, Some(1), Some(3)]);
        let m = temporal_matrix([&late, &early]);
        assert_eq!(m.rows[0].canonical_uri, "early");
        assert!(m.cells.iter().all(|row| row[1] == Observation::Missing));
        assert_eq!(
            m.cells[1],
            vec![
                Observation::Absent,
                Observation::Missing,
                Observation::Page(2),
                Observation::Absent
            ]
        );
    }

    fn toy_store(days: &[&[&str]]) -> CollectionStore {
        let mut store = CollectionStore::in_memory("toy", Vertical::General);
        let start: NaiveDate = "2017-05-25".parse().unwrap();
        for (i, uris) in days.iter().enumerate() {
            let mut s =
                SerpSnapshot::new("toy", Vertical::General, add_days(start, i as u64).unwrap());
            for (j, u) in uris.iter().enumerate() {
                s.results
                    .push(SerpResult::new(format!("http://{u}.org"), "", 1, j as u32 + 1).unwrap());
            }
            store.ingest(s).unwrap();
        }
        store
    }

    #[test]
    fn interval_rate_examples() {
        let store = toy_store(&[&["a", "b"], &["b", "c"]]);
        let r =
            avg_interval_rate(&store, IntervalSpec::Daily, RateKind::Replacement, None).unwrap();
        assert_eq!((r.value, r.samples), (0.5, 1));

        let same: Vec<&[&str]> = vec![&["a", "b", "c"]; 5];
        let r = avg_interval_rate(
            &toy_store(&same),
            IntervalSpec::Daily,
            RateKind::NewStory,
            None,
        )
        .unwrap();
        assert_eq!((r.value, r.samples), (0.0, 4));

        assert!(matches!(
            avg_interval_rate(&store, IntervalSpec::Weekly, RateKind::Replacement, None),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            avg_interval_rate(&store, IntervalSpec::Daily, RateKind::Replacement, Some(2)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn interval_parse() {
        assert_eq!(
            "weekly".parse::<IntervalSpec>().unwrap(),
            IntervalSpec::Weekly
        );
        assert_eq!("30".parse::<IntervalSpec>().unwrap(), IntervalSpec::Monthly);
        assert_eq!(
            "3d".parse::<IntervalSpec>().unwrap(),
            IntervalSpec::Custom(3)
        );
        assert!("0".parse::<IntervalSpec>().is_err());
        assert_eq!(
            IntervalSpec::Custom(3)
                .to_string()
                .parse::<IntervalSpec>()
                .unwrap(),
            IntervalSpec::Custom(3)
        );
    }

    proptest! {
        #[test]
        fn set_measures_are_bounded(
            a in prop::collection::hash_set(0u8..20, 1..15),
            b in prop::collection::hash_set(0u8..20, 1..15),
        ) {
            for r in [replacement_rate(&a, &b).unwrap(), new_story_rate(&a, &b).unwrap(), overlap(&a, &b).unwrap(), recall(&a, &b).unwrap()] {
                prop_assert!((0.0..=1.0).contains(&r.value()));
            }
            prop_assert!(overlap(&a, &b).unwrap().value() >= recall(&a, &b).unwrap().value());
            if a.len() == b.len() {
                prop_assert_eq!(replacement_rate(&a, &b).unwrap(), new_story_rate(&a, &b).unwrap());
            }
        }

        #[test]
        fn page_probabilities_partition_overall(
            raw in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.9, 0u8..=5), 1..10), 1..20),
            k in 0usize..10,
        ) {
            let tl: Vec<StoryTimeline> = raw
                .into_iter()
                .enumerate()
                .map(|(i, mut pages)| {
                    pages[0] = Some(pages[0].unwrap_or(1).max(1));
                    timeline(&i.to_string(), &pages)
                })
                .collect();
            match prob_seen(&tl, k) {
                Ok(total) => {
                    let parts: usize = (1..=5).map(|m| prob_seen_on_page(&tl, k, m).unwrap().numerator).sum();
                    prop_assert_eq!(parts, total.numerator);
                }
                Err(_) => prop_assert!(prob_seen_on_page(&tl, k, 1).is_err()),
            }
            if let Ok(m) = transition_matrix(&tl) {
                for i in 0..STATES {
                    if m.is_row_observed(i) {
                        let sum: f64 = (0..STATES).map(|j| m.probability(i, j).unwrap()).sum();
                        prop_assert!((sum - 1.0).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
