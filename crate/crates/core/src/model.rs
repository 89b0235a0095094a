//! Domain types shared by acquisition, storage, metrics and reporting.
//!
//! The JSON shapes of [`SerpSnapshot`] and [`CollectionManifest`] are the
//! interchange format between every command of the toolkit.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::canonical::canonicalize;
use crate::error::{Error, Result};

/// Number of result pages tracked per query.
pub const MAX_PAGES: u8 = 5;

/// Nominal results per page.
pub const DEFAULT_PAGE_CAPACITY: usize = 10;

/// Largest number of results a default snapshot may carry.
pub const DEFAULT_SNAPSHOT_CAPACITY: usize = MAX_PAGES as usize * DEFAULT_PAGE_CAPACITY;

/// SERP flavor a snapshot was taken from.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum Vertical {
    #[default]
    #[serde(rename = "general")]
    General,
    #[serde(rename = "news")]
    News,
}

impl Vertical {
    pub fn as_str(self) -> &'static str {
        match self {
            Vertical::General => "general",
            Vertical::News => "news",
        }
    }
}

impl fmt::Display for Vertical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Vertical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" | "all" => Ok(Vertical::General),
            "news" | "newsvertical" | "news-vertical" => Ok(Vertical::News),
            other => Err(Error::invalid(
                "vertical",
                format!("{other:?} is not general|news"),
            )),
        }
    }
}

/// One extracted result link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerpResult {
    pub uri: String,
    pub canonical_uri: String,
    pub title: String,
    /// Page number, 1 through [`MAX_PAGES`].
    pub page: u8,
    /// 1-based position across all pages of the snapshot.
    pub rank: u32,
}

impl SerpResult {
    /// Builds a result, deriving the canonical URI from `uri`.
    pub fn new(
        uri: impl Into<String>,
        title: impl Into<String>,
        page: u8,
        rank: u32,
    ) -> Result<Self> {
        let uri = uri.into();
        let canonical_uri = canonicalize(&uri)?;
        Ok(SerpResult {
            uri,
            canonical_uri,
            title: title.into(),
            page,
            rank,
        })
    }
}

/// The results of one query on one vertical on one calendar day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerpSnapshot {
    pub query: String,
    pub vertical: Vertical,
    pub date: NaiveDate,
    #[serde(rename = "links")]
    pub results: Vec<SerpResult>,
}

impl SerpSnapshot {
    pub fn new(query: impl Into<String>, vertical: Vertical, date: NaiveDate) -> Self {
        SerpSnapshot {
            query: query.into(),
            vertical,
            date,
            results: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    /// Canonical URIs in snapshot order, optionally restricted to one page.
    pub fn canonical_uris(&self, page: Option<u8>) -> impl Iterator<Item = &str> {
        self.results
            .iter()
            .filter(move |r| page.is_none_or(|p| r.page == p))
            .map(|r| r.canonical_uri.as_str())
    }

    /// Checks the structural invariants of a deduplicated snapshot. When
    /// `capacity` is given the result count is bounded by it as well.
    pub fn validate(&self, capacity: Option<usize>) -> Result<()> {
        if let Some(cap) = capacity {
            if self.results.len() > cap {
                return Err(Error::invalid(
                    "snapshot",
                    format!("{} results exceed capacity {cap}", self.results.len()),
                ));
            }
        }
        let mut seen = HashSet::with_capacity(self.results.len());
        let mut last_rank = 0u32;
        for r in &self.results {
            if !(1..=MAX_PAGES).contains(&r.page) {
                return Err(Error::invalid(
                    "snapshot",
                    format!("page {} out of range for {}", r.page, r.uri),
                ));
            }
            if r.rank <= last_rank {
                return Err(Error::invalid(
                    "snapshot",
                    format!("rank {} does not increase after {last_rank}", r.rank),
                ));
            }
            last_rank = r.rank;
            let expected = canonicalize(&r.uri)?;
            if expected != r.canonical_uri {
                return Err(Error::invalid(
                    "snapshot",
                    format!("canonical_uri {:?} should be {expected:?}", r.canonical_uri),
                ));
            }
            if !seen.insert(r.canonical_uri.as_str()) {
                return Err(Error::invalid(
                    "snapshot",
                    format!("duplicate canonical URI {}", r.canonical_uri),
                ));
            }
        }
        Ok(())
    }
}

/// Description of one topic collection as persisted in `collection.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionManifest {
    pub topic: String,
    pub vertical: Vertical,
    pub start_date: Option<NaiveDate>,
    /// Dates that have a stored snapshot, ascending.
    pub dates: Vec<NaiveDate>,
    /// Dates between the first and last snapshot without one, ascending.
    pub gaps: Vec<NaiveDate>,
}

impl CollectionManifest {
    pub fn new(topic: impl Into<String>, vertical: Vertical) -> Self {
        CollectionManifest {
            topic: topic.into(),
            vertical,
            start_date: None,
            dates: Vec::new(),
            gaps: Vec::new(),
        }
    }

    pub fn end_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }
}

/// What a story's day-indexed timeline records for one calendar day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observation {
    /// Seen on the given page (1 through 5).
    Page(u8),
    /// A snapshot exists for the day but the story is not in pages 1-5.
    Absent,
    /// No snapshot was taken that day.
    Missing,
}

impl Observation {
    /// The page value of the timeline notation: the page, 0 when absent,
    /// `None` for a missing scrape.
    pub fn page_value(self) -> Option<u8> {
        match self {
            Observation::Page(p) => Some(p),
            Observation::Absent => Some(0),
            Observation::Missing => None,
        }
    }

    pub fn is_seen(self) -> bool {
        matches!(self, Observation::Page(_))
    }

    pub fn is_missing(self) -> bool {
        self == Observation::Missing
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Page(p) => write!(f, "{p}"),
            Observation::Absent => f.write_str("0"),
            Observation::Missing => f.write_str("-"),
        }
    }
}

/// Page observations of one story from the day it was first seen to the
/// last snapshot of its collection. Index `k` is `first_seen + k` days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoryTimeline {
    pub canonical_uri: String,
    pub first_seen: NaiveDate,
    pub observations: Vec<Observation>,
}

impl StoryTimeline {
    pub fn at(&self, k: usize) -> Option<Observation> {
        self.observations.get(k).copied()
    }

    pub fn days(&self) -> usize {
        self.observations.len()
    }
}

impl fmt::Display for StoryTimeline {
    /// Renders `{4, 2, 0, 0}`, with `-` for days without a snapshot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, obs) in self.observations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{obs}")?;
        }
        f.write_str("}")
    }
}

/// Coefficients of `P(k) = a + b * exp(-c * k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefindabilityModel {
    /// Long-run probability of refinding a story.
    pub a: f64,
    /// Decay amplitude.
    pub b: f64,
    /// Decay constant per day.
    pub c: f64,
    /// Residual sum of squares of the fit that produced the model.
    pub sse: f64,
}

impl fmt::Display for RefindabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P(k) = {:.3} + {:.3}·e^(-{:.3}k)",
            self.a, self.b, self.c
        )
    }
}
