//! SERP acquisition: fetching result pages live or from fixtures and
//! turning them into [`SerpSnapshot`]s.

use std::path::PathBuf;
use std::time::Duration;

use chrono::NaiveDate;

use crate::canonical::dedup_snapshot;
use crate::error::{Error, Result};
use crate::model::{SerpResult, SerpSnapshot, Vertical, MAX_PAGES};

mod fetch;
mod parse;

pub use fetch::{fixture_page_path, query_slug, SerpFetcher, DEFAULT_ENDPOINT};
pub use parse::{
    is_captcha_page, parse_serp_html, unwrap_result_href, ExtractedLink, DEFAULT_BACKOFF,
};

/// Default pause between live requests.
pub const DEFAULT_POLITENESS_DELAY: Duration = Duration::from_secs(3);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchMode {
    /// Query the engine at `endpoint` over HTTP.
    Live { endpoint: String },
    /// Read `p<N>.html` files below the given fixture root.
    Fixture(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchPlan {
    pub query: String,
    pub vertical: Vertical,
    pub pages: u8,
    /// Restricts results to documents published in this inclusive range.
    pub date_range: Option<(NaiveDate, NaiveDate)>,
    pub politeness_delay: Duration,
    pub mode: FetchMode,
}

impl FetchPlan {
    pub fn live(query: impl Into<String>, vertical: Vertical) -> Self {
        FetchPlan {
            query: query.into(),
            vertical,
            pages: MAX_PAGES,
            date_range: None,
            politeness_delay: DEFAULT_POLITENESS_DELAY,
            mode: FetchMode::Live {
                endpoint: DEFAULT_ENDPOINT.to_string(),
            },
        }
    }

    pub fn fixture(query: impl Into<String>, vertical: Vertical, root: impl Into<PathBuf>) -> Self {
        FetchPlan {
            politeness_delay: Duration::ZERO,
            mode: FetchMode::Fixture(root.into()),
            ..Self::live(query, vertical)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_PAGES).contains(&self.pages) {
            return Err(Error::invalid(
                "fetch plan",
                format!("pages must be 1-{MAX_PAGES}, got {}", self.pages),
            ));
        }
        if self.query.trim().is_empty() {
            return Err(Error::invalid("fetch plan", "query is empty"));
        }
        if let Some((start, end)) = self.date_range {
            if start > end {
                return Err(Error::invalid(
                    "fetch plan",
                    format!("date range {start}..{end} is reversed"),
                ));
            }
        }
        Ok(())
    }
}

/// Fetches pages `1..=plan.pages` in order and assembles the snapshot for
/// `date`. Any fetch or parse failure aborts the whole snapshot.
pub fn build_snapshot(fetcher: &mut SerpFetcher, date: NaiveDate) -> Result<SerpSnapshot> {
    let plan = fetcher.plan().clone();
    let mut snapshot = SerpSnapshot::new(plan.query.clone(), plan.vertical, date);
    let mut rank = 0u32;
    for page in 1..=plan.pages {
        let bytes = fetcher.fetch_serp_page(date, page)?;
        let links = parse_serp_html(&String::from_utf8_lossy(&bytes))?;
        log::debug!(
            "{} {} p{page}: {} links",
            plan.query,
            plan.vertical,
            links.len()
        );
        for link in links {
            rank += 1;
            snapshot
                .results
                .push(SerpResult::new(link.uri, link.title, page, rank)?);
        }
    }
    Ok(dedup_snapshot(snapshot))
}
