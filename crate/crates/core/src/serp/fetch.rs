use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDate};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use url::Url;

use super::parse::{is_captcha_page, DEFAULT_BACKOFF};
use super::{FetchMode, FetchPlan};
use crate::error::{Error, Result};
use crate::model::Vertical;

pub const DEFAULT_ENDPOINT: &str = "https://www.google.com/search";

const USER_AGENT: &str = "Mozilla/5.0 (X11; Linux x86_64; rv:115.0) Gecko/20100101 Firefox/115.0";

/// `"Hurricane Harvey!"` becomes `"hurricane-harvey"`.
pub fn query_slug(query: &str) -> String {
    let mut slug = String::with_capacity(query.len());
    for c in query.trim().chars() {
        if c.is_alphanumeric() {
            slug.extend(c.to_lowercase());
        } else if !slug.ends_with('-') && !slug.is_empty() {
            slug.push('-');
        }
    }
    slug.trim_end_matches('-').to_string()
}

/// `<root>/<slug>/<vertical>/<date>[/cdr_<start>_<end>]/p<N>.html`
pub fn fixture_page_path(root: &Path, plan: &FetchPlan, date: NaiveDate, page_no: u8) -> PathBuf {
    let mut dir = root
        .join(query_slug(&plan.query))
        .join(plan.vertical.as_str())
        .join(date.to_string());
    if let Some((start, end)) = plan.date_range {
        dir = dir.join(format!("cdr_{start}_{end}"));
    }
    dir.join(format!("p{page_no}.html"))
}

fn us_date(d: NaiveDate) -> String {
    format!("{}/{}/{}", d.month(), d.day(), d.year())
}

/// Fetches SERP pages for one plan, one request at a time.
#[derive(Debug)]
pub struct SerpFetcher {
    plan: FetchPlan,
    client: Option<Client>,
    last_request: Option<Instant>,
}

impl SerpFetcher {
    pub fn new(plan: FetchPlan) -> Result<Self> {
        plan.validate()?;
        let client = match plan.mode {
            FetchMode::Live { .. } => Some(
                Client::builder()
                    .user_agent(USER_AGENT)
                    .timeout(Duration::from_secs(30))
                    .build()
                    .map_err(|e| Error::Transport(e.to_string()))?,
            ),
            FetchMode::Fixture(_) => None,
        };
        Ok(SerpFetcher {
            plan,
            client,
            last_request: None,
        })
    }

    pub fn plan(&self) -> &FetchPlan {
        &self.plan
    }

    /// Request URL of a live page fetch.
    pub fn page_url(&self, page_no: u8) -> Result<Url> {
        let FetchMode::Live { endpoint } = &self.plan.mode else {
            return Err(Error::invalid(
                "fetch plan",
                "fixture plans have no request URL",
            ));
        };
        let mut url =
            Url::parse(endpoint).map_err(|e| Error::invalid("endpoint", e.to_string()))?;
        {
            let mut q = url.query_pairs_mut();
            q.append_pair("q", &self.plan.query);
            q.append_pair("hl", "en");
            if page_no > 1 {
                q.append_pair("start", &((page_no as u32 - 1) * 10).to_string());
            }
            if self.plan.vertical == Vertical::News {
                q.append_pair("tbm", "nws");
            }
            if let Some((start, end)) = self.plan.date_range {
                q.append_pair(
                    "tbs",
                    &format!("cdr:1,cd_min:{},cd_max:{}", us_date(start), us_date(end)),
                );
            }
        }
        Ok(url)
    }

    /// Raw bytes of result page `page_no`. `date` picks the fixture
    /// directory and is ignored by live fetches.
    pub fn fetch_serp_page(&mut self, date: NaiveDate, page_no: u8) -> Result<Vec<u8>> {
        if !(1..=self.plan.pages).contains(&page_no) {
            return Err(Error::invalid(
                "page number",
                format!("{page_no} outside 1-{}", self.plan.pages),
            ));
        }
        match &self.plan.mode {
            FetchMode::Fixture(root) => {
                let path = fixture_page_path(root, &self.plan, date, page_no);
                match fs::read(&path) {
                    Ok(bytes) => Ok(bytes),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        Err(Error::NotFound(path))
                    }
                    Err(e) => Err(e.into()),
                }
            }
            FetchMode::Live { .. } => self.fetch_live(page_no),
        }
    }

    fn fetch_live(&mut self, page_no: u8) -> Result<Vec<u8>> {
        let url = self.page_url(page_no)?;
        let client = self.client.as_ref().expect("live fetcher has a client");
        thread::sleep(self.plan.politeness_delay);
        self.last_request = Some(Instant::now());
        log::info!("GET {url}");

        let resp = client
            .get(url)
            .send()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let status = resp.status();
        let retry_after = resp
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let interstitial = resp.url().path().starts_with("/sorry");
        let body = resp
            .bytes()
            .map_err(|e| Error::Transport(e.to_string()))?
            .to_vec();

        if status == StatusCode::TOO_MANY_REQUESTS
            || interstitial
            || is_captcha_page(&String::from_utf8_lossy(&body))
        {
            return Err(Error::RateLimited {
                backoff: retry_after.unwrap_or(DEFAULT_BACKOFF),
            });
        }
        if !status.is_success() {
            return Err(Error::Transport(format!("HTTP {status}")));
        }
        Ok(body)
    }

    pub fn last_request(&self) -> Option<Instant> {
        self.last_request
    }
}
