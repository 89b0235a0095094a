//! Result-link extraction from SERP markup.
//!
//! A result is an anchor tied to an `h3` heading, either wrapping it
//! (`<a href><h3>title</h3></a>`) or nested in it (`<h3><a href>title</a></h3>`).
//! Headings without such an anchor, such as "People also ask", yield nothing,
//! and sponsored blocks are skipped.

use std::time::Duration;

use scraper::{ElementRef, Html, Selector};
use url::Url;

use crate::error::{Error, Result};

/// Base that relative result hrefs are resolved against.
pub const ENGINE_BASE: &str = "https://www.google.com/";

/// Backoff suggested when no `Retry-After` is known.
pub const DEFAULT_BACKOFF: Duration = Duration::from_secs(30 * 60);

const CAPTCHA_MARKERS: &[&str] = &[
    "our systems have detected unusual traffic",
    "id=\"captcha-form\"",
    "class=\"g-recaptcha\"",
    "/sorry/index",
];

const AD_CONTAINER_IDS: &[&str] = &["tads", "tadsb", "bottomads"];
const AD_HOSTS: &[&str] = &["googleadservices.com", "doubleclick.net"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedLink {
    pub uri: String,
    pub title: String,
}

/// True when `html` is the engine's CAPTCHA or unusual-traffic interstitial.
pub fn is_captcha_page(html: &str) -> bool {
    let lower = html.to_ascii_lowercase();
    CAPTCHA_MARKERS.iter().any(|m| lower.contains(m))
}

fn is_engine_host(host: &str) -> bool {
    let host = host.strip_prefix("www.").unwrap_or(host);
    host.strip_prefix("google.")
        .is_some_and(|tld| !tld.contains('/'))
}

/// Resolves `href` to the absolute target URI, unwrapping engine
/// click-through redirects. Engine-internal links give `None`.
pub fn unwrap_result_href(href: &str) -> Option<String> {
    let base = Url::parse(ENGINE_BASE).expect("static base URL");
    let url = base.join(href.trim()).ok()?;
    let host = url.host_str()?;
    if is_engine_host(host) {
        if url.path() != "/url" {
            return None;
        }
        let target = url
            .query_pairs()
            .find(|(k, _)| k == "q" || k == "url")
            .map(|(_, v)| v.into_owned())?;
        let target = Url::parse(&target).ok()?;
        return is_web_uri(&target).then(|| target.to_string());
    }
    if AD_HOSTS
        .iter()
        .any(|ad| host == *ad || host.ends_with(&format!(".{ad}")))
    {
        return None;
    }
    is_web_uri(&url).then(|| url.to_string())
}

fn is_web_uri(url: &Url) -> bool {
    matches!(url.scheme(), "http" | "https") && url.host_str().is_some_and(|h| !h.is_empty())
}

fn heading_anchor<'a>(h3: ElementRef<'a>, anchors: &Selector) -> Option<ElementRef<'a>> {
    h3.select(anchors).next().or_else(|| {
        h3.ancestors()
            .filter_map(ElementRef::wrap)
            .find(|e| e.value().name() == "a" && e.value().attr("href").is_some())
    })
}

fn in_ad_block(h3: ElementRef<'_>) -> bool {
    h3.ancestors().filter_map(ElementRef::wrap).any(|e| {
        e.value()
            .id()
            .is_some_and(|id| AD_CONTAINER_IDS.contains(&id))
    })
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Extracts `(uri, title)` pairs of a SERP page in document order.
pub fn parse_serp_html(html: &str) -> Result<Vec<ExtractedLink>> {
    if is_captcha_page(html) {
        return Err(Error::RateLimited {
            backoff: DEFAULT_BACKOFF,
        });
    }
    let doc = Html::parse_document(html);
    let headings = Selector::parse("h3").expect("static selector");
    let anchors = Selector::parse("a[href]").expect("static selector");

    let mut links = Vec::new();
    for h3 in doc.select(&headings).filter(|h| !in_ad_block(*h)) {
        let Some(anchor) = heading_anchor(h3, &anchors) else {
            continue;
        };
        let Some(uri) = anchor.value().attr("href").and_then(unwrap_result_href) else {
            continue;
        };
        links.push(ExtractedLink {
            uri,
            title: collapse_whitespace(&h3.text().collect::<String>()),
        });
    }
    Ok(links)
}
