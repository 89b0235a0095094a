//! URI canonicalization and within-snapshot deduplication.
//!
//! A canonical URI is the host (lowercased, default port dropped) followed by
//! the path, with the scheme, query string, fragment and trailing slashes
//! removed. The canonical form is itself accepted as input, so the function
//! is idempotent.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::SerpSnapshot;

/// Returns the scheme and the remainder when `uri` starts with `scheme://`.
fn split_scheme(uri: &str) -> Option<(&str, &str)> {
    let idx = uri.find("://")?;
    let scheme = &uri[..idx];
    let mut chars = scheme.chars();
    let first_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    if first_ok && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        Some((scheme, &uri[idx + 3..]))
    } else {
        None
    }
}

fn default_port(scheme: &str) -> Option<&'static str> {
    match scheme.to_ascii_lowercase().as_str() {
        "http" | "ws" => Some("80"),
        "https" | "wss" => Some("443"),
        "ftp" => Some("21"),
        _ => None,
    }
}

/// Reduces `uri` to the form used to identify the same story across days.
///
/// ```
/// use serp_refind::canonicalize;
/// assert_eq!(
///     canonicalize("HTTP://Example.ORG:80/News/Item#frag").unwrap(),
///     "example.org/News/Item"
/// );
/// ```
pub fn canonicalize(uri: &str) -> Result<String> {
    let malformed = |reason| Error::MalformedUri {
        input: uri.to_string(),
        reason,
    };

    let trimmed = uri.trim();
    let (scheme, rest) = match split_scheme(trimmed) {
        Some((scheme, rest)) => (Some(scheme), rest),
        None => (None, trimmed.strip_prefix("//").unwrap_or(trimmed)),
    };

    let rest = rest.split('#').next().unwrap_or_default();
    let rest = rest.split('?').next().unwrap_or_default();

    let (authority, path) = match rest.find('/') {
        Some(i) => rest.split_at(i),
        None => (rest, ""),
    };
    let host_port = match authority.rfind('@') {
        Some(i) => &authority[i + 1..],
        None => authority,
    };

    let (host, port) = match host_port.rfind(':') {
        // IPv6 literals keep their colons inside the brackets.
        Some(i) if !host_port[i..].contains(']') => (&host_port[..i], Some(&host_port[i + 1..])),
        _ => (host_port, None),
    };
    if host.is_empty() {
        return Err(malformed("no host"));
    }
    if host.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(malformed("whitespace in host"));
    }
    if host.contains(':') && !host.starts_with('[') {
        return Err(malformed("stray colon in host"));
    }
    let port = match port {
        Some("") | None => None,
        Some(p) if !p.bytes().all(|b| b.is_ascii_digit()) => {
            return Err(malformed("non-numeric port"))
        }
        // A scheme-less canonical form no longer knows its default port,
        // so ports are only dropped while the scheme is still present.
        Some(p) if scheme.and_then(default_port) == Some(p) => None,
        Some(p) => Some(p),
    };

    let mut out = String::with_capacity(trimmed.len());
    out.push_str(&host.to_ascii_lowercase());
    if let Some(p) = port {
        out.push(':');
        out.push_str(p);
    }
    out.push_str(path.trim_end_matches(|c: char| c == '/' || c.is_whitespace()));
    Ok(out)
}

/// Keeps one result per canonical URI: the one on the lowest page, ties
/// broken by the lowest rank. Survivors keep their order and ranks.
pub fn dedup_snapshot(mut snapshot: SerpSnapshot) -> SerpSnapshot {
    let mut best: HashMap<&str, usize> = HashMap::with_capacity(snapshot.results.len());
    for (i, r) in snapshot.results.iter().enumerate() {
        best.entry(r.canonical_uri.as_str())
            .and_modify(|j| {
                let cur = &snapshot.results[*j];
                if (r.page, r.rank) < (cur.page, cur.rank) {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut keep = vec![false; snapshot.results.len()];
    for i in best.into_values() {
        keep[i] = true;
    }
    let mut flags = keep.into_iter();
    snapshot.results.retain(|_| flags.next().unwrap_or(false));
    snapshot
}
