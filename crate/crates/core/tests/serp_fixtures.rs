use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use chrono::NaiveDate;
use serp_refind::serp::{build_snapshot, parse_serp_html, FetchMode, FetchPlan, SerpFetcher};
use serp_refind::{Error, Vertical};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn golden_lines(html: &str) -> String {
    parse_serp_html(html)
        .unwrap()
        .iter()
        .map(|l| format!("{}\t{}\n", l.uri, l.title))
        .collect()
}

fn check_golden(name: &str) {
    let dir = fixtures().join("serp");
    let html = std::fs::read_to_string(dir.join(format!("{name}.html"))).unwrap();
    let golden = std::fs::read_to_string(dir.join(format!("{name}.golden"))).unwrap();
    assert_eq!(golden_lines(&html), golden, "{name}");
}

#[test]
fn general_page_matches_golden() {
    check_golden("general_p1");
}

#[test]
fn news_page_matches_golden() {
    check_golden("news_p1");
}

#[test]
fn redirect_wrappers_match_golden() {
    check_golden("redirect_p1");
}

#[test]
fn captcha_fixture_is_rate_limited() {
    let html = std::fs::read_to_string(fixtures().join("serp/captcha.html")).unwrap();
    assert!(matches!(
        parse_serp_html(&html),
        Err(Error::RateLimited { .. })
    ));
}

#[test]
fn five_page_snapshot_dedups_across_pages() {
    let date = NaiveDate::from_ymd_opt(2017, 8, 30).unwrap();
    let plan = FetchPlan::fixture(
        "Hurricane Harvey",
        Vertical::General,
        fixtures().join("tree"),
    );
    let mut fetcher = SerpFetcher::new(plan).unwrap();
    let snap = build_snapshot(&mut fetcher, date).unwrap();

    assert_eq!(snap.len(), 49);
    assert_eq!(snap.date, date);
    snap.validate(Some(50)).unwrap();
    let dup: Vec<_> = snap
        .results
        .iter()
        .filter(|r| r.canonical_uri == "news1.example.com/story/2")
        .collect();
    assert_eq!(dup.len(), 1);
    assert_eq!((dup[0].page, dup[0].rank), (1, 3));
    // ranks are global and keep the gap left by the dropped duplicate
    let p4: Vec<u32> = snap
        .results
        .iter()
        .filter(|r| r.page == 4)
        .map(|r| r.rank)
        .collect();
    assert_eq!(p4.len(), 9);
    assert!(!p4.contains(&37));
    assert_eq!(snap.results.last().unwrap().rank, 50);
}

#[test]
fn missing_fixture_page_aborts_snapshot() {
    let date = NaiveDate::from_ymd_opt(2017, 8, 31).unwrap();
    let plan = FetchPlan::fixture(
        "Hurricane Harvey",
        Vertical::General,
        fixtures().join("tree"),
    );
    let mut fetcher = SerpFetcher::new(plan).unwrap();
    assert!(matches!(
        build_snapshot(&mut fetcher, date),
        Err(Error::NotFound(_))
    ));
}

/// Serves one canned HTTP response per connection, `count` times.
fn serve(response: String, count: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming().take(count) {
            let mut stream = stream.unwrap();
            let mut buf = [0u8; 4096];
            let _ = stream.read(&mut buf);
            stream.write_all(response.as_bytes()).unwrap();
        }
    });
    format!("http://{addr}/search")
}

fn live_plan(endpoint: String) -> FetchPlan {
    FetchPlan {
        politeness_delay: Duration::from_millis(10),
        mode: FetchMode::Live { endpoint },
        ..FetchPlan::live("hurricane harvey", Vertical::General)
    }
}

#[test]
fn live_captcha_response_is_rate_limited() {
    let body = std::fs::read_to_string(fixtures().join("serp/captcha.html")).unwrap();
    let response = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let mut fetcher = SerpFetcher::new(live_plan(serve(response, 1))).unwrap();
    let date = NaiveDate::from_ymd_opt(2017, 8, 30).unwrap();
    assert!(matches!(
        build_snapshot(&mut fetcher, date),
        Err(Error::RateLimited { .. })
    ));
}

#[test]
fn live_429_honours_retry_after() {
    let response = "HTTP/1.1 429 Too Many Requests\r\nRetry-After: 120\r\nContent-Length: 0\r\nConnection: close\r\n\r\n".to_string();
    let mut fetcher = SerpFetcher::new(live_plan(serve(response, 1))).unwrap();
    let err = fetcher
        .fetch_serp_page(NaiveDate::from_ymd_opt(2017, 8, 30).unwrap(), 1)
        .unwrap_err();
    assert!(matches!(err, Error::RateLimited { backoff } if backoff == Duration::from_secs(120)));
}

#[test]
fn live_ok_page_is_returned() {
    let body = std::fs::read_to_string(fixtures().join("serp/news_p1.html")).unwrap();
    let response = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let mut plan = live_plan(serve(response, 2));
    plan.pages = 2;
    let mut fetcher = SerpFetcher::new(plan).unwrap();
    let snap = build_snapshot(&mut fetcher, NaiveDate::from_ymd_opt(2017, 6, 22).unwrap()).unwrap();
    // the same page served twice collapses to the page-1 copies
    assert_eq!(snap.len(), 5);
    assert!(snap.results.iter().all(|r| r.page == 1));
}

#[test]
fn connection_refused_is_transport_error() {
    let addr = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap();
    let mut fetcher = SerpFetcher::new(live_plan(format!("http://{addr}/search"))).unwrap();
    let err = fetcher
        .fetch_serp_page(NaiveDate::from_ymd_opt(2017, 8, 30).unwrap(), 1)
        .unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err:?}");
}

#[test]
fn page_without_results_gives_empty_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let day = dir.path().join("quiet/news/2017-06-01");
    std::fs::create_dir_all(&day).unwrap();
    std::fs::write(
        day.join("p1.html"),
        "<html><body><div id=search></div></body></html>",
    )
    .unwrap();
    let mut plan = FetchPlan::fixture("quiet", Vertical::News, dir.path());
    plan.pages = 1;
    let snap = build_snapshot(
        &mut SerpFetcher::new(plan).unwrap(),
        NaiveDate::from_ymd_opt(2017, 6, 1).unwrap(),
    )
    .unwrap();
    assert!(snap.is_empty());
    assert_eq!(snap.vertical, Vertical::News);
}
