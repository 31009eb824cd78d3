//! Where API pages come from: the live HTTP endpoint or a directory of
//! recorded pages.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde_json::Value;

use super::{ApiKey, FetchError};

pub const DEFAULT_API_BASE: &str = "https://www.googleapis.com/youtube/v3/videos";

/// What one request asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Listing {
    /// The most-popular chart, optionally continuing from a page token.
    Chart { page_token: Option<String> },
    /// Explicit video ids (at most one page worth).
    Ids(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageQuery {
    /// 1-based sampling occasion. Recorded transports serve that
    /// occasion's sweep; the live endpoint ignores it.
    pub occasion: usize,
    pub region_code: String,
    pub page_size: u32,
    pub listing: Listing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageResponse {
    pub body: String,
    /// Capture time for recorded pages.
    pub recorded_at: Option<DateTime<Utc>>,
}

pub trait PageTransport {
    fn get(&mut self, query: &PageQuery) -> Result<PageResponse, FetchError>;
}

impl<T: PageTransport + ?Sized> PageTransport for &mut T {
    fn get(&mut self, query: &PageQuery) -> Result<PageResponse, FetchError> {
        (**self).get(query)
    }
}

impl<T: PageTransport + ?Sized> PageTransport for Box<T> {
    fn get(&mut self, query: &PageQuery) -> Result<PageResponse, FetchError> {
        (**self).get(query)
    }
}

/// Enforces a minimum spacing between consecutive requests.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    last: Option<Instant>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self {
            interval,
            last: None,
        }
    }

    /// Blocks until `interval` has passed since the previous call.
    pub fn wait(&mut self) {
        if let Some(last) = self.last {
            let elapsed = last.elapsed();
            if elapsed < self.interval {
                thread::sleep(self.interval - elapsed);
            }
        }
        self.last = Some(Instant::now());
    }
}

/// The live videos-list endpoint.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    base_url: String,
    key: ApiKey,
    limiter: RateLimiter,
}

impl HttpTransport {
    pub fn new(
        key: ApiKey,
        base_url: impl Into<String>,
        interval: Duration,
    ) -> Result<Self, FetchError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| FetchError::Transport {
                status: None,
                message: e.without_url().to_string(),
            })?;
        Ok(Self {
            client,
            base_url: base_url.into(),
            key,
            limiter: RateLimiter::new(interval),
        })
    }
}

impl PageTransport for HttpTransport {
    fn get(&mut self, query: &PageQuery) -> Result<PageResponse, FetchError> {
        let mut params: Vec<(&str, String)> = vec![
            ("part", "snippet,statistics".into()),
            ("maxResults", query.page_size.to_string()),
        ];
        match &query.listing {
            Listing::Chart { page_token } => {
                params.push(("chart", "mostPopular".into()));
                params.push(("regionCode", query.region_code.clone()));
                if let Some(token) = page_token {
                    params.push(("pageToken", token.clone()));
                }
            }
            Listing::Ids(ids) => params.push(("id", ids.join(","))),
        }
        params.push(("key", self.key.expose().to_string()));

        self.limiter.wait();
        // errors are stripped of their URL: it carries the key
        let transport_err = |e: reqwest::Error| FetchError::Transport {
            status: e.status().map(|s| s.as_u16()),
            message: e.without_url().to_string(),
        };
        let response = self
            .client
            .get(&self.base_url)
            .query(&params)
            .send()
            .map_err(transport_err)?;
        let status = response.status();
        let body = response.text().map_err(transport_err)?;
        if !status.is_success() {
            return Err(classify_failure(status.as_u16(), &body));
        }
        Ok(PageResponse {
            body,
            recorded_at: None,
        })
    }
}

const QUOTA_REASONS: [&str; 4] = [
    "quotaExceeded",
    "dailyLimitExceeded",
    "rateLimitExceeded",
    "userRateLimitExceeded",
];

/// Maps a non-2xx response to a quota or transport error.
pub(crate) fn classify_failure(status: u16, body: &str) -> FetchError {
    let parsed: Option<Value> = serde_json::from_str(body).ok();
    let reason = parsed
        .as_ref()
        .and_then(|v| v.pointer("/error/errors/0/reason"))
        .and_then(Value::as_str);
    let message = parsed
        .as_ref()
        .and_then(|v| v.pointer("/error/message"))
        .and_then(Value::as_str)
        .unwrap_or("request failed");
    match reason {
        Some(r) if QUOTA_REASONS.contains(&r) => FetchError::Quota {
            reason: r.to_string(),
        },
        _ if status == 429 => FetchError::Quota {
            reason: "HTTP 429".into(),
        },
        _ => FetchError::Transport {
            status: Some(status),
            message: message.to_string(),
        },
    }
}

#[derive(Debug, Clone)]
struct RecordedPage {
    body: String,
    next_token: Option<String>,
    recorded_at: Option<DateTime<Utc>>,
}

/// Replays recorded pages named `sweep<k>_page<j>.json`.
///
/// Occasion `i` is served from the `i`-th sweep number in ascending order.
/// A first request gets page 1; a request carrying a token gets the page
/// that follows the one which issued that token. An optional top-level
/// `fetchedAt` (RFC 3339) in a page fixes its capture time.
#[derive(Debug)]
pub struct FixtureTransport {
    dir: PathBuf,
    sweeps: BTreeMap<u32, Vec<RecordedPage>>,
    served: usize,
}

impl FixtureTransport {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, FetchError> {
        let dir = dir.as_ref().to_path_buf();
        let entries = fs::read_dir(&dir).map_err(|e| {
            FetchError::Config(format!(
                "cannot read fixture directory {}: {e}",
                dir.display()
            ))
        })?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| FetchError::Config(e.to_string()))?;
            let name = entry.file_name();
            let Some(name) = name.to_str() else { continue };
            if parse_fixture_name(name).is_some() {
                let body = fs::read_to_string(entry.path()).map_err(|e| {
                    FetchError::Config(format!(
                        "cannot read fixture {}: {e}",
                        entry.path().display()
                    ))
                })?;
                files.push((name.to_string(), body));
            }
        }
        Self::from_files(dir, files)
    }

    /// Builds a transport from in-memory `(file name, body)` pairs named
    /// like the files [`open`](Self::open) reads. `dir` is used in messages.
    pub fn from_files(
        dir: impl Into<PathBuf>,
        files: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, FetchError> {
        let dir = dir.into();
        let mut found: BTreeMap<u32, BTreeMap<u32, (String, String)>> = BTreeMap::new();
        for (name, body) in files {
            if let Some((k, j)) = parse_fixture_name(&name) {
                found.entry(k).or_default().insert(j, (name, body));
            }
        }
        if found.is_empty() {
            return Err(FetchError::Config(format!(
                "no sweep<k>_page<j>.json files in {}",
                dir.display()
            )));
        }
        let mut sweeps = BTreeMap::new();
        for (k, pages) in found {
            let mut recorded = Vec::with_capacity(pages.len());
            for (_, (name, body)) in pages {
                recorded.push(load_page(&dir.join(name), body)?);
            }
            sweeps.insert(k, recorded);
        }
        Ok(Self {
            dir,
            sweeps,
            served: 0,
        })
    }

    pub fn sweep_count(&self) -> usize {
        self.sweeps.len()
    }

    /// Number of pages handed out so far.
    pub fn pages_served(&self) -> usize {
        self.served
    }
}

fn parse_fixture_name(name: &str) -> Option<(u32, u32)> {
    let rest = name.strip_prefix("sweep")?.strip_suffix(".json")?;
    let (k, j) = rest.split_once("_page")?;
    Some((k.parse().ok()?, j.parse().ok()?))
}

fn load_page(path: &Path, body: String) -> Result<RecordedPage, FetchError> {
    let value: Value = serde_json::from_str(&body).map_err(|e| FetchError::Parse {
        field: format!("<{}>", path.display()),
        message: e.to_string(),
    })?;
    let next_token = value
        .get("nextPageToken")
        .and_then(Value::as_str)
        .map(str::to_string);
    let recorded_at = match value.get("fetchedAt").and_then(Value::as_str) {
        Some(s) => Some(
            DateTime::parse_from_rfc3339(s)
                .map_err(|e| FetchError::Parse {
                    field: format!("<{}>.fetchedAt", path.display()),
                    message: e.to_string(),
                })?
                .with_timezone(&Utc),
        ),
        None => None,
    };
    Ok(RecordedPage {
        body,
        next_token,
        recorded_at,
    })
}

impl PageTransport for FixtureTransport {
    fn get(&mut self, query: &PageQuery) -> Result<PageResponse, FetchError> {
        let page_token = match &query.listing {
            Listing::Chart { page_token } => page_token,
            Listing::Ids(_) => {
                return Err(FetchError::Config(
                    "id lookups need the live API; recorded fixtures only replay chart sweeps"
                        .into(),
                ))
            }
        };
        let pages = query
            .occasion
            .checked_sub(1)
            .and_then(|i| self.sweeps.values().nth(i))
            .ok_or_else(|| {
                FetchError::Config(format!(
                    "occasion {} has no recorded sweep in {} ({} available)",
                    query.occasion,
                    self.dir.display(),
                    self.sweeps.len()
                ))
            })?;
        let index = match page_token {
            None => 0,
            Some(token) => {
                pages
                    .iter()
                    .position(|p| p.next_token.as_deref() == Some(token.as_str()))
                    .ok_or_else(|| FetchError::Transport {
                        status: Some(400),
                        message: format!("unknown page token {token:?}"),
                    })?
                    + 1
            }
        };
        let page = pages.get(index).ok_or_else(|| FetchError::Transport {
            status: Some(404),
            message: format!(
                "no recorded page {} for occasion {}",
                index + 1,
                query.occasion
            ),
        })?;
        self.served += 1;
        Ok(PageResponse {
            body: page.body.clone(),
            recorded_at: page.recorded_at,
        })
    }
}

/// Reads video ids separated by semicolons and/or whitespace.
pub fn read_id_list(text: &str) -> Vec<String> {
    text.split(|c: char| c == ';' || c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(occasion: usize, token: Option<&str>) -> PageQuery {
        PageQuery {
            occasion,
            region_code: "US".into(),
            page_size: 50,
            listing: Listing::Chart {
                page_token: token.map(str::to_string),
            },
        }
    }

    #[test]
    fn fixture_names() {
        assert_eq!(parse_fixture_name("sweep2_page10.json"), Some((2, 10)));
        assert_eq!(parse_fixture_name("sweep2_page1.txt"), None);
        assert_eq!(parse_fixture_name("notes.json"), None);
    }

    #[test]
    fn replays_pages_by_token() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("sweep1_page1.json"),
            r#"{"nextPageToken":"T1","items":[]}"#,
        )
        .unwrap();
        fs::write(
            dir.path().join("sweep1_page2.json"),
            r#"{"items":[],"fetchedAt":"2013-12-03T10:00:00Z"}"#,
        )
        .unwrap();
        fs::write(dir.path().join("sweep7_page1.json"), r#"{"items":[]}"#).unwrap();
        let mut t = FixtureTransport::open(dir.path()).unwrap();
        assert_eq!(t.sweep_count(), 2);
        assert!(t.get(&query(1, None)).unwrap().body.contains("T1"));
        let second = t.get(&query(1, Some("T1"))).unwrap();
        assert_eq!(
            second.recorded_at.unwrap().to_rfc3339(),
            "2013-12-03T10:00:00+00:00"
        );
        assert!(t.get(&query(2, None)).is_ok());
        assert!(matches!(t.get(&query(3, None)), Err(FetchError::Config(_))));
        assert!(matches!(
            t.get(&query(1, Some("nope"))),
            Err(FetchError::Transport { .. })
        ));
        assert_eq!(t.pages_served(), 3);
    }

    #[test]
    fn empty_fixture_dir_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            FixtureTransport::open(dir.path()),
            Err(FetchError::Config(_))
        ));
    }

    #[test]
    fn failure_classification() {
        let quota =
            r#"{"error":{"code":403,"message":"quota","errors":[{"reason":"quotaExceeded"}]}}"#;
        assert!(matches!(
            classify_failure(403, quota),
            FetchError::Quota { .. }
        ));
        assert!(matches!(
            classify_failure(429, ""),
            FetchError::Quota { .. }
        ));
        match classify_failure(500, "oops") {
            FetchError::Transport { status, .. } => assert_eq!(status, Some(500)),
            other => panic!("{other:?}"),
        }
        let forbidden = r#"{"error":{"code":403,"message":"API key not valid","errors":[{"reason":"keyInvalid"}]}}"#;
        assert!(matches!(
            classify_failure(403, forbidden),
            FetchError::Transport {
                status: Some(403),
                ..
            }
        ));
    }

    #[test]
    fn id_lists() {
        assert_eq!(read_id_list("a; b;\n c  d"), vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn limiter_spaces_requests() {
        let mut l = RateLimiter::new(Duration::from_millis(20));
        let start = Instant::now();
        l.wait();
        l.wait();
        l.wait();
        assert!(start.elapsed() >= Duration::from_millis(40));
    }
}
