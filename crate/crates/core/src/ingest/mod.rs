//! Acquiring video statistics: the trending-videos API (live or replayed
//! from recorded pages), the multi-occasion sampling protocol, and the
//! append-only snapshot store.

mod api;
mod sampling;
mod store;
mod transport;

pub use api::{category_name, parse_page, ParsedPage};
pub use sampling::{
    fetch_ids, fetch_trending_page, run_sweep, sample_trending, select_study_sample, Selection,
    Shortfall, Sweep, TrendingSample,
};
pub use store::{LineError, Loaded, ReadMode, Records, SnapshotStore, StoreError};
pub use transport::{
    read_id_list, FixtureTransport, HttpTransport, Listing, PageQuery, PageResponse, PageTransport,
    RateLimiter, DEFAULT_API_BASE,
};

use std::fmt;
use std::time::Duration;

use thiserror::Error;

/// Environment variable holding the API key.
pub const API_KEY_ENV: &str = "ENGAGE_API_KEY";

/// An API key. Never printed.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    /// Reads [`API_KEY_ENV`]; empty values count as unset.
    pub fn from_env() -> Option<Self> {
        std::env::var(API_KEY_ENV)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .map(Self)
    }

    pub(crate) fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(<redacted>)")
    }
}

/// The live API caps one page at 50 items.
pub const MAX_PAGE_SIZE: u32 = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct FetchConfig {
    pub region_code: String,
    page_size: u32,
    max_pages: u32,
    pub request_interval: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            region_code: "US".into(),
            page_size: MAX_PAGE_SIZE,
            max_pages: 4,
            request_interval: Duration::from_millis(200),
        }
    }
}

impl FetchConfig {
    pub fn new(
        region_code: impl Into<String>,
        page_size: u32,
        max_pages: u32,
        request_interval: Duration,
    ) -> Result<Self, FetchError> {
        let region_code = region_code.into();
        if region_code.len() != 2 || !region_code.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(FetchError::Config(format!(
                "region code must be two letters, got {region_code:?}"
            )));
        }
        if !(1..=MAX_PAGE_SIZE).contains(&page_size) {
            return Err(FetchError::Config(format!(
                "page size must be within 1..={MAX_PAGE_SIZE}, got {page_size}"
            )));
        }
        if max_pages == 0 {
            return Err(FetchError::Config("max pages must be at least 1".into()));
        }
        Ok(Self {
            region_code: region_code.to_ascii_uppercase(),
            page_size,
            max_pages,
            request_interval,
        })
    }

    pub fn page_size(&self) -> u32 {
        self.page_size
    }

    pub fn max_pages(&self) -> u32 {
        self.max_pages
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("transport error{}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport {
        status: Option<u16>,
        message: String,
    },
    #[error("quota exceeded ({reason}); back off before retrying")]
    Quota { reason: String },
    #[error("malformed payload: field `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("no snapshots collected after {sweeps} sweep(s)")]
    EmptySample { sweeps: usize },
}
