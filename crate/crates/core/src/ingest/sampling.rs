//! The sampling protocol: repeated sweeps of the trending chart, unioned
//! and deduplicated, then narrowed to the most-viewed commentable videos.

use chrono::{DateTime, SecondsFormat, Utc};

use super::api::{parse_page, ParsedPage};
use super::transport::{Listing, PageQuery, PageTransport};
use super::{FetchConfig, FetchError};
use crate::metrics::{InconsistentComments, VideoStatsSnapshot};
use crate::sample::StudySample;

/// Fetches and parses one chart page. Snapshots are stamped with the
/// page's recorded capture time when it has one, else with `now()`.
pub fn fetch_trending_page<T: PageTransport + ?Sized>(
    transport: &mut T,
    config: &FetchConfig,
    occasion: usize,
    page_token: Option<String>,
    now: &dyn Fn() -> DateTime<Utc>,
) -> Result<ParsedPage, FetchError> {
    let query = PageQuery {
        occasion,
        region_code: config.region_code.clone(),
        page_size: config.page_size(),
        listing: Listing::Chart { page_token },
    };
    let response = transport.get(&query)?;
    let fetched_at = response.recorded_at.unwrap_or_else(now);
    parse_page(&response.body, fetched_at)
}

/// Everything one pass over the chart returned.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub occasion: usize,
    pub pages: usize,
    pub snapshots: Vec<VideoStatsSnapshot>,
    pub warnings: Vec<InconsistentComments>,
}

impl Sweep {
    /// Capture time of the sweep's first snapshot.
    pub fn started_at(&self) -> Option<DateTime<Utc>> {
        self.snapshots.iter().map(|s| s.fetched_at).min()
    }
}

/// Follows page tokens until the chart ends or `max_pages` is reached.
/// Pages are requested strictly in sequence.
pub fn run_sweep<T: PageTransport + ?Sized>(
    transport: &mut T,
    config: &FetchConfig,
    occasion: usize,
    now: &dyn Fn() -> DateTime<Utc>,
) -> Result<Sweep, FetchError> {
    let mut sweep = Sweep {
        occasion,
        pages: 0,
        snapshots: Vec::new(),
        warnings: Vec::new(),
    };
    let mut token = None;
    while sweep.pages < config.max_pages() as usize {
        let page = fetch_trending_page(transport, config, occasion, token.take(), now)?;
        sweep.pages += 1;
        sweep.snapshots.extend(page.snapshots);
        sweep.warnings.extend(page.warnings);
        match page.next_token {
            Some(next) => token = Some(next),
            None => break,
        }
    }
    Ok(sweep)
}

/// Result of a multi-occasion sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendingSample {
    pub sample: StudySample,
    pub sweeps: Vec<Sweep>,
}

impl TrendingSample {
    pub fn pages(&self) -> usize {
        self.sweeps.iter().map(|s| s.pages).sum()
    }

    /// Every snapshot from every sweep, in fetch order.
    pub fn all_snapshots(&self) -> impl Iterator<Item = &VideoStatsSnapshot> {
        self.sweeps.iter().flat_map(|s| s.snapshots.iter())
    }

    pub fn snapshot_count(&self) -> usize {
        self.sweeps.iter().map(|s| s.snapshots.len()).sum()
    }
}

/// Runs `occasions` sweeps and unions them, keeping the latest snapshot of
/// each video (later sweeps win ties).
pub fn sample_trending<T: PageTransport + ?Sized>(
    transport: &mut T,
    config: &FetchConfig,
    occasions: usize,
    now: &dyn Fn() -> DateTime<Utc>,
) -> Result<TrendingSample, FetchError> {
    if occasions == 0 {
        return Err(FetchError::Config(
            "at least one occasion is required".into(),
        ));
    }
    let mut sweeps = Vec::with_capacity(occasions);
    for occasion in 1..=occasions {
        sweeps.push(run_sweep(transport, config, occasion, now)?);
    }
    let total: usize = sweeps.iter().map(|s| s.snapshots.len()).sum();
    if total == 0 {
        return Err(FetchError::EmptySample { sweeps: occasions });
    }
    let stamps: Vec<String> = sweeps
        .iter()
        .filter_map(Sweep::started_at)
        .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
        .collect();
    let mut sample = StudySample::dedup_latest(
        sweeps.iter().flat_map(|s| s.snapshots.iter().cloned()),
        String::new(),
    );
    sample.note(&format!(
        "{} sweep(s) [{}] in region {}; {} snapshots, {} unique ids",
        occasions,
        stamps.join(", "),
        config.region_code,
        total,
        sample.len()
    ));
    Ok(TrendingSample { sample, sweeps })
}

/// Looks up explicit video ids in batches of `page_size`, as one sweep.
///
/// Statistics come back as they are today, so re-querying an old id list
/// does not reproduce the counters it was originally sampled with.
pub fn fetch_ids<T: PageTransport + ?Sized>(
    transport: &mut T,
    config: &FetchConfig,
    ids: &[String],
    now: &dyn Fn() -> DateTime<Utc>,
) -> Result<Sweep, FetchError> {
    let mut sweep = Sweep {
        occasion: 1,
        pages: 0,
        snapshots: Vec::new(),
        warnings: Vec::new(),
    };
    for batch in ids.chunks(config.page_size() as usize) {
        let query = PageQuery {
            occasion: 1,
            region_code: config.region_code.clone(),
            page_size: config.page_size(),
            listing: Listing::Ids(batch.to_vec()),
        };
        let response = transport.get(&query)?;
        let page = parse_page(&response.body, response.recorded_at.unwrap_or_else(now))?;
        sweep.pages += 1;
        sweep.snapshots.extend(page.snapshots);
        sweep.warnings.extend(page.warnings);
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shortfall {
    pub requested: usize,
    pub available: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub sample: StudySample,
    /// Set when fewer than the requested number of videos were eligible.
    pub shortfall: Option<Shortfall>,
}

/// Keeps comment-enabled videos, ordered by views descending (ties by
/// `video_id` ascending), truncated to `n`.
pub fn select_study_sample(candidates: &StudySample, n: usize) -> Selection {
    let mut eligible: Vec<VideoStatsSnapshot> = candidates
        .iter()
        .filter(|s| s.comments_enabled)
        .cloned()
        .collect();
    eligible.sort_by(|a, b| {
        b.views
            .cmp(&a.views)
            .then_with(|| a.video_id.cmp(&b.video_id))
    });
    let available = eligible.len();
    eligible.truncate(n);
    let shortfall = (available < n).then_some(Shortfall {
        requested: n,
        available,
    });
    let mut sample = StudySample::from_unique(eligible, candidates.selection_note.clone());
    sample.note(&format!(
        "top {} of {} comment-enabled videos by views ({} candidates)",
        sample.len(),
        available,
        candidates.len()
    ));
    Selection { sample, shortfall }
}
