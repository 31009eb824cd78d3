//! The three relative engagement metrics and the snapshot type they are
//! computed from.
//!
//! * **CpkI** (comments per thousand impressions): `comments * 1000 / views`
//! * **VpkI** (votes per thousand impressions): `(likes + dislikes) * 1000 / views`
//! * **DisP** (dislike proportion): `dislikes / (likes + dislikes)`
//!
//! Every metric is optional. A metric is absent exactly when its
//! denominator is zero or one of its inputs is unknown; absence is a data
//! condition, never an error.

use chrono::{DateTime, SubsecRound, Utc};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// One video's public counters at a fetch instant.
///
/// Serialized field names are the snapshot-file record layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoStatsSnapshot {
    pub video_id: String,
    pub fetched_at: DateTime<Utc>,
    /// Impressions.
    pub views: u64,
    pub likes: Option<u64>,
    /// Withheld by the live API since late 2021.
    pub dislikes: Option<u64>,
    pub comments: Option<u64>,
    pub comments_enabled: bool,
    pub category: String,
}

/// Emitted when a snapshot claims comments are disabled yet carries a
/// positive comment count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InconsistentComments {
    pub video_id: String,
    pub dropped_count: u64,
}

impl std::fmt::Display for InconsistentComments {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "video {}: comments disabled but count {} reported; count dropped",
            self.video_id, self.dropped_count
        )
    }
}

impl VideoStatsSnapshot {
    /// Builds a snapshot with `fetched_at` truncated to whole seconds.
    pub fn new(video_id: impl Into<String>, fetched_at: DateTime<Utc>, views: u64) -> Self {
        Self {
            video_id: video_id.into(),
            fetched_at: fetched_at.trunc_subsecs(0),
            views,
            likes: None,
            dislikes: None,
            comments: None,
            comments_enabled: true,
            category: String::new(),
        }
    }

    pub fn with_votes(mut self, likes: Option<u64>, dislikes: Option<u64>) -> Self {
        self.likes = likes;
        self.dislikes = dislikes;
        self
    }

    pub fn with_comments(mut self, comments: Option<u64>, enabled: bool) -> Self {
        self.comments = comments;
        self.comments_enabled = enabled;
        self
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = category.into();
        self
    }

    /// Enforces `comments_enabled = false => comments absent or 0`.
    ///
    /// A positive count on a comments-disabled video is replaced by absent
    /// and reported back to the caller.
    pub fn normalized(mut self) -> (Self, Option<InconsistentComments>) {
        match self.comments {
            Some(count) if !self.comments_enabled && count > 0 => {
                self.comments = None;
                let warning = InconsistentComments {
                    video_id: self.video_id.clone(),
                    dropped_count: count,
                };
                (self, Some(warning))
            }
            _ => (self, None),
        }
    }

    /// Sum of likes and dislikes, when both are known.
    pub fn votes(&self) -> Option<u64> {
        self.likes?.checked_add(self.dislikes?)
    }

    pub fn metrics(&self) -> EngagementMetrics {
        compute_metrics(self)
    }
}

/// The three derived per-video metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EngagementMetrics {
    pub cpki: Option<f64>,
    pub vpki: Option<f64>,
    pub disp: Option<f64>,
}

/// Comments per thousand impressions. Absent when `views == 0`.
pub fn compute_cpki(comments: u64, views: u64) -> Option<f64> {
    per_mille(u128::from(comments), views)
}

/// Votes per thousand impressions. Absent when `views == 0`; zero votes
/// give `0.0`.
pub fn compute_vpki(likes: u64, dislikes: u64, views: u64) -> Option<f64> {
    per_mille(u128::from(likes) + u128::from(dislikes), views)
}

/// Share of votes that are negative, in `[0, 1]`. Absent when there are no
/// votes.
pub fn compute_disp(likes: u64, dislikes: u64) -> Option<f64> {
    let total = u128::from(likes) + u128::from(dislikes);
    if total == 0 {
        return None;
    }
    Some(dislikes as f64 / total as f64)
}

fn per_mille(count: u128, views: u64) -> Option<f64> {
    if views == 0 {
        return None;
    }
    // count * 1000 stays below 2^75, well inside u128; the single f64
    // division then rounds once per operand and once for the quotient.
    Some((count * 1000) as f64 / views as f64)
}

/// All three metrics for one snapshot. DisP does not depend on views, so a
/// zero-view snapshot with votes still gets a DisP.
pub fn compute_metrics(snapshot: &VideoStatsSnapshot) -> EngagementMetrics {
    let views = snapshot.views;
    let cpki = snapshot.comments.and_then(|c| compute_cpki(c, views));
    let (vpki, disp) = match (snapshot.likes, snapshot.dislikes) {
        (Some(likes), Some(dislikes)) => (
            compute_vpki(likes, dislikes, views),
            compute_disp(likes, dislikes),
        ),
        _ => (None, None),
    };
    EngagementMetrics { cpki, vpki, disp }
}

/// Exact-rational forms of the metrics.
///
/// These share definedness rules with the floating-point functions and are
/// what round-trip checks should be written against.
pub mod exact {
    use super::Ratio;

    pub type Rate = Ratio<u128>;

    pub fn cpki(comments: u64, views: u64) -> Option<Rate> {
        (views > 0).then(|| Ratio::new(u128::from(comments) * 1000, u128::from(views)))
    }

    pub fn vpki(likes: u64, dislikes: u64, views: u64) -> Option<Rate> {
        let votes = u128::from(likes) + u128::from(dislikes);
        (views > 0).then(|| Ratio::new(votes * 1000, u128::from(views)))
    }

    pub fn disp(likes: u64, dislikes: u64) -> Option<Rate> {
        let total = u128::from(likes) + u128::from(dislikes);
        (total > 0).then(|| Ratio::new(u128::from(dislikes), total))
    }
}
