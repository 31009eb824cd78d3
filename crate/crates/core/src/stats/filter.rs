use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::metrics::VideoStatsSnapshot;
use crate::sample::StudySample;

/// A per-video variable that can be tabulated, correlated or ranked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Cpki,
    Vpki,
    Disp,
    Views,
    Likes,
    Dislikes,
    Comments,
    Votes,
}

impl Variable {
    /// Column order of the correlation tables.
    pub const CORRELATED: [Variable; 8] = [
        Variable::Cpki,
        Variable::Vpki,
        Variable::Disp,
        Variable::Views,
        Variable::Likes,
        Variable::Dislikes,
        Variable::Comments,
        Variable::Votes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Cpki => "CpkI",
            Variable::Vpki => "VpkI",
            Variable::Disp => "DisP",
            Variable::Views => "Views",
            Variable::Likes => "Votes+",
            Variable::Dislikes => "Votes-",
            Variable::Comments => "Comments",
            Variable::Votes => "Votes (sum)",
        }
    }

    pub fn value(self, s: &VideoStatsSnapshot) -> Option<f64> {
        let count = |c: Option<u64>| c.map(|c| c as f64);
        match self {
            Variable::Cpki => s.metrics().cpki,
            Variable::Vpki => s.metrics().vpki,
            Variable::Disp => s.metrics().disp,
            Variable::Views => Some(s.views as f64),
            Variable::Likes => count(s.likes),
            Variable::Dislikes => count(s.dislikes),
            Variable::Comments => count(s.comments),
            Variable::Votes => count(s.votes()),
        }
    }

    pub fn column(self, sample: &StudySample) -> Vec<Option<f64>> {
        sample.iter().map(|s| self.value(s)).collect()
    }
}

/// A set of rank quartiles, Q1 being the lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quartiles([bool; 4]);

impl Quartiles {
    pub const ALL: Quartiles = Quartiles([true; 4]);
    pub const TOP_THREE: Quartiles = Quartiles([false, true, true, true]);

    /// `quartiles` are 1-based; out-of-range entries are ignored.
    pub fn of(quartiles: &[usize]) -> Self {
        let mut set = [false; 4];
        for &q in quartiles {
            if (1..=4).contains(&q) {
                set[q - 1] = true;
            }
        }
        Quartiles(set)
    }

    pub fn contains(self, quartile: usize) -> bool {
        (1..=4).contains(&quartile) && self.0[quartile - 1]
    }

    fn describe(self) -> String {
        let qs: Vec<String> = (1..=4)
            .filter(|&q| self.contains(q))
            .map(|q| format!("Q{q}"))
            .collect();
        qs.join(",")
    }
}

/// Rank-based quartile split.
///
/// Members are ranked ascending by `key` (ties by `video_id` ascending);
/// rank `i` of `n` lies in quartile `k` when
/// `floor((k-1)n/4) <= i < floor(kn/4)`. Keeping the top three quartiles
/// therefore drops exactly `floor(n/4)` members. Retained members keep
/// their original order.
pub fn quartile_filter(
    sample: &StudySample,
    key: Variable,
    keep: Quartiles,
) -> Result<StudySample, StatsError> {
    let n = sample.len();
    let mut keyed = Vec::with_capacity(n);
    for (i, snap) in sample.iter().enumerate() {
        let k = key
            .value(snap)
            .filter(|v| !v.is_nan())
            .ok_or_else(|| StatsError::UndefinedKey(snap.video_id.clone()))?;
        keyed.push((k, &snap.video_id, i));
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    let mut quartile_of = vec![0usize; n];
    for (rank, &(_, _, idx)) in keyed.iter().enumerate() {
        quartile_of[idx] = (1..=4).find(|&q| rank < q * n / 4).unwrap_or(4);
    }

    let kept = sample.retain_indices(|i| keep.contains(quartile_of[i]));
    let mut out = StudySample::from_unique(kept, sample.selection_note.clone());
    if keep != Quartiles::ALL {
        let clause = format!(
            "kept quartiles {} by {} ({} of {n})",
            keep.describe(),
            key.name(),
            out.len()
        );
        out.note(&clause);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: String,
    pub count: usize,
}

/// Category frequencies, most frequent first, then alphabetical.
pub fn category_counts(sample: &StudySample) -> Vec<CategoryCount> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for snap in sample {
        *counts.entry(snap.category.as_str()).or_default() += 1;
    }
    let mut out: Vec<CategoryCount> = counts
        .into_iter()
        .map(|(category, count)| CategoryCount {
            category: category.to_string(),
            count,
        })
        .collect();
    out.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.category.cmp(&b.category))
    });
    out
}
