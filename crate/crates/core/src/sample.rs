use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::metrics::VideoStatsSnapshot;

/// An ordered collection of snapshots, unique by `video_id`, plus a note on
/// how it was selected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StudySample {
    snapshots: Vec<VideoStatsSnapshot>,
    pub selection_note: String,
}

impl StudySample {
    /// Collapses `snapshots` to one record per video, keeping the one with
    /// the latest `fetched_at`. Equal timestamps resolve to the record seen
    /// last. Videos keep the position of their first appearance.
    pub fn dedup_latest<I>(snapshots: I, selection_note: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = VideoStatsSnapshot>,
    {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut kept: Vec<VideoStatsSnapshot> = Vec::new();
        for snap in snapshots {
            match index.get(&snap.video_id) {
                Some(&i) => {
                    if snap.fetched_at >= kept[i].fetched_at {
                        kept[i] = snap;
                    }
                }
                None => {
                    index.insert(snap.video_id.clone(), kept.len());
                    kept.push(snap);
                }
            }
        }
        Self {
            snapshots: kept,
            selection_note: selection_note.into(),
        }
    }

    pub fn snapshots(&self) -> &[VideoStatsSnapshot] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<VideoStatsSnapshot> {
        self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VideoStatsSnapshot> {
        self.snapshots.iter()
    }

    /// Appends a clause to the selection note.
    pub fn note(&mut self, clause: &str) {
        if !self.selection_note.is_empty() {
            self.selection_note.push_str("; ");
        }
        self.selection_note.push_str(clause);
    }

    /// Keeps the snapshots for which `keep` returns true, preserving order.
    pub(crate) fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> Vec<VideoStatsSnapshot> {
        self.snapshots
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Builds a sample from snapshots already known to be unique.
    pub(crate) fn from_unique(snapshots: Vec<VideoStatsSnapshot>, selection_note: String) -> Self {
        debug_assert!({
            let mut ids: Vec<_> = snapshots.iter().map(|s| &s.video_id).collect();
            ids.sort();
            ids.windows(2).all(|w| w[0] != w[1])
        });
        Self {
            snapshots,
            selection_note,
        }
    }
}

impl<'a> IntoIterator for &'a StudySample {
    type Item = &'a VideoStatsSnapshot;
    type IntoIter = std::slice::Iter<'a, VideoStatsSnapshot>;

    fn into_iter(self) -> Self::IntoIter {
        self.snapshots.iter()
    }
}
