//! Append-only JSON Lines store of snapshots.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::metrics::{InconsistentComments, VideoStatsSnapshot};
use crate::sample::StudySample;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("snapshot store {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("snapshot store {path}, line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// Abort on the first malformed line.
    Strict,
    /// Skip malformed lines, reporting each one.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Records in write order, skipped lines, and normalization warnings.
pub type Records = (
    Vec<VideoStatsSnapshot>,
    Vec<LineError>,
    Vec<InconsistentComments>,
);

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub sample: StudySample,
    pub records_read: usize,
    pub skipped: Vec<LineError>,
    pub warnings: Vec<InconsistentComments>,
}

/// One snapshot per line, appended in write order; existing lines are never
/// rewritten.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotStore {
    path: PathBuf,
}

impl SnapshotStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io_err(&self, source: io::Error) -> StoreError {
        StoreError::Io {
            path: self.path.clone(),
            source,
        }
    }

    /// Appends one record per snapshot and returns how many were written.
    /// Writing nothing leaves the file untouched.
    pub fn append(&self, snapshots: &[VideoStatsSnapshot]) -> Result<usize, StoreError> {
        if snapshots.is_empty() {
            return Ok(0);
        }
        let mut buf = Vec::new();
        for snap in snapshots {
            serde_json::to_writer(&mut buf, snap).map_err(|e| self.io_err(e.into()))?;
            buf.push(b'\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| self.io_err(e))?;
        file.write_all(&buf).map_err(|e| self.io_err(e))?;
        file.sync_all().map_err(|e| self.io_err(e))?;
        Ok(snapshots.len())
    }

    /// Every record in write order, with comment-count normalization
    /// applied.
    pub fn read_all(&self, mode: ReadMode) -> Result<Records, StoreError> {
        let file = File::open(&self.path).map_err(|e| self.io_err(e))?;
        let mut records = Vec::new();
        let mut skipped = Vec::new();
        let mut warnings = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| self.io_err(e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<VideoStatsSnapshot>(&line) {
                Ok(snap) => {
                    let (snap, warning) = snap.normalized();
                    records.push(snap);
                    warnings.extend(warning);
                }
                Err(e) if mode == ReadMode::Lenient => skipped.push(LineError {
                    line: i + 1,
                    message: e.to_string(),
                }),
                Err(e) => {
                    return Err(StoreError::Malformed {
                        path: self.path.clone(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok((records, skipped, warnings))
    }

    /// Reads the store, keeps records accepted by `filter`, and dedups by
    /// video id keeping the latest `fetched_at`.
    pub fn load(
        &self,
        filter: Option<&dyn Fn(&VideoStatsSnapshot) -> bool>,
        mode: ReadMode,
    ) -> Result<Loaded, StoreError> {
        let (records, skipped, warnings) = self.read_all(mode)?;
        let records_read = records.len();
        let kept: Vec<VideoStatsSnapshot> = match filter {
            Some(f) => records.into_iter().filter(|s| f(s)).collect(),
            None => records,
        };
        let kept_count = kept.len();
        let mut sample = StudySample::dedup_latest(kept, String::new());
        sample.note(&format!(
            "loaded {} of {} records from {}; {} unique ids",
            kept_count,
            records_read,
            self.path.file_name().map_or_else(
                || self.path.display().to_string(),
                |n| n.to_string_lossy().into_owned()
            ),
            sample.len()
        ));
        Ok(Loaded {
            sample,
            records_read,
            skipped,
            warnings,
        })
    }
}
