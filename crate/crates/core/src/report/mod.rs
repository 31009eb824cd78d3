//! Turning a study sample into report tables and rendering them.
//!
//! A [`ReportBundle`] holds everything a report shows: descriptive tables
//! for the basic counters and the three metrics, correlation matrices for
//! the full sample and for its top three view quartiles, per-metric bin
//! frequencies, the category table, and provenance. Bundles serialize to
//! JSON losslessly so rendering can run separately from analysis.

mod format;
mod plot;
mod render;

pub use format::{
    format_corr_cell, format_count, format_percent, format_r, is_moderate, significance_stars,
};
pub use plot::{render_histogram_plot, PlotStyle, MAX_BAR_WIDTH};
pub use render::{render, Format};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::VideoStatsSnapshot;
use crate::sample::StudySample;
use crate::stats::{
    category_counts, correlation_matrix, histogram, quartile_filter, summarize, BinSpec,
    CategoryCount, Column, CorrelationMatrix, Histogram, MatrixEntry, Quartiles, SampleSummary,
    Variable,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot build a report from an empty sample")]
    EmptySample,
}

/// Per-metric bin edges for the frequency tables.
///
/// The defaults are approximations chosen to put round per-mille and
/// percentage values on bin edges; override them from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricBins {
    pub cpki: BinSpec,
    pub vpki: BinSpec,
    pub disp: BinSpec,
}

impl Default for MetricBins {
    fn default() -> Self {
        let spec = |edges: Vec<f64>, labels: Option<Vec<&str>>| {
            BinSpec::new(
                edges,
                labels.map(|l| l.into_iter().map(String::from).collect()),
            )
            .expect("default bins are valid")
        };
        Self {
            cpki: spec(vec![0.0, 0.2, 0.6, 1.0, 2.0, 4.0, 8.0, 16.0], None),
            vpki: spec(vec![0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0], None),
            disp: spec(
                vec![0.0, 0.04, 0.08, 0.16, 0.32, 0.64, 1.0],
                Some(vec!["0-4%", "4-8%", "8-16%", "16-32%", "32-64%", "64-100%"]),
            ),
        }
    }
}

impl MetricBins {
    pub fn for_metric(&self, metric: Variable) -> Option<&BinSpec> {
        match metric {
            Variable::Cpki => Some(&self.cpki),
            Variable::Vpki => Some(&self.vpki),
            Variable::Disp => Some(&self.disp),
            _ => None,
        }
    }
}

pub const BASIC_VARIABLES: [Variable; 3] = [Variable::Views, Variable::Comments, Variable::Votes];
pub const METRIC_VARIABLES: [Variable; 3] = [Variable::Cpki, Variable::Vpki, Variable::Disp];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSummary {
    pub variable: String,
    pub summary: SampleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    /// Rows in the (sub)sample the matrix was computed over.
    pub sample_size: usize,
    pub matrix: CorrelationMatrix,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedHistogram {
    pub variable: String,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sample_size: usize,
    pub selection_note: String,
    pub fetched_from: Option<DateTime<Utc>>,
    pub fetched_to: Option<DateTime<Utc>>,
    pub coverage_notes: Vec<String>,
}

/// One video's counters and metrics as they entered the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRow {
    pub video_id: String,
    pub fetched_at: DateTime<Utc>,
    pub category: String,
    pub views: u64,
    pub likes: Option<u64>,
    pub dislikes: Option<u64>,
    pub comments: Option<u64>,
    pub cpki: Option<f64>,
    pub vpki: Option<f64>,
    pub disp: Option<f64>,
}

impl VideoRow {
    fn from_snapshot(s: &VideoStatsSnapshot) -> Self {
        let m = s.metrics();
        Self {
            video_id: s.video_id.clone(),
            fetched_at: s.fetched_at,
            category: s.category.clone(),
            views: s.views,
            likes: s.likes,
            dislikes: s.dislikes,
            comments: s.comments,
            cpki: m.cpki,
            vpki: m.vpki,
            disp: m.disp,
        }
    }

    fn metric(&self, v: Variable) -> Option<f64> {
        match v {
            Variable::Cpki => self.cpki,
            Variable::Vpki => self.vpki,
            Variable::Disp => self.disp,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub summary_basic: Vec<NamedSummary>,
    pub summary_metrics: Vec<NamedSummary>,
    pub corr_full: CorrelationTable,
    pub corr_upper_quartiles: CorrelationTable,
    pub bins: MetricBins,
    pub histograms: Vec<NamedHistogram>,
    pub categories: Vec<CategoryCount>,
    pub rows: Vec<VideoRow>,
}

/// Runs the whole analysis over `sample`. Statistical failures become
/// notes on the affected table; only an empty sample is refused.
pub fn build_report(sample: &StudySample, bins: &MetricBins) -> Result<ReportBundle, ReportError> {
    if sample.is_empty() {
        return Err(ReportError::EmptySample);
    }
    let n = sample.len();

    let summary_basic = BASIC_VARIABLES
        .iter()
        .map(|&v| NamedSummary {
            variable: v.name().into(),
            summary: summarize(&v.column(sample), None),
        })
        .collect();
    let summary_metrics = METRIC_VARIABLES
        .iter()
        .map(|&v| NamedSummary {
            variable: v.name().into(),
            summary: summarize(&v.column(sample), bins.for_metric(v)),
        })
        .collect();
    let histograms = METRIC_VARIABLES
        .iter()
        .map(|&v| NamedHistogram {
            variable: v.name().into(),
            histogram: histogram(&v.column(sample), bins.for_metric(v).expect("metric")),
        })
        .collect();

    let corr_full = correlation_table(sample, Vec::new());
    let corr_upper_quartiles = match quartile_filter(sample, Variable::Views, Quartiles::TOP_THREE)
    {
        Ok(upper) => correlation_table(
            &upper,
            vec![format!(
                "top three quartiles by views: {} of {} videos (lowest {} dropped by rank)",
                upper.len(),
                n,
                n / 4
            )],
        ),
        Err(e) => {
            let mut table = correlation_table(&StudySample::default(), Vec::new());
            table.notes.push(format!("quartile split failed: {e}"));
            table
        }
    };

    let fetched_from = sample.iter().map(|s| s.fetched_at).min();
    let fetched_to = sample.iter().map(|s| s.fetched_at).max();
    let provenance = Provenance {
        sample_size: n,
        selection_note: sample.selection_note.clone(),
        fetched_from,
        fetched_to,
        coverage_notes: coverage_notes(sample),
    };

    Ok(ReportBundle {
        provenance,
        summary_basic,
        summary_metrics,
        corr_full,
        corr_upper_quartiles,
        bins: bins.clone(),
        histograms,
        categories: category_counts(sample),
        rows: sample.iter().map(VideoRow::from_snapshot).collect(),
    })
}

fn correlation_table(sample: &StudySample, mut notes: Vec<String>) -> CorrelationTable {
    let columns: Vec<Column> = Variable::CORRELATED
        .iter()
        .map(|&v| Column::new(v.name(), v.column(sample)))
        .collect();
    let matrix = correlation_matrix(&columns).expect("columns come from one sample");
    let n = sample.len();
    if n < 3 {
        notes.push(format!(
            "insufficient n ({n}): correlations need at least 3 videos for a significance test"
        ));
    }
    if let Some((lo, hi)) = matrix.pairwise_n_range() {
        if lo != hi {
            notes.push(format!(
                "pairwise deletion: cell n ranges from {lo} to {hi}"
            ));
        }
    }
    if n >= 3 {
        let undefined = |i: usize, j: usize| match matrix.get(i, j) {
            MatrixEntry::Undefined { n, reason } => Some((*n, reason.clone())),
            MatrixEntry::Defined(_) => None,
        };
        for i in 0..matrix.len() {
            if let Some((n, reason)) = undefined(i, i) {
                notes.push(format!("{}: {reason} (n = {n})", matrix.variables[i]));
            }
        }
        for i in 0..matrix.len() {
            for j in 0..i {
                if undefined(i, i).is_some() || undefined(j, j).is_some() {
                    continue;
                }
                if let Some((n, reason)) = undefined(i, j) {
                    notes.push(format!(
                        "{} x {}: {reason} (n = {n})",
                        matrix.variables[i], matrix.variables[j]
                    ));
                }
            }
        }
    }
    CorrelationTable {
        sample_size: n,
        matrix,
        notes,
    }
}

fn coverage_notes(sample: &StudySample) -> Vec<String> {
    let n = sample.len();
    let mut notes = Vec::new();
    let missing = |f: fn(&VideoStatsSnapshot) -> bool| sample.iter().filter(|s| f(s)).count();

    let no_dislikes = missing(|s| s.dislikes.is_none());
    if no_dislikes > 0 {
        notes.push(format!(
            "dislike counts absent for {no_dislikes} of {n} videos; VpkI, DisP and Votes (sum) are undefined for them"
        ));
    }
    let no_likes = missing(|s| s.likes.is_none() && s.dislikes.is_some());
    if no_likes > 0 {
        notes.push(format!("like counts absent for {no_likes} of {n} videos"));
    }
    let no_comments = missing(|s| s.comments.is_none());
    if no_comments > 0 {
        notes.push(format!(
            "comment counts absent for {no_comments} of {n} videos; CpkI is undefined for them"
        ));
    }
    let zero_views = missing(|s| s.views == 0);
    if zero_views > 0 {
        notes.push(format!(
            "{zero_views} of {n} videos have zero views; CpkI and VpkI are undefined for them"
        ));
    }
    let no_votes = missing(|s| s.votes() == Some(0));
    if no_votes > 0 {
        notes.push(format!(
            "{no_votes} of {n} videos have no votes; DisP is undefined for them"
        ));
    }
    notes
}

impl ReportBundle {
    /// Recomputes the frequency tables and bin modes with new bins.
    pub fn rebin(&mut self, bins: &MetricBins) {
        for (named, summary) in self
            .histograms
            .iter_mut()
            .zip(self.summary_metrics.iter_mut())
        {
            let Some(v) = METRIC_VARIABLES
                .iter()
                .copied()
                .find(|v| v.name() == named.variable)
            else {
                continue;
            };
            let spec = bins.for_metric(v).expect("metric");
            let values: Vec<Option<f64>> = self.rows.iter().map(|r| r.metric(v)).collect();
            named.histogram = histogram(&values, spec);
            summary.summary.bin_mode = named.histogram.mode_label();
        }
        self.bins = bins.clone();
    }

    pub fn histogram(&self, variable: Variable) -> Option<&Histogram> {
        self.histograms
            .iter()
            .find(|h| h.variable == variable.name())
            .map(|h| &h.histogram)
    }
}

pub(crate) fn timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}
