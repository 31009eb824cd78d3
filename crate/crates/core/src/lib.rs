//! Relative audience-engagement metrics for online video statistics.

pub mod cli;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod sample;
pub mod stats;

pub use metrics::{
    compute_cpki, compute_disp, compute_metrics, compute_vpki, EngagementMetrics,
    VideoStatsSnapshot,
};
pub use sample::StudySample;
