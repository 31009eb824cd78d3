use serde::{Deserialize, Serialize};

use super::{defined, StatsError};

/// Bin edges with optional display labels.
///
/// Bins are left-closed and right-open except the last, which is closed on
/// both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBinSpec")]
pub struct BinSpec {
    edges: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawBinSpec {
    edges: Vec<f64>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawBinSpec> for BinSpec {
    type Error = StatsError;

    fn try_from(raw: RawBinSpec) -> Result<Self, Self::Error> {
        BinSpec::new(raw.edges, raw.labels)
    }
}

impl BinSpec {
    pub fn new(edges: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self, StatsError> {
        if edges.len() < 2 {
            return Err(StatsError::InvalidBins(format!(
                "need at least 2 edges, got {}",
                edges.len()
            )));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(StatsError::InvalidBins("edges must be finite".into()));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StatsError::InvalidBins(
                "edges must be strictly increasing".into(),
            ));
        }
        if let Some(labels) = &labels {
            if labels.len() != edges.len() - 1 {
                return Err(StatsError::InvalidBins(format!(
                    "{} labels for {} bins",
                    labels.len(),
                    edges.len() - 1
                )));
            }
        }
        Ok(Self { edges, labels })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bin_count(&self) -> usize {
        self.edges.len() - 1
    }

    /// Display label of bin `i`; `"lo-hi"` when none was supplied.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => format!("{}-{}", self.edges[i], self.edges[i + 1]),
        }
    }

    fn locate(&self, x: f64) -> Slot {
        let first = self.edges[0];
        let last = self.edges[self.edges.len() - 1];
        if x < first {
            Slot::Under
        } else if x > last {
            Slot::Over
        } else if x == last {
            Slot::Bin(self.bin_count() - 1)
        } else {
            Slot::Bin(self.edges.partition_point(|&e| e <= x) - 1)
        }
    }
}

enum Slot {
    Under,
    Bin(usize),
    Over,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinCount {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Bin frequencies plus out-of-range buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<BinCount>,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum::<usize>() + self.underflow + self.overflow
    }

    /// Label of the most populated regular bin (lowest on ties), or `None`
    /// when every regular bin is empty.
    pub fn mode_label(&self) -> Option<String> {
        let mut best: Option<&BinCount> = None;
        for bin in &self.bins {
            if bin.count > best.map_or(0, |b| b.count) {
                best = Some(bin);
            }
        }
        best.map(|b| b.label.clone())
    }

    pub fn lowest_edge(&self) -> f64 {
        self.bins.first().map_or(0.0, |b| b.lower)
    }

    pub fn highest_edge(&self) -> f64 {
        self.bins.last().map_or(0.0, |b| b.upper)
    }
}

pub fn histogram(values: &[Option<f64>], bins: &BinSpec) -> Histogram {
    let mut counts = vec![0usize; bins.bin_count()];
    let (mut underflow, mut overflow) = (0, 0);
    for x in defined(values) {
        match bins.locate(x) {
            Slot::Under => underflow += 1,
            Slot::Over => overflow += 1,
            Slot::Bin(i) => counts[i] += 1,
        }
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| BinCount {
            label: bins.label(i),
            lower: bins.edges[i],
            upper: bins.edges[i + 1],
            count,
        })
        .collect();
    Histogram {
        bins,
        underflow,
        overflow,
    }
}
