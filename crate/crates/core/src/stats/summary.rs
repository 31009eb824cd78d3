use serde::{Deserialize, Serialize};

use super::{binning::histogram, defined, BinSpec};

/// Descriptive statistics of one variable over a sample.
///
/// `n` counts defined observations. Everything else is absent when it
/// cannot be computed: all of them at `n = 0`, `std_dev` below two
/// observations, `skewness` below three, `kurtosis` below four, and both
/// shape statistics for a constant series.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub skewness: Option<f64>,
    /// Excess kurtosis.
    pub kurtosis: Option<f64>,
    pub bin_mode: Option<String>,
}

/// Summarizes the defined entries of `values`.
///
/// Uses the sample (n - 1) standard deviation, the adjusted Fisher-Pearson
/// skewness `G1 = n / ((n-1)(n-2)) * sum(((x - mean) / s)^3)` and the
/// small-sample excess kurtosis
/// `G2 = n(n+1) / ((n-1)(n-2)(n-3)) * sum(((x - mean) / s)^4) - 3(n-1)^2 / ((n-2)(n-3))`.
/// The bin mode is the label of the most populated regular bin; ties go to
/// the lowest bin.
pub fn summarize(values: &[Option<f64>], bins: Option<&BinSpec>) -> SampleSummary {
    let xs: Vec<f64> = defined(values).collect();
    let n = xs.len();
    if n == 0 {
        return SampleSummary::default();
    }

    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bin_mode = bins.and_then(|spec| histogram(values, spec).mode_label());

    if min == max {
        return SampleSummary {
            n,
            mean: Some(min),
            std_dev: (n >= 2).then_some(0.0),
            min: Some(min),
            max: Some(max),
            skewness: None,
            kurtosis: None,
            bin_mode,
        };
    }

    let nf = n as f64;
    let mean = (xs.iter().sum::<f64>() / nf).clamp(min, max);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in &xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }

    let var = m2 / (nf - 1.0);
    let sd = var.sqrt();
    let skewness = (n >= 3).then(|| nf / ((nf - 1.0) * (nf - 2.0)) * m3 / (var * sd));
    let kurtosis = (n >= 4).then(|| {
        let lead = nf * (nf + 1.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
        let tail = 3.0 * (nf - 1.0).powi(2) / ((nf - 2.0) * (nf - 3.0));
        lead * m4 / (var * var) - tail
    });

    SampleSummary {
        n,
        mean: Some(mean),
        std_dev: Some(sd),
        min: Some(min),
        max: Some(max),
        skewness,
        kurtosis,
        bin_mode,
    }
}
