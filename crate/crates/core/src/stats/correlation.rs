use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::StatsError;

/// Pearson r for one pair of variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub r: f64,
    /// Two-tailed p-value of the t-test on `n - 2` degrees of freedom.
    pub p_value: Option<f64>,
    pub n: usize,
}

/// Pearson product-moment correlation over the pairs where both values are
/// defined.
///
/// Fails with `LengthMismatch` on unequal inputs, `InsufficientData` when
/// fewer than two complete pairs remain, and `UndefinedCorrelation` when
/// either remaining series is constant.
pub fn pearson(xs: &[Option<f64>], ys: &[Option<f64>]) -> Result<CorrelationCell, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let (a, b): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) if !x.is_nan() && !y.is_nan() => Some((*x, *y)),
            _ => None,
        })
        .unzip();
    pearson_complete(&a, &b)
}

/// [`pearson`] for series without missing values.
pub fn pearson_values(xs: &[f64], ys: &[f64]) -> Result<CorrelationCell, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    pearson_complete(xs, ys)
}

fn pearson_complete(xs: &[f64], ys: &[f64]) -> Result<CorrelationCell, StatsError> {
    let n = xs.len();
    if n < 2 {
        return Err(StatsError::InsufficientData { n, needed: 2 });
    }
    if is_constant(xs) || is_constant(ys) {
        return Err(StatsError::UndefinedCorrelation);
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    // sqrt of the product rather than the product of square roots: exact
    // proportional series then give |r| = 1 without rounding slack.
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(CorrelationCell {
        r,
        p_value: p_value(r, n),
        n,
    })
}

fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Two-tailed p for H0: rho = 0, via `t = r * sqrt((n-2) / (1-r^2))`.
///
/// With `df = n - 2`, `P(|T| > |t|) = I_x(df/2, 1/2)` where
/// `x = df / (df + t^2)`, which reduces to `x = 1 - r^2`.
fn p_value(r: f64, n: usize) -> Option<f64> {
    if n < 3 || r.abs() >= 1.0 {
        return None;
    }
    let df = (n - 2) as f64;
    let x = 1.0 - r * r;
    Some(beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// One named variable's observations, aligned by row with the other
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// A matrix cell: either a correlation or the reason there isn't one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MatrixEntry {
    Defined(CorrelationCell),
    Undefined { n: usize, reason: String },
}

impl MatrixEntry {
    pub fn cell(&self) -> Option<&CorrelationCell> {
        match self {
            MatrixEntry::Defined(cell) => Some(cell),
            MatrixEntry::Undefined { .. } => None,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            MatrixEntry::Defined(cell) => cell.n,
            MatrixEntry::Undefined { n, .. } => *n,
        }
    }
}

/// Symmetric matrix of pairwise correlations with pairwise deletion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub cells: Vec<Vec<MatrixEntry>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> &MatrixEntry {
        &self.cells[i][j]
    }

    pub fn entry(&self, a: &str, b: &str) -> Option<&MatrixEntry> {
        let i = self.variables.iter().position(|v| v == a)?;
        let j = self.variables.iter().position(|v| v == b)?;
        Some(self.get(i, j))
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Smallest and largest pair count over the off-diagonal cells.
    pub fn pairwise_n_range(&self) -> Option<(usize, usize)> {
        let ns = (0..self.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).n());
        ns.fold(None, |acc, n| match acc {
            None => Some((n, n)),
            Some((lo, hi)) => Some((lo.min(n), hi.max(n))),
        })
    }
}

pub fn correlation_matrix(columns: &[Column]) -> Result<CorrelationMatrix, StatsError> {
    if let Some(first) = columns.first() {
        for col in columns {
            if col.values.len() != first.values.len() {
                return Err(StatsError::LengthMismatch {
                    left: first.values.len(),
                    right: col.values.len(),
                });
            }
        }
    }
    let k = columns.len();
    let mut cells: Vec<Vec<Option<MatrixEntry>>> = vec![vec![None; k]; k];
    for i in 0..k {
        cells[i][i] = Some(diagonal(&columns[i]));
        for j in 0..i {
            let entry = to_entry(
                pearson(&columns[i].values, &columns[j].values),
                pair_count(&columns[i].values, &columns[j].values),
            );
            cells[j][i] = Some(entry.clone());
            cells[i][j] = Some(entry);
        }
    }
    Ok(CorrelationMatrix {
        variables: columns.iter().map(|c| c.name.clone()).collect(),
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.expect("filled")).collect())
            .collect(),
    })
}

fn diagonal(col: &Column) -> MatrixEntry {
    let xs: Vec<f64> = super::defined(&col.values).collect();
    let n = xs.len();
    if n < 2 {
        return to_entry(Err(StatsError::InsufficientData { n, needed: 2 }), n);
    }
    if is_constant(&xs) {
        return to_entry(Err(StatsError::UndefinedCorrelation), n);
    }
    MatrixEntry::Defined(CorrelationCell {
        r: 1.0,
        p_value: None,
        n,
    })
}

fn pair_count(xs: &[Option<f64>], ys: &[Option<f64>]) -> usize {
    xs.iter()
        .zip(ys)
        .filter(|(x, y)| x.is_some_and(|v| !v.is_nan()) && y.is_some_and(|v| !v.is_nan()))
        .count()
}

fn to_entry(result: Result<CorrelationCell, StatsError>, n: usize) -> MatrixEntry {
    match result {
        Ok(cell) => MatrixEntry::Defined(cell),
        Err(err) => MatrixEntry::Undefined {
            n,
            reason: err.to_string(),
        },
    }
}
