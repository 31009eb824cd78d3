use std::io::{self, Write};
use std::str::FromStr;

use super::format::{format_corr_cell, format_count, format_percent};
use super::{timestamp, CorrelationTable, NamedSummary, ReportBundle};
use crate::stats::{Histogram, MatrixEntry, SampleSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Markdown => "md",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

/// Writes `bundle` in `format`. Output depends only on the bundle.
pub fn render(bundle: &ReportBundle, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Markdown => markdown(bundle, out),
        Format::Csv => csv_sections(bundle, out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, bundle)?;
            out.write_all(b"\n")
        }
    }
}

// ---------------------------------------------------------------------------
// Markdown
// ---------------------------------------------------------------------------

fn markdown(b: &ReportBundle, out: &mut dyn Write) -> io::Result<()> {
    let p = &b.provenance;
    writeln!(out, "# Engagement report")?;
    writeln!(out)?;
    writeln!(out, "- Sample: {} videos", p.sample_size)?;
    writeln!(out, "- Selection: {}", p.selection_note)?;
    if let (Some(from), Some(to)) = (&p.fetched_from, &p.fetched_to) {
        writeln!(out, "- Fetched: {} to {}", timestamp(from), timestamp(to))?;
    }
    for note in &p.coverage_notes {
        writeln!(out, "- Coverage: {note}")?;
    }
    writeln!(out)?;

    writeln!(out, "## Descriptive statistics: basic counters")?;
    writeln!(out)?;
    basic_table(&b.summary_basic, out)?;
    writeln!(out)?;

    writeln!(out, "## Descriptive statistics: engagement metrics")?;
    writeln!(out)?;
    metric_table(&b.summary_metrics, out)?;
    writeln!(out)?;

    writeln!(
        out,
        "## Correlations: full sample (N={})",
        b.corr_full.sample_size
    )?;
    writeln!(out)?;
    corr_table(&b.corr_full, out)?;
    writeln!(out)?;

    writeln!(
        out,
        "## Correlations: top three quartiles of views (N={})",
        b.corr_upper_quartiles.sample_size
    )?;
    writeln!(out)?;
    corr_table(&b.corr_upper_quartiles, out)?;
    writeln!(out)?;

    writeln!(out, "## Bin frequencies")?;
    for h in &b.histograms {
        writeln!(out)?;
        writeln!(out, "### {}", h.variable)?;
        writeln!(out)?;
        histogram_table(&h.histogram, out)?;
    }
    writeln!(out)?;

    writeln!(out, "## Categories")?;
    writeln!(out)?;
    writeln!(out, "| Category | Frequency |")?;
    writeln!(out, "|---|---:|")?;
    for c in &b.categories {
        writeln!(out, "| {} | {} |", escape_cell(&c.category), c.count)?;
    }
    Ok(())
}

fn header(names: &[&str], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "| | {} |", names.join(" | "))?;
    let aligns: Vec<&str> = names.iter().map(|_| "---:").collect();
    writeln!(out, "|---|{}|", aligns.join("|"))
}

fn row(label: &str, cells: &[String], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "| {label} | {} |", cells.join(" | "))
}

fn opt(x: Option<f64>, f: impl Fn(f64) -> String) -> String {
    x.map_or_else(|| "n/a".to_string(), f)
}

fn basic_table(summaries: &[NamedSummary], out: &mut dyn Write) -> io::Result<()> {
    let names: Vec<&str> = summaries.iter().map(|s| s.variable.as_str()).collect();
    header(&names, out)?;
    let cells = |f: &dyn Fn(&SampleSummary) -> String| -> Vec<String> {
        summaries.iter().map(|s| f(&s.summary)).collect()
    };
    row("N", &cells(&|s| s.n.to_string()), out)?;
    row(
        "Mean",
        &cells(&|s| opt(s.mean, |x| format_count(x, 1))),
        out,
    )?;
    row(
        "Std. Dev.",
        &cells(&|s| opt(s.std_dev, |x| format_count(x, 1))),
        out,
    )?;
    row(
        "Minimum",
        &cells(&|s| opt(s.min, |x| format_count(x, 0))),
        out,
    )?;
    row(
        "Maximum",
        &cells(&|s| opt(s.max, |x| format_count(x, 0))),
        out,
    )
}

fn metric_table(summaries: &[NamedSummary], out: &mut dyn Write) -> io::Result<()> {
    let names: Vec<&str> = summaries.iter().map(|s| s.variable.as_str()).collect();
    header(&names, out)?;
    // DisP is a proportion and reads as a percentage
    let value = |name: &str, x: f64| {
        if name == "DisP" {
            format_percent(x)
        } else {
            format!("{x:.3}")
        }
    };
    let cells = |f: &dyn Fn(&str, &SampleSummary) -> String| -> Vec<String> {
        summaries
            .iter()
            .map(|s| f(&s.variable, &s.summary))
            .collect()
    };
    let shape = |x: Option<f64>| opt(x, |v| format!("{v:.3}"));
    row("Valid N", &cells(&|_, s| s.n.to_string()), out)?;
    row("Mean", &cells(&|n, s| opt(s.mean, |x| value(n, x))), out)?;
    row(
        "Std. Dev.",
        &cells(&|n, s| opt(s.std_dev, |x| value(n, x))),
        out,
    )?;
    row(
        "Bin Mode",
        &cells(&|_, s| s.bin_mode.as_deref().map_or("n/a".into(), escape_cell)),
        out,
    )?;
    row("Skewness", &cells(&|_, s| shape(s.skewness)), out)?;
    row("Kurtosis", &cells(&|_, s| shape(s.kurtosis)), out)?;
    row("Minimum", &cells(&|n, s| opt(s.min, |x| value(n, x))), out)?;
    row("Maximum", &cells(&|n, s| opt(s.max, |x| value(n, x))), out)
}

/// Lower triangle: rows from the second variable on, columns up to the
/// second-to-last, with the diagonal shown as 1.
fn corr_table(table: &CorrelationTable, out: &mut dyn Write) -> io::Result<()> {
    let m = &table.matrix;
    let k = m.len();
    if k >= 2 {
        let cols: Vec<&str> = m.variables[..k - 1].iter().map(String::as_str).collect();
        header(&cols, out)?;
        for i in 1..k {
            let cells: Vec<String> = (0..k - 1)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => match m.get(i, j) {
                        MatrixEntry::Defined(c) => format_corr_cell(c.r, c.p_value),
                        MatrixEntry::Undefined { .. } => "n/a".into(),
                    },
                    std::cmp::Ordering::Equal => match m.get(i, i) {
                        MatrixEntry::Defined(_) => "1".into(),
                        MatrixEntry::Undefined { .. } => "n/a".into(),
                    },
                    std::cmp::Ordering::Greater => String::new(),
                })
                .collect();
            row(&escape_cell(&m.variables[i]), &cells, out)?;
        }
        writeln!(out)?;
    }
    writeln!(
        out,
        "Pearson r. \\*\\* p < .001, \\* p < .05 (two-tailed); bold marks |r| > .4."
    )?;
    for note in &table.notes {
        writeln!(out, "- {note}")?;
    }
    Ok(())
}

fn histogram_table(h: &Histogram, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "| Bin | Count |")?;
    writeln!(out, "|---|---:|")?;
    if h.underflow > 0 {
        writeln!(
            out,
            "| {} | {} |",
            escape_cell(&format!("<{}", h.lowest_edge())),
            h.underflow
        )?;
    }
    for bin in &h.bins {
        writeln!(out, "| {} | {} |", escape_cell(&bin.label), bin.count)?;
    }
    if h.overflow > 0 {
        writeln!(
            out,
            "| {} | {} |",
            escape_cell(&format!(">{}", h.highest_edge())),
            h.overflow
        )?;
    }
    Ok(())
}

fn escape_cell(s: &str) -> String {
    s.replace('|', "\\|")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

// ---------------------------------------------------------------------------
// CSV: one section per table, separated by blank lines
// ---------------------------------------------------------------------------

fn csv_sections(b: &ReportBundle, out: &mut dyn Write) -> io::Result<()> {
    let mut first = true;
    let mut section = |name: &str, rows: Vec<Vec<String>>| -> io::Result<()> {
        if !first {
            out.write_all(b"\n")?;
        }
        first = false;
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        w.write_record(["table", name])?;
        for r in rows {
            w.write_record(&r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        out.write_all(&bytes)
    };

    let p = &b.provenance;
    let mut prov = vec![
        vec!["field".into(), "value".into()],
        vec!["sample_size".into(), p.sample_size.to_string()],
        vec!["selection_note".into(), p.selection_note.clone()],
        vec![
            "fetched_from".into(),
            p.fetched_from.as_ref().map(timestamp).unwrap_or_default(),
        ],
        vec![
            "fetched_to".into(),
            p.fetched_to.as_ref().map(timestamp).unwrap_or_default(),
        ],
    ];
    for note in &p.coverage_notes {
        prov.push(vec!["coverage_note".into(), note.clone()]);
    }
    section("provenance", prov)?;
    section("descriptive_basic", summary_rows(&b.summary_basic))?;
    section("descriptive_metrics", summary_rows(&b.summary_metrics))?;
    section("correlations_full", corr_rows(&b.corr_full))?;
    section(
        "correlations_upper_quartiles",
        corr_rows(&b.corr_upper_quartiles),
    )?;

    let mut hist = vec![vec![
        "variable".into(),
        "bin".into(),
        "lower".into(),
        "upper".into(),
        "count".into(),
    ]];
    for h in &b.histograms {
        let g = &h.histogram;
        hist.push(vec![
            h.variable.clone(),
            "underflow".into(),
            String::new(),
            g.lowest_edge().to_string(),
            g.underflow.to_string(),
        ]);
        for bin in &g.bins {
            hist.push(vec![
                h.variable.clone(),
                bin.label.clone(),
                bin.lower.to_string(),
                bin.upper.to_string(),
                bin.count.to_string(),
            ]);
        }
        hist.push(vec![
            h.variable.clone(),
            "overflow".into(),
            g.highest_edge().to_string(),
            String::new(),
            g.overflow.to_string(),
        ]);
    }
    section("bin_frequencies", hist)?;

    let mut cats = vec![vec!["category".into(), "count".into()]];
    cats.extend(
        b.categories
            .iter()
            .map(|c| vec![c.category.clone(), c.count.to_string()]),
    );
    section("categories", cats)
}

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn summary_rows(summaries: &[NamedSummary]) -> Vec<Vec<String>> {
    let mut rows = vec![[
        "variable", "n", "mean", "std_dev", "min", "max", "skewness", "kurtosis", "bin_mode",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()];
    for s in summaries {
        let m = &s.summary;
        rows.push(vec![
            s.variable.clone(),
            m.n.to_string(),
            num(m.mean),
            num(m.std_dev),
            num(m.min),
            num(m.max),
            num(m.skewness),
            num(m.kurtosis),
            m.bin_mode.clone().unwrap_or_default(),
        ]);
    }
    rows
}

fn corr_rows(table: &CorrelationTable) -> Vec<Vec<String>> {
    let m = &table.matrix;
    let mut rows = vec![["row", "column", "r", "p_value", "n", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for i in 1..m.len() {
        for j in 0..i {
            let (r, p, status) = match m.get(i, j) {
                MatrixEntry::Defined(c) => (c.r.to_string(), num(c.p_value), "ok".to_string()),
                MatrixEntry::Undefined { reason, .. } => {
                    (String::new(), String::new(), reason.clone())
                }
            };
            rows.push(vec![
                m.variables[i].clone(),
                m.variables[j].clone(),
                r,
                p,
                m.get(i, j).n().to_string(),
                status,
            ]);
        }
    }
    rows
}
