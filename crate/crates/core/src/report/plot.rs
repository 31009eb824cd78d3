//! Bar-chart rendering of bin frequencies as fixed-width text or SVG.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use crate::stats::Histogram;

/// Widest text bar, in columns.
pub const MAX_BAR_WIDTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    Text,
    Svg,
}

impl PlotStyle {
    pub fn extension(self) -> &'static str {
        match self {
            PlotStyle::Text => "txt",
            PlotStyle::Svg => "svg",
        }
    }
}

impl FromStr for PlotStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "txt" | "text" => Ok(PlotStyle::Text),
            "svg" => Ok(PlotStyle::Svg),
            other => Err(format!("unknown plot style {other:?}")),
        }
    }
}

/// Rows in display order: underflow (if any), bins, overflow (if any).
fn rows(h: &Histogram) -> Vec<(String, usize)> {
    let mut rows = Vec::with_capacity(h.bins.len() + 2);
    if h.underflow > 0 {
        rows.push((format!("<{}", h.lowest_edge()), h.underflow));
    }
    rows.extend(h.bins.iter().map(|b| (b.label.clone(), b.count)));
    if h.overflow > 0 {
        rows.push((format!(">{}", h.highest_edge()), h.overflow));
    }
    rows
}

/// Counts are drawn one column each until the largest exceeds
/// [`MAX_BAR_WIDTH`]; then every bar is scaled so the largest fills it.
/// Non-zero counts never vanish.
fn bar_width(count: usize, max: usize) -> usize {
    if count == 0 {
        0
    } else if max <= MAX_BAR_WIDTH {
        count
    } else {
        ((count * MAX_BAR_WIDTH + max / 2) / max).max(1)
    }
}

pub fn render_histogram_plot(
    h: &Histogram,
    title: &str,
    style: PlotStyle,
    out: &mut dyn Write,
) -> io::Result<()> {
    let rows = rows(h);
    let text = match style {
        PlotStyle::Text => text_plot(&rows, title),
        PlotStyle::Svg => svg_plot(&rows, title),
    };
    out.write_all(text.as_bytes())
}

fn text_plot(rows: &[(String, usize)], title: &str) -> String {
    let max = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let label_w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let count_w = rows
        .iter()
        .map(|r| r.1.to_string().len())
        .max()
        .unwrap_or(1);
    let total: usize = rows.iter().map(|r| r.1).sum();
    let mut s = String::new();
    let _ = writeln!(s, "{title} (n = {total})");
    for (label, count) in rows {
        let bar = "#".repeat(bar_width(*count, max));
        let line = format!("{label:<label_w$} | {count:>count_w$} | {bar}");
        let _ = writeln!(s, "{}", line.trim_end());
    }
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_plot(rows: &[(String, usize)], title: &str) -> String {
    const BAR: f64 = 48.0;
    const GAP: f64 = 12.0;
    const LEFT: f64 = 40.0;
    const TOP: f64 = 40.0;
    const PLOT_H: f64 = 200.0;

    let max = rows.iter().map(|r| r.1).max().unwrap_or(0).max(1);
    let width = LEFT * 2.0 + rows.len() as f64 * (BAR + GAP);
    let height = TOP + PLOT_H + 50.0;
    let base = TOP + PLOT_H;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        width / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT:.1}" y1="{base:.1}" x2="{:.1}" y2="{base:.1}" stroke="#333333"/>"##,
        width - LEFT
    );
    for (i, (label, count)) in rows.iter().enumerate() {
        let x = LEFT + GAP / 2.0 + i as f64 * (BAR + GAP);
        let h = PLOT_H * *count as f64 / max as f64;
        let _ = writeln!(
            s,
            r##"<rect x="{x:.1}" y="{:.1}" width="{BAR:.1}" height="{h:.1}" fill="#4477aa"/>"##,
            base - h
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{count}</text>"#,
            x + BAR / 2.0,
            base - h - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
            x + BAR / 2.0,
            base + 16.0,
            xml_escape(label)
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}
