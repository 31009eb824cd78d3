//! Number formatting and significance marking for rendered tables.

/// `"**"` for p < .001, `"*"` for p < .05, else empty.
pub fn significance_stars(p_value: Option<f64>) -> &'static str {
    match p_value {
        Some(p) if p < 0.001 => "**",
        Some(p) if p < 0.05 => "*",
        _ => "",
    }
}

/// At least moderate correlation: |r| > .4.
pub fn is_moderate(r: f64) -> bool {
    r.abs() > 0.4
}

/// Three decimals without a leading zero: `.723`, `-.242`, `1.000`.
pub fn format_r(r: f64) -> String {
    let s = format!("{r:.3}");
    let s = match s.as_str() {
        "-0.000" => "0.000".to_string(),
        _ => s,
    };
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

/// A Markdown correlation cell: r, escaped significance stars, and bold
/// when the correlation is at least moderate.
pub fn format_corr_cell(r: f64, p_value: Option<f64>) -> String {
    let stars = significance_stars(p_value).replace('*', "\\*");
    let body = format!("{}{stars}", format_r(r));
    if is_moderate(r) {
        format!("**{body}**")
    } else {
        body
    }
}

/// Thousands-separated with `decimals` fractional digits: `2,456,693.4`.
pub fn format_count(x: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, x.abs());
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s.as_str(), None),
    };
    let mut grouped = String::with_capacity(int.len() + int.len() / 3);
    for (i, c) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(c);
    }
    let sign = if x < 0.0 && s.chars().any(|c| c.is_ascii_digit() && c != '0') {
        "-"
    } else {
        ""
    };
    match frac {
        Some(f) => format!("{sign}{grouped}.{f}"),
        None => format!("{sign}{grouped}"),
    }
}

/// A proportion as a percentage with two decimals: `0.1044` -> `10.44%`.
pub fn format_percent(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}
