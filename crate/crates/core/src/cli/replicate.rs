//! End-to-end structural replication on the bundled fixture.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use serde_json::Value;

use super::{
    analyze_store, write_json, write_report, CliError, Console, ExitStatus, FileConfig, Outputs,
    ReplicateArgs,
};
use crate::ingest::{sample_trending, FetchConfig, FixtureTransport, ReadMode, SnapshotStore};
use crate::report::ReportBundle;
use crate::stats::Variable;

const BUNDLED: [(&str, &str); 6] = [
    (
        "sweep1_page1.json",
        include_str!("../../fixtures/replication/sweep1_page1.json"),
    ),
    (
        "sweep1_page2.json",
        include_str!("../../fixtures/replication/sweep1_page2.json"),
    ),
    (
        "sweep2_page1.json",
        include_str!("../../fixtures/replication/sweep2_page1.json"),
    ),
    (
        "sweep2_page2.json",
        include_str!("../../fixtures/replication/sweep2_page2.json"),
    ),
    (
        "sweep3_page1.json",
        include_str!("../../fixtures/replication/sweep3_page1.json"),
    ),
    (
        "sweep3_page2.json",
        include_str!("../../fixtures/replication/sweep3_page2.json"),
    ),
];

/// Category frequencies of the original 100-video sample.
pub const REFERENCE_CATEGORIES: [(&str, usize); 13] = [
    ("Entertainment", 24),
    ("Tech", 15),
    ("Sports", 11),
    ("Comedy", 9),
    ("Education", 9),
    ("News", 8),
    ("Film", 7),
    ("Animals", 4),
    ("Music", 4),
    ("People", 4),
    ("Nonprofit", 3),
    ("Howto", 1),
    ("Travel", 1),
];

const EXPECTED_UNIQUE: usize = 106;
const EXPECTED_SAMPLE: usize = 100;
const EXPECTED_UPPER: usize = 75;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

fn fixture_files(dir: Option<&Path>) -> Result<(PathBuf, Vec<(String, String)>), CliError> {
    let Some(dir) = dir else {
        let files = BUNDLED
            .iter()
            .map(|(n, b)| (n.to_string(), b.to_string()))
            .collect();
        return Ok((PathBuf::from("<bundled fixture>"), files));
    };
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::config(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::config(e.to_string()))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with("sweep") && name.ends_with(".json") {
            let body =
                fs::read_to_string(entry.path()).map_err(|e| CliError::io(&entry.path(), e))?;
            files.push((name, body));
        }
    }
    files.sort();
    Ok((dir.to_path_buf(), files))
}

fn signed_count(v: Option<&Value>) -> Option<i128> {
    match v? {
        Value::String(s) => s.trim().parse().ok(),
        Value::Number(n) => n.as_i64().map(i128::from),
        _ => None,
    }
}

/// DisP from the raw recorded counts, before any type checking, so that
/// corrupt (negative) counts still surface as out-of-range proportions.
fn raw_disp_violations(files: &[(String, String)]) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, body) in files {
        let Ok(page) = serde_json::from_str::<Value>(body) else {
            continue;
        };
        let items = page
            .get("items")
            .and_then(Value::as_array)
            .cloned()
            .unwrap_or_default();
        for item in items {
            let stats = item.get("statistics");
            let likes = signed_count(stats.and_then(|s| s.get("likeCount")));
            let dislikes = signed_count(stats.and_then(|s| s.get("dislikeCount")));
            if let (Some(l), Some(d)) = (likes, dislikes) {
                if l + d == 0 {
                    continue;
                }
                let disp = d as f64 / (l + d) as f64;
                if !(0.0..=1.0).contains(&disp) {
                    let id = item.get("id").and_then(Value::as_str).unwrap_or("?");
                    bad.push(format!("{name}: {id} has DisP {disp:.3}"));
                }
            }
        }
    }
    bad
}

fn category_check(bundle: &ReportBundle) -> Check {
    let observed: Vec<(String, usize)> = bundle
        .categories
        .iter()
        .map(|c| (c.category.clone(), c.count))
        .collect();
    let expected: Vec<(String, usize)> = REFERENCE_CATEGORIES
        .iter()
        .map(|(c, n)| (c.to_string(), *n))
        .collect();
    if observed == expected {
        return Check::new(
            "category table",
            true,
            format!(
                "{} categories match the reference frequencies",
                expected.len()
            ),
        );
    }
    let mut diffs = Vec::new();
    for (cat, n) in &expected {
        let got = observed
            .iter()
            .find(|(c, _)| c == cat)
            .map_or(0, |(_, k)| *k);
        if got != *n {
            diffs.push(format!("{cat} {got} (expected {n})"));
        }
    }
    for (cat, k) in &observed {
        if !expected.iter().any(|(c, _)| c == cat) {
            diffs.push(format!("{cat} {k} (expected 0)"));
        }
    }
    Check::new("category table", false, diffs.join(", "))
}

fn pipeline_checks(
    files: Vec<(String, String)>,
    label: PathBuf,
    out: &Path,
    console: &mut Console<'_>,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let fetched = FixtureTransport::from_files(label, files).and_then(|mut transport| {
        let occasions = transport.sweep_count();
        sample_trending(
            &mut transport,
            &FetchConfig::default(),
            occasions,
            &Utc::now,
        )
    });
    let trending = match fetched {
        Ok(t) => t,
        Err(e) => {
            checks.push(Check::new("offline fetch", false, e.to_string()));
            return checks;
        }
    };
    checks.push(Check::new(
        "offline fetch",
        true,
        format!(
            "{} sweeps, {} pages, {} snapshots",
            trending.sweeps.len(),
            trending.pages(),
            trending.snapshot_count()
        ),
    ));
    let unique = trending.sample.len();
    checks.push(Check::new(
        "unique ids after deduplication",
        unique == EXPECTED_UNIQUE,
        format!("{unique} (expected {EXPECTED_UNIQUE})"),
    ));

    let store = SnapshotStore::new(out.join("snapshots.jsonl"));
    let stored = (|| -> Result<(), CliError> {
        if store.path().exists() {
            fs::remove_file(store.path()).map_err(|e| CliError::io(store.path(), e))?;
        }
        let snapshots: Vec<_> = trending.all_snapshots().cloned().collect();
        store.append(&snapshots)?;
        Ok(())
    })();
    if let Err(e) = stored {
        checks.push(Check::new("snapshot store", false, e.message));
        return checks;
    }

    let bundle = match analyze_store(&store, EXPECTED_SAMPLE, ReadMode::Strict, console) {
        Ok(b) => b,
        Err(e) => {
            checks.push(Check::new("analysis", false, e.message));
            return checks;
        }
    };
    let n = bundle.provenance.sample_size;
    checks.push(Check::new(
        "study sample size",
        n == EXPECTED_SAMPLE,
        format!("{n} comment-enabled videos (expected {EXPECTED_SAMPLE})"),
    ));
    let upper = bundle.corr_upper_quartiles.sample_size;
    checks.push(Check::new(
        "upper-quartile subsample size",
        upper == EXPECTED_UPPER,
        format!("{upper} (expected {EXPECTED_UPPER})"),
    ));
    checks.push(category_check(&bundle));

    let k = Variable::CORRELATED.len();
    let shapes_ok = bundle.summary_basic.len() == 3
        && bundle.summary_metrics.len() == 3
        && bundle.histograms.len() == 3
        && [&bundle.corr_full, &bundle.corr_upper_quartiles]
            .iter()
            .all(|t| t.matrix.len() == k && t.matrix.cells.len() == k);
    checks.push(Check::new(
        "table shapes",
        shapes_ok,
        format!("3 counter summaries, 3 metric summaries, 3 histograms, two {k}x{k} correlation matrices"),
    ));

    let out_of_range: Vec<String> = bundle
        .rows
        .iter()
        .filter_map(|r| {
            r.disp
                .filter(|d| !(0.0..=1.0).contains(d))
                .map(|d| format!("{} {d}", r.video_id))
        })
        .collect();
    checks.push(Check::new(
        "DisP bounds (computed)",
        out_of_range.is_empty(),
        if out_of_range.is_empty() {
            format!(
                "all {} defined values within [0, 1]",
                bundle.rows.iter().filter(|r| r.disp.is_some()).count()
            )
        } else {
            out_of_range.join(", ")
        },
    ));

    let written = write_json(&out.join("bundle.json"), &bundle)
        .and_then(|()| write_report(&bundle, &Outputs::default(), out));
    match written {
        Ok(paths) => checks.push(Check::new(
            "report files",
            true,
            format!("{} files written", paths.len() + 1),
        )),
        Err(e) => checks.push(Check::new("report files", false, e.message)),
    }
    checks
}

pub fn run_replicate(
    args: ReplicateArgs,
    file: &FileConfig,
    console: &mut Console<'_>,
) -> Result<(), CliError> {
    let r = &file.replicate;
    let out = args
        .out
        .or_else(|| r.out.clone())
        .unwrap_or_else(|| "replication".into());
    let fixtures = args.fixtures.or_else(|| r.fixtures.clone());
    let (label, files) = fixture_files(fixtures.as_deref())?;
    fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;

    let violations = raw_disp_violations(&files);
    let mut checks = vec![Check::new(
        "DisP bounds (recorded counts)",
        violations.is_empty(),
        if violations.is_empty() {
            "every recorded like/dislike pair gives DisP within [0, 1]".to_string()
        } else {
            violations.join("; ")
        },
    )];
    checks.extend(pipeline_checks(files, label, &out, console));

    console.say("replication checklist (structural; published values are not reproduced):");
    for c in &checks {
        console.say(format!(
            "[{}] {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    console.say(format!(
        "{} of {} checks passed",
        checks.len() - failed.len(),
        checks.len()
    ));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(
            ExitStatus::Replication,
            format!("replication check(s) failed: {}", failed.join(", ")),
        ))
    }
}
