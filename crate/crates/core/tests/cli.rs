mod common;

use std::fs;
use std::io::ErrorKind;
use std::net::TcpListener;
use std::path::Path;

use chrono::{TimeZone, Utc};
use common::*;
use engage::ingest::SnapshotStore;
use engage::report::{format_corr_cell, ReportBundle};
use engage::stats::MatrixEntry;
use engage::VideoStatsSnapshot;
use serde_json::Value;

const KEY: &str = "sekrit-key-123";

fn fixtures() -> String {
    fixture_dir().display().to_string()
}

fn write_store(path: &Path, n: usize) {
    let at = Utc.with_ymd_and_hms(2013, 12, 3, 10, 0, 0).unwrap();
    let snaps: Vec<_> = (0..n as u64)
        .map(|i| {
            VideoStatsSnapshot::new(format!("vid{i:02}"), at, 10_000 + i * 7_919)
                .with_votes(Some(40 + 3 * i), Some(2 + i % 4))
                .with_comments(Some(5 + i), true)
                .with_category("Tech")
        })
        .collect();
    SnapshotStore::new(path).append(&snaps).unwrap();
}

#[test]
fn offline_fetch_populates_an_empty_store() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--offline", &fixtures(), "--store", "s.jsonl"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).trim(),
        "fetched 6 pages, 150 snapshots, 106 unique ids"
    );
    let lines = fs::read_to_string(dir.path().join("s.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, 150);
}

#[test]
fn fetch_appends_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let o = engage(
            dir.path(),
            &[
                "fetch",
                "--offline",
                &fixtures(),
                "--store",
                "s.jsonl",
                "--occasions",
                "1",
            ],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(
            stdout(&o).trim(),
            "fetched 2 pages, 50 snapshots, 50 unique ids"
        );
    }
    let lines = fs::read_to_string(dir.path().join("s.jsonl"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(lines, 100);
}

#[test]
fn live_fetch_without_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(dir.path(), &["fetch", "--store", "s.jsonl"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ENGAGE_API_KEY"), "{}", stderr(&o));
    assert!(!dir.path().join("s.jsonl").exists());
}

#[test]
fn api_key_is_not_a_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(dir.path(), &["fetch", "--api-key", KEY], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unexpected argument"));
    assert!(!stderr(&o).contains(KEY));
}

#[test]
fn offline_mode_never_contacts_the_live_api() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/videos", listener.local_addr().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--offline", &fixtures(), "--store", "s.jsonl"],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &base)],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    listener.set_nonblocking(true).unwrap();
    let err = listener.accept().expect_err("no connection expected");
    assert_eq!(err.kind(), ErrorKind::WouldBlock);
}

#[test]
fn live_fetch_pages_through_the_chart() {
    let page1 = fs::read_to_string(fixture_dir().join("sweep1_page1.json")).unwrap();
    let page2 = fs::read_to_string(fixture_dir().join("sweep1_page2.json")).unwrap();
    let server = MockServer::start(vec![(200, page1), (200, page2)]);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &[
            "fetch",
            "--store",
            "s.jsonl",
            "--region",
            "gb",
            "--interval-ms",
            "0",
        ],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &server.url)],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).trim(),
        "fetched 2 pages, 50 snapshots, 50 unique ids"
    );
    let requests = server.requests();
    assert_eq!(requests.len(), 2);
    for r in &requests {
        assert!(r.contains("chart=mostPopular"), "{r}");
        assert!(r.contains("regionCode=GB"), "{r}");
        assert!(r.contains("maxResults=50"), "{r}");
        assert!(r.contains("part=snippet%2Cstatistics"), "{r}");
    }
    assert!(!requests[0].contains("pageToken"));
    assert!(requests[1].contains("pageToken=CDIQAA"));
}

#[test]
fn quota_errors_exit_3_without_leaking_the_key() {
    let body = r#"{"error":{"code":403,"message":"quota","errors":[{"reason":"quotaExceeded"}]}}"#;
    let server = MockServer::start(vec![(403, body.into())]);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--store", "s.jsonl"],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &server.url)],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("quota exceeded (quotaExceeded)"),
        "{}",
        stderr(&o)
    );
    assert!(!stderr(&o).contains(KEY) && !stdout(&o).contains(KEY));
    assert!(server.requests()[0].contains(&format!("key={KEY}")));
    assert!(!dir.path().join("s.jsonl").exists());
}

#[test]
fn server_errors_exit_3() {
    let server = MockServer::start(vec![(500, "oops".into())]);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--store", "s.jsonl"],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &server.url)],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("HTTP 500"), "{}", stderr(&o));
    assert!(!stderr(&o).contains(KEY));
}

#[test]
fn unreachable_endpoint_exits_3_without_leaking_the_key() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/videos", listener.local_addr().unwrap());
    drop(listener);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--store", "s.jsonl"],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &base)],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!stderr(&o).contains(KEY), "{}", stderr(&o));
}

#[test]
fn malformed_payload_exits_3_naming_the_field() {
    let body = r#"{"items":[{"id":"x","statistics":{"viewCount":"many"}}]}"#;
    let server = MockServer::start(vec![(200, body.into())]);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &["fetch", "--store", "s.jsonl"],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &server.url)],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("viewCount"), "{}", stderr(&o));
}

#[test]
fn fetch_to_missing_directory_is_a_storage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &[
            "fetch",
            "--offline",
            &fixtures(),
            "--store",
            "no/such/s.jsonl",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn ids_mode_requires_the_live_api() {
    let dir = tempfile::tempdir().unwrap();
    let ids = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/original_sample_ids.txt");
    let o = engage(
        dir.path(),
        &[
            "fetch",
            "--ids",
            ids.to_str().unwrap(),
            "--offline",
            &fixtures(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ids_mode_batches_lookups() {
    let ids = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/original_sample_ids.txt");
    let page = fs::read_to_string(fixture_dir().join("sweep1_page1.json")).unwrap();
    let server = MockServer::start(vec![(200, page.clone()), (200, page)]);
    let dir = tempfile::tempdir().unwrap();
    let o = engage(
        dir.path(),
        &[
            "fetch",
            "--ids",
            ids.to_str().unwrap(),
            "--store",
            "s.jsonl",
            "--interval-ms",
            "0",
        ],
        &[("ENGAGE_API_KEY", KEY), ("ENGAGE_API_BASE", &server.url)],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let requests = server.requests();
    assert_eq!(requests.len(), 2);
    assert!(requests
        .iter()
        .all(|r| r.contains("id=") && !r.contains("chart=")));
}

#[test]
fn analyze_the_fixture_store_selects_100() {
    let dir = tempfile::tempdir().unwrap();
    engage(
        dir.path(),
        &["fetch", "--offline", &fixtures(), "--store", "s.jsonl"],
        &[],
    );
    let o = engage(
        dir.path(),
        &["analyze", "--store", "s.jsonl", "--out", "b.json"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bundle: ReportBundle =
        serde_json::from_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(bundle.provenance.sample_size, 100);
    assert_eq!(bundle.corr_upper_quartiles.sample_size, 75);
    assert_eq!(bundle.rows.len(), 100);
}

#[test]
fn analyze_shortfall_warns_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    write_store(&dir.path().join("s.jsonl"), 10);
    let o = engage(
        dir.path(),
        &["analyze", "--store", "s.jsonl", "--n", "100"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stderr(&o).contains("only 10 are eligible"),
        "{}",
        stderr(&o)
    );
    let bundle: ReportBundle =
        serde_json::from_str(&fs::read_to_string(dir.path().join("bundle.json")).unwrap()).unwrap();
    assert_eq!(bundle.provenance.sample_size, 10);
}

#[test]
fn analyze_empty_store_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.jsonl"), "").unwrap();
    let o = engage(dir.path(), &["analyze", "--store", "s.jsonl"], &[]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn analyze_missing_store_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(dir.path(), &["analyze", "--store", "absent.jsonl"], &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn analyze_strict_rejects_malformed_lines() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    write_store(&store, 5);
    let mut text = fs::read_to_string(&store).unwrap();
    text.push_str("{not json\n");
    fs::write(&store, text).unwrap();
    let lenient = engage(dir.path(), &["analyze", "--store", "s.jsonl"], &[]);
    assert_eq!(lenient.status.code(), Some(0));
    assert!(
        stderr(&lenient).contains("line 6 skipped"),
        "{}",
        stderr(&lenient)
    );
    let strict = engage(
        dir.path(),
        &["analyze", "--store", "s.jsonl", "--strict"],
        &[],
    );
    assert_eq!(strict.status.code(), Some(4));
    assert!(stderr(&strict).contains("line 6"));
}

#[test]
fn n_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    write_store(&dir.path().join("s.jsonl"), 3);
    let o = engage(
        dir.path(),
        &["analyze", "--store", "s.jsonl", "--n", "0"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

fn analyzed_fixture(dir: &Path) {
    let o = engage(
        dir,
        &["fetch", "--offline", &fixtures(), "--store", "s.jsonl"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = engage(
        dir,
        &["analyze", "--store", "s.jsonl", "--out", "b.json"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn report_default_file_inventory() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    let o = engage(
        dir.path(),
        &["report", "--bundle", "b.json", "--out", "out"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        listing(&dir.path().join("out")),
        [
            "hist_cpki.svg",
            "hist_cpki.txt",
            "hist_disp.svg",
            "hist_disp.txt",
            "hist_vpki.svg",
            "hist_vpki.txt",
            "report.csv",
            "report.json",
            "report.md",
        ]
    );
}

#[test]
fn report_json_only_writes_one_file() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    let o = engage(
        dir.path(),
        &[
            "report", "--bundle", "b.json", "--format", "json", "--out", "out",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listing(&dir.path().join("out")), ["report.json"]);
    // the JSON report is the bundle itself
    assert_eq!(
        fs::read(dir.path().join("out/report.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn report_unknown_format_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    let o = engage(
        dir.path(),
        &["report", "--bundle", "b.json", "--format", "md,pdf"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("report").exists());
}

#[test]
fn report_missing_bundle_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(dir.path(), &["report", "--bundle", "none.json"], &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn report_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    for out in ["a", "b"] {
        let o = engage(
            dir.path(),
            &["report", "--bundle", "b.json", "--out", out],
            &[],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for name in listing(&dir.path().join("a")) {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn report_bins_override() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    fs::write(
        dir.path().join("bins.json"),
        r#"{"cpki": {"edges": [0, 1, 100]}}"#,
    )
    .unwrap();
    let o = engage(
        dir.path(),
        &[
            "report",
            "--bundle",
            "b.json",
            "--bins",
            "bins.json",
            "--format",
            "txt",
            "--out",
            "out",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let txt = fs::read_to_string(dir.path().join("out/hist_cpki.txt")).unwrap();
    assert_eq!(txt.lines().count(), 3, "{txt}");
    assert!(txt.lines().nth(1).unwrap().starts_with("0-1 "));

    fs::write(
        dir.path().join("bad.json"),
        r#"{"cpki": {"edges": [1, 0]}}"#,
    )
    .unwrap();
    let o = engage(
        dir.path(),
        &["report", "--bundle", "b.json", "--bins", "bad.json"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn markdown_values_agree_with_json() {
    let dir = tempfile::tempdir().unwrap();
    analyzed_fixture(dir.path());
    let o = engage(
        dir.path(),
        &[
            "report", "--bundle", "b.json", "--format", "md,json", "--out", "out",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let md = fs::read_to_string(dir.path().join("out/report.md")).unwrap();
    let bundle: ReportBundle =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();

    let m = &bundle.corr_full.matrix;
    let section = md.split("## Correlations: full sample").nth(1).unwrap();
    for i in 1..m.len() {
        let row = section
            .lines()
            .find(|l| l.starts_with(&format!("| {} |", m.variables[i])))
            .unwrap();
        let cells: Vec<&str> = row.trim_matches('|').split('|').map(str::trim).collect();
        for j in 0..i {
            let expected = match m.get(i, j) {
                MatrixEntry::Defined(c) => format_corr_cell(c.r, c.p_value),
                MatrixEntry::Undefined { .. } => "n/a".into(),
            };
            assert_eq!(
                cells[j + 1],
                expected,
                "{} x {}",
                m.variables[i],
                m.variables[j]
            );
        }
    }
    for s in &bundle.summary_metrics {
        let n = format!("| Valid N | {}", s.summary.n);
        assert!(md.contains(&n));
        let mean = s.summary.mean.unwrap();
        let shown = if s.variable == "DisP" {
            format!("{:.2}%", mean * 100.0)
        } else {
            format!("{mean:.3}")
        };
        assert!(md.contains(&shown), "{} mean {shown}", s.variable);
    }
    for c in &bundle.categories {
        assert!(md.contains(&format!("| {} | {} |", c.category, c.count)));
    }
}

#[test]
fn replicate_passes_on_the_bundled_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = engage(dir.path(), &["replicate", "--out", "r"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("[PASS] unique ids after deduplication: 106"));
    assert!(out.contains("[PASS] study sample size: 100"));
    assert!(out.contains("[PASS] upper-quartile subsample size: 75"));
    assert!(out.contains("[PASS] category table"));
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn replicate_from_a_copied_fixture_directory_matches_the_bundled_one() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(&dir.path().join("fx"));
    let a = engage(dir.path(), &["replicate", "--out", "a"], &[]);
    let b = engage(
        dir.path(),
        &["replicate", "--out", "b", "--fixtures", "fx"],
        &[],
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0), "{}", stdout(&b));
    assert_eq!(
        fs::read(dir.path().join("a/report.md")).unwrap(),
        fs::read(dir.path().join("b/report.md")).unwrap()
    );
}

#[test]
fn replicate_detects_a_perturbed_category() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx");
    copy_fixtures(&fx);
    let id = latest_sweep_id(&fx);
    edit_fixture_item(&fx, &id, |item| {
        item["snippet"]["categoryId"] = Value::from("2")
    });
    let o = engage(
        dir.path(),
        &["replicate", "--out", "r", "--fixtures", "fx"],
        &[],
    );
    assert_eq!(o.status.code(), Some(6), "{}", stdout(&o));
    assert!(
        stdout(&o).contains("[FAIL] category table"),
        "{}",
        stdout(&o)
    );
    assert!(stderr(&o).contains("category table"));
    assert!(stdout(&o).contains("Autos 1 (expected 0)"));
}

#[test]
fn replicate_detects_out_of_range_disp() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx");
    copy_fixtures(&fx);
    let id = latest_sweep_id(&fx);
    edit_fixture_item(&fx, &id, |item| {
        item["statistics"]["likeCount"] = Value::from("-20");
        item["statistics"]["dislikeCount"] = Value::from("120");
    });
    let o = engage(
        dir.path(),
        &["replicate", "--out", "r", "--fixtures", "fx"],
        &[],
    );
    assert_eq!(o.status.code(), Some(6), "{}", stdout(&o));
    assert!(
        stdout(&o).contains("[FAIL] DisP bounds (recorded counts)"),
        "{}",
        stdout(&o)
    );
    assert!(stdout(&o).contains("has DisP 1.200"));
    assert!(stderr(&o).contains("DisP bounds"));
}

#[test]
fn replicate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = engage(dir.path(), &["replicate", "--out", "a"], &[]);
    let b = engage(dir.path(), &["replicate", "--out", "b"], &[]);
    assert_eq!(a.stdout, b.stdout);
    let names = listing(&dir.path().join("a"));
    assert_eq!(names.len(), 11);
    assert_eq!(names, listing(&dir.path().join("b")));
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap(),
            "{name}"
        );
    }
    // rerunning into the same directory replaces the store rather than growing it
    let again = engage(dir.path(), &["replicate", "--out", "a"], &[]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        fs::read(dir.path().join("a/bundle.json")).unwrap(),
        fs::read(dir.path().join("b/bundle.json")).unwrap()
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    write_store(&dir.path().join("s.jsonl"), 12);
    fs::write(
        dir.path().join("engage.toml"),
        "[analyze]\nstore = \"s.jsonl\"\nn = 5\nout = \"from_config.json\"\n",
    )
    .unwrap();
    let o = engage(dir.path(), &["--config", "engage.toml", "analyze"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("from_config.json")).unwrap())
            .unwrap();
    assert_eq!(b["provenance"]["sample_size"], 5);

    let o = engage(
        dir.path(),
        &[
            "analyze",
            "--config",
            "engage.toml",
            "--n",
            "7",
            "--out",
            "flag.json",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("flag.json")).unwrap()).unwrap();
    assert_eq!(b["provenance"]["sample_size"], 7);

    fs::write(dir.path().join("bad.toml"), "[analyze]\nsecret = 1\n").unwrap();
    let o = engage(dir.path(), &["--config", "bad.toml", "analyze"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(engage(dir.path(), &[], &[]).status.code(), Some(2));
    assert_eq!(
        engage(dir.path(), &["frobnicate"], &[]).status.code(),
        Some(2)
    );
    let o = engage(
        dir.path(),
        &["fetch", "--offline", "x", "--region", "US"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_states_the_replication_scope() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["replicate", "--help"][..]] {
        let o = engage(dir.path(), args, &[]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(
            text.contains("It does not reproduce the\npublished numbers"),
            "{text}"
        );
    }
    let o = engage(dir.path(), &["--help"], &[]);
    assert!(stdout(&o).contains("6  a replication check failed"));
}
