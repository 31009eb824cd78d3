//! The `engage` command line: fetch, analyze, report and replicate.

mod config;
mod replicate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::Utc;
use clap::{Args, Parser, Subcommand};

use crate::ingest::{
    fetch_ids, read_id_list, sample_trending, select_study_sample, ApiKey, FetchConfig, FetchError,
    FixtureTransport, HttpTransport, PageTransport, ReadMode, SnapshotStore, StoreError,
    API_KEY_ENV, DEFAULT_API_BASE, MAX_PAGE_SIZE,
};
use crate::report::{
    build_report, render, render_histogram_plot, Format, MetricBins, PlotStyle, ReportBundle,
};
use crate::sample::StudySample;
use crate::stats::Variable;

pub use config::FileConfig;
pub use replicate::{Check, REFERENCE_CATEGORIES};

/// Overrides the live endpoint; meant for proxies and tests.
pub const API_BASE_ENV: &str = "ENGAGE_API_BASE";

const SCOPE: &str = "\
Replication scope: `engage replicate` checks the structure of the original
case study (106 unique ids after deduplication, 100 comment-enabled videos,
a 75-video upper-quartile subsample, the category frequency table, DisP
within [0, 1]) against a bundled synthetic fixture. It does not reproduce the
published numbers: the per-video data behind them was never released and
live statistics have drifted since the sample was taken.";

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  configuration or usage error
  3  transport, quota or payload error while fetching
  4  storage or file I/O error
  5  no eligible videos to analyze
  6  a replication check failed";

#[derive(Debug, Parser)]
#[command(
    name = "engage",
    version,
    about = "Relative engagement metrics (CpkI, VpkI, DisP) for trending-video statistics",
    long_about = format!(
        "Relative engagement metrics (CpkI, VpkI, DisP) for trending-video statistics.\n\n{SCOPE}"
    ),
    after_long_help = format!("{EXIT_CODES}\n\nThe API key is read from {API_KEY_ENV} only."),
)]
pub struct Cli {
    /// TOML file with defaults for any subcommand; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the trending chart (live or from recorded pages) into the snapshot store.
    Fetch(FetchArgs),
    /// Select the study sample from the store and compute every table into a bundle.
    Analyze(AnalyzeArgs),
    /// Render a bundle as Markdown, CSV, JSON and histogram plots.
    Report(ReportArgs),
    /// Run the whole pipeline on the bundled fixture and check its structure.
    #[command(long_about = format!("Run the whole pipeline on the bundled fixture and check its structure.\n\n{SCOPE}"))]
    Replicate(ReplicateArgs),
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Replay recorded pages (sweep<k>_page<j>.json) instead of calling the API.
    #[arg(long, value_name = "DIR", conflicts_with = "region")]
    pub offline: Option<PathBuf>,
    /// Two-letter region of the trending chart (live mode).
    #[arg(long, value_name = "CC")]
    pub region: Option<String>,
    /// Number of sweeps to run. Offline default: every recorded sweep; live default: 1.
    #[arg(long, value_name = "K")]
    pub occasions: Option<usize>,
    /// Snapshot store to append to.
    #[arg(long, value_name = "PATH")]
    pub store: Option<PathBuf>,
    /// Look up these video ids instead of the chart (live only). Current
    /// statistics are returned, not the ones originally sampled.
    #[arg(long, value_name = "FILE", conflicts_with = "offline")]
    pub ids: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub page_size: Option<u32>,
    #[arg(long, value_name = "N")]
    pub max_pages: Option<u32>,
    /// Minimum spacing between live requests.
    #[arg(long, value_name = "MS")]
    pub interval_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Snapshot store to read.
    #[arg(long, value_name = "PATH")]
    pub store: Option<PathBuf>,
    /// Study sample size.
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Where to write the bundle.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Fail on the first malformed store line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Bundle written by `analyze`.
    #[arg(long, value_name = "PATH")]
    pub bundle: Option<PathBuf>,
    /// Comma-separated outputs: md, csv, json, txt, svg.
    #[arg(long, value_name = "LIST")]
    pub format: Option<String>,
    /// JSON file with replacement bin edges per metric.
    #[arg(long, value_name = "FILE")]
    pub bins: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    /// Output directory for the store, bundle and report.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Use these recorded pages instead of the bundled fixture.
    #[arg(long, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Config = 2,
    Fetch = 3,
    Storage = 4,
    EmptySample = 5,
    Replication = 6,
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn code(&self) -> i32 {
        self.status as i32
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(ExitStatus::Config, message)
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(ExitStatus::Storage, format!("{}: {e}", path.display()))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<FetchError> for CliError {
    fn from(e: FetchError) -> Self {
        let status = match e {
            FetchError::Config(_) => ExitStatus::Config,
            FetchError::EmptySample { .. } => ExitStatus::EmptySample,
            FetchError::Transport { .. } | FetchError::Quota { .. } | FetchError::Parse { .. } => {
                ExitStatus::Fetch
            }
        };
        Self::new(status, e.to_string())
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        Self::new(ExitStatus::Storage, e.to_string())
    }
}

/// Standard output and standard error for one run.
pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Console<'_> {
    fn say(&mut self, line: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{line}");
    }

    fn warn(&mut self, line: impl std::fmt::Display) {
        let _ = writeln!(self.err, "warning: {line}");
    }
}

pub fn run(cli: Cli, console: &mut Console<'_>) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Fetch(args) => run_fetch(args, &file, console),
        Command::Analyze(args) => run_analyze(args, &file, console),
        Command::Report(args) => run_report(args, &file, console),
        Command::Replicate(args) => replicate::run_replicate(args, &file, console),
    }
}

const DEFAULT_STORE: &str = "snapshots.jsonl";

fn check_parent_dir(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::new(
            ExitStatus::Storage,
            format!("directory {} does not exist", dir.display()),
        )),
        _ => Ok(()),
    }
}

pub fn run_fetch(
    args: FetchArgs,
    file: &FileConfig,
    console: &mut Console<'_>,
) -> Result<(), CliError> {
    let f = &file.fetch;
    let offline = args.offline.or_else(|| f.offline.clone());
    let region = args.region.or_else(|| f.region.clone());
    if offline.is_some() && region.is_some() {
        return Err(CliError::config(
            "--offline and --region are mutually exclusive",
        ));
    }
    let store = SnapshotStore::new(
        args.store
            .or_else(|| f.store.clone())
            .unwrap_or_else(|| DEFAULT_STORE.into()),
    );
    let defaults = FetchConfig::default();
    let config = FetchConfig::new(
        region.unwrap_or_else(|| defaults.region_code.clone()),
        args.page_size.or(f.page_size).unwrap_or(MAX_PAGE_SIZE),
        args.max_pages
            .or(f.max_pages)
            .unwrap_or(defaults.max_pages()),
        args.interval_ms
            .or(f.interval_ms)
            .map_or(defaults.request_interval, Duration::from_millis),
    )?;
    let ids = match args.ids.or_else(|| f.ids.clone()) {
        Some(path) => {
            if offline.is_some() {
                return Err(CliError::config(
                    "--ids needs the live API and cannot be combined with --offline",
                ));
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            let ids = read_id_list(&text);
            if ids.is_empty() {
                return Err(CliError::config(format!(
                    "{} lists no video ids",
                    path.display()
                )));
            }
            Some(ids)
        }
        None => None,
    };
    check_parent_dir(store.path())?;

    let occasions = args.occasions.or(f.occasions);
    if occasions == Some(0) {
        return Err(CliError::config("--occasions must be at least 1"));
    }
    let (mut transport, occasions): (Box<dyn PageTransport>, usize) = match &offline {
        Some(dir) => {
            let fixtures = FixtureTransport::open(dir)?;
            let k = occasions.unwrap_or_else(|| fixtures.sweep_count());
            (Box::new(fixtures), k)
        }
        None => {
            let key = ApiKey::from_env().ok_or_else(|| {
                CliError::config(format!(
                    "live fetching needs an API key in {API_KEY_ENV}; set it or use --offline DIR"
                ))
            })?;
            let base = std::env::var(API_BASE_ENV).unwrap_or_else(|_| DEFAULT_API_BASE.into());
            (
                Box::new(HttpTransport::new(key, base, config.request_interval)?),
                occasions.unwrap_or(1),
            )
        }
    };
    let now = Utc::now;

    let (pages, snapshots, warnings) = match ids {
        Some(ids) => {
            let sweep = fetch_ids(&mut transport, &config, &ids, &now)?;
            (sweep.pages, sweep.snapshots, sweep.warnings)
        }
        None => {
            let sample = sample_trending(&mut transport, &config, occasions, &now)?;
            let pages = sample.pages();
            let warnings = sample
                .sweeps
                .iter()
                .flat_map(|s| s.warnings.clone())
                .collect();
            let snapshots = sample
                .sweeps
                .into_iter()
                .flat_map(|s| s.snapshots)
                .collect();
            (pages, snapshots, warnings)
        }
    };
    for w in &warnings {
        console.warn(w);
    }
    store.append(&snapshots)?;
    let unique = StudySample::dedup_latest(snapshots.iter().cloned(), "").len();
    console.say(format!(
        "fetched {pages} pages, {} snapshots, {unique} unique ids",
        snapshots.len()
    ));
    Ok(())
}

fn write_json(path: &Path, bundle: &ReportBundle) -> Result<(), CliError> {
    let mut buf = Vec::new();
    render(bundle, Format::Json, &mut buf).map_err(|e| CliError::io(path, e))?;
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// Loads the store, selects the study sample and builds the bundle.
fn analyze_store(
    store: &SnapshotStore,
    n: usize,
    mode: ReadMode,
    console: &mut Console<'_>,
) -> Result<ReportBundle, CliError> {
    let loaded = store.load(None, mode)?;
    for skipped in &loaded.skipped {
        console.warn(format!(
            "{} line {} skipped: {}",
            store.path().display(),
            skipped.line,
            skipped.message
        ));
    }
    for w in &loaded.warnings {
        console.warn(w);
    }
    let selection = select_study_sample(&loaded.sample, n);
    if selection.sample.is_empty() {
        return Err(CliError::new(
            ExitStatus::EmptySample,
            format!(
                "no comment-enabled videos among {} records in {}",
                loaded.records_read,
                store.path().display()
            ),
        ));
    }
    if let Some(s) = selection.shortfall {
        console.warn(format!(
            "requested {} videos but only {} are eligible; continuing with {}",
            s.requested, s.available, s.available
        ));
    }
    let bundle = build_report(&selection.sample, &MetricBins::default())
        .map_err(|e| CliError::new(ExitStatus::EmptySample, e.to_string()))?;
    for note in &bundle.provenance.coverage_notes {
        console.warn(note);
    }
    Ok(bundle)
}

pub fn run_analyze(
    args: AnalyzeArgs,
    file: &FileConfig,
    console: &mut Console<'_>,
) -> Result<(), CliError> {
    let a = &file.analyze;
    let store_path = args
        .store
        .or_else(|| a.store.clone())
        .ok_or_else(|| CliError::config("analyze needs --store PATH"))?;
    let n = args.n.or(a.n).unwrap_or(100);
    if n == 0 {
        return Err(CliError::config("--n must be at least 1"));
    }
    let out = args
        .out
        .or_else(|| a.out.clone())
        .unwrap_or_else(|| "bundle.json".into());
    let mode = if args.strict || a.strict.unwrap_or(false) {
        ReadMode::Strict
    } else {
        ReadMode::Lenient
    };
    if !store_path.is_file() {
        return Err(CliError::new(
            ExitStatus::Storage,
            format!("snapshot store {} does not exist", store_path.display()),
        ));
    }
    check_parent_dir(&out)?;

    let bundle = analyze_store(&SnapshotStore::new(store_path), n, mode, console)?;
    write_json(&out, &bundle)?;
    console.say(format!(
        "analyzed {} videos ({} in the upper-quartile subsample); bundle written to {}",
        bundle.provenance.sample_size,
        bundle.corr_upper_quartiles.sample_size,
        out.display()
    ));
    Ok(())
}

/// What `report` writes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    pub tables: Vec<Format>,
    pub plots: Vec<PlotStyle>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            tables: vec![Format::Markdown, Format::Csv, Format::Json],
            plots: vec![PlotStyle::Text, PlotStyle::Svg],
        }
    }
}

impl Outputs {
    pub fn parse(list: &str) -> Result<Self, String> {
        let mut outputs = Outputs {
            tables: Vec::new(),
            plots: Vec::new(),
        };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Ok(f) = item.parse::<Format>() {
                if !outputs.tables.contains(&f) {
                    outputs.tables.push(f);
                }
            } else if let Ok(p) = item.parse::<PlotStyle>() {
                if !outputs.plots.contains(&p) {
                    outputs.plots.push(p);
                }
            } else {
                return Err(format!(
                    "unknown format {item:?}; expected md, csv, json, txt or svg"
                ));
            }
        }
        if outputs.tables.is_empty() && outputs.plots.is_empty() {
            return Err("--format lists no outputs".into());
        }
        Ok(outputs)
    }
}

fn plot_file_stem(v: Variable) -> &'static str {
    match v {
        Variable::Cpki => "hist_cpki",
        Variable::Vpki => "hist_vpki",
        _ => "hist_disp",
    }
}

/// Writes the selected outputs into `dir` and returns the paths written.
pub fn write_report(
    bundle: &ReportBundle,
    outputs: &Outputs,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for &format in &outputs.tables {
        let path = dir.join(format!("report.{}", format.extension()));
        let mut buf = Vec::new();
        render(bundle, format, &mut buf).map_err(|e| CliError::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    for &style in &outputs.plots {
        for h in &bundle.histograms {
            let Some(variable) = Variable::CORRELATED
                .into_iter()
                .find(|v| v.name() == h.variable)
            else {
                continue;
            };
            let path = dir.join(format!(
                "{}.{}",
                plot_file_stem(variable),
                style.extension()
            ));
            let mut buf = Vec::new();
            render_histogram_plot(&h.histogram, &h.variable, style, &mut buf)
                .map_err(|e| CliError::io(&path, e))?;
            fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn run_report(
    args: ReportArgs,
    file: &FileConfig,
    console: &mut Console<'_>,
) -> Result<(), CliError> {
    let r = &file.report;
    let bundle_path = args
        .bundle
        .or_else(|| r.bundle.clone())
        .ok_or_else(|| CliError::config("report needs --bundle PATH"))?;
    let outputs = match args.format.or_else(|| r.format.clone()) {
        Some(list) => Outputs::parse(&list).map_err(CliError::config)?,
        None => Outputs::default(),
    };
    let bins = match args.bins.or_else(|| r.bins.clone()) {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            let bins: MetricBins = serde_json::from_str(&text).map_err(|e| {
                CliError::config(format!("invalid bins file {}: {e}", path.display()))
            })?;
            Some(bins)
        }
        None => None,
    };
    let out = args
        .out
        .or_else(|| r.out.clone())
        .unwrap_or_else(|| "report".into());

    let text = fs::read_to_string(&bundle_path).map_err(|e| CliError::io(&bundle_path, e))?;
    let mut bundle: ReportBundle = serde_json::from_str(&text)
        .map_err(|e| CliError::io(&bundle_path, format!("not a report bundle: {e}")))?;
    if let Some(bins) = &bins {
        bundle.rebin(bins);
    }
    let written = write_report(&bundle, &outputs, &out)?;
    for path in &written {
        console.say(format!("wrote {}", path.display()));
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code. Errors are
/// reported on `console.err` without a backtrace.
pub fn main_with<I, T>(args: I, console: &mut Console<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(console.err, "{rendered}");
            } else {
                let _ = write!(console.out, "{rendered}");
            }
            return code;
        }
    };
    match run(cli, console) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(console.err, "error: {e}");
            e.code()
        }
    }
}
