use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;

/// Optional defaults loaded with `--config`, one table per subcommand:
///
/// ```toml
/// [fetch]
/// offline = "fixtures/replication"
/// store = "snapshots.jsonl"
///
/// [analyze]
/// store = "snapshots.jsonl"
/// n = 100
///
/// [report]
/// format = "md,json"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub fetch: FetchFile,
    pub analyze: AnalyzeFile,
    pub report: ReportFile,
    pub replicate: ReplicateFile,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FetchFile {
    pub offline: Option<PathBuf>,
    pub region: Option<String>,
    pub occasions: Option<usize>,
    pub store: Option<PathBuf>,
    pub ids: Option<PathBuf>,
    pub page_size: Option<u32>,
    pub max_pages: Option<u32>,
    pub interval_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeFile {
    pub store: Option<PathBuf>,
    pub n: Option<usize>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportFile {
    pub bundle: Option<PathBuf>,
    pub format: Option<String>,
    pub bins: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplicateFile {
    pub out: Option<PathBuf>,
    pub fixtures: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::config(format!("config file {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_optional() {
        assert_eq!(FileConfig::parse("").unwrap(), FileConfig::default());
        let c = FileConfig::parse("[analyze]\nn = 50\nstore = \"s.jsonl\"\n").unwrap();
        assert_eq!(c.analyze.n, Some(50));
        assert_eq!(c.analyze.store, Some(PathBuf::from("s.jsonl")));
        assert_eq!(c.fetch, FetchFile::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::parse("[analyze]\nsample = 3\n").is_err());
        assert!(FileConfig::parse("api_key = \"x\"\n").is_err());
    }
}
