#![allow(dead_code)]

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread::{self, JoinHandle};

use serde_json::Value;

pub fn engage_bin() -> &'static str {
    env!("CARGO_BIN_EXE_engage")
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/replication")
}

/// Runs the binary in `dir` with a clean API environment plus `envs`.
pub fn engage(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(engage_bin());
    cmd.current_dir(dir)
        .args(args)
        .env_remove("ENGAGE_API_KEY")
        .env_remove("ENGAGE_API_BASE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn copy_fixtures(to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), to.join(entry.file_name())).unwrap();
    }
}

/// Applies `edit` to every recorded item whose id is `id`, in every page.
pub fn edit_fixture_item(dir: &Path, id: &str, edit: impl Fn(&mut Value)) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let mut page: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        if let Some(items) = page.get_mut("items").and_then(Value::as_array_mut) {
            for item in items.iter_mut().filter(|i| i["id"] == id) {
                edit(item);
            }
        }
        fs::write(&path, serde_json::to_string_pretty(&page).unwrap()).unwrap();
    }
}

/// A comment-enabled id present in the latest sweep.
pub fn latest_sweep_id(dir: &Path) -> String {
    let page: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("sweep3_page1.json")).unwrap()).unwrap();
    page["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["statistics"].get("commentCount").is_some())
        .map(|i| i["id"].as_str().unwrap().to_string())
        .unwrap()
}

/// Serves canned HTTP responses, one per connection, and returns the
/// request lines it saw.
pub struct MockServer {
    pub url: String,
    handle: JoinHandle<Vec<String>>,
}

impl MockServer {
    pub fn start(responses: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!(
            "http://{}/youtube/v3/videos",
            listener.local_addr().unwrap()
        );
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let Ok((stream, _)) = listener.accept() else {
                    break;
                };
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                seen.push(line.trim_end().to_string());
                loop {
                    let mut header = String::new();
                    if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                        break;
                    }
                }
                let mut stream = stream;
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
            }
            seen
        });
        Self { url, handle }
    }

    pub fn requests(self) -> Vec<String> {
        self.handle.join().unwrap()
    }
}
