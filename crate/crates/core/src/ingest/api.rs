//! Parsing one page of the videos-list response.

use chrono::{DateTime, Utc};
use serde_json::Value;

use super::FetchError;
use crate::metrics::{InconsistentComments, VideoStatsSnapshot};

/// Short category names keyed by the platform's numeric category id.
pub fn category_name(id: &str) -> Option<&'static str> {
    Some(match id {
        "1" => "Film",
        "2" => "Autos",
        "10" => "Music",
        "15" => "Animals",
        "17" => "Sports",
        "19" => "Travel",
        "20" => "Games",
        "22" => "People",
        "23" => "Comedy",
        "24" => "Entertainment",
        "25" => "News",
        "26" => "Howto",
        "27" => "Education",
        "28" => "Tech",
        "29" => "Nonprofit",
        "30" => "Movies",
        "43" => "Shows",
        "44" => "Trailers",
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPage {
    pub snapshots: Vec<VideoStatsSnapshot>,
    pub next_token: Option<String>,
    pub warnings: Vec<InconsistentComments>,
}

/// Parses a videos-list JSON body, stamping every snapshot with
/// `fetched_at`.
///
/// Counters arrive as decimal strings (plain integers are accepted too).
/// A missing `dislikeCount` or `likeCount` maps to absent; a missing
/// `commentCount` marks comments as disabled.
pub fn parse_page(body: &str, fetched_at: DateTime<Utc>) -> Result<ParsedPage, FetchError> {
    let root: Value = serde_json::from_str(body).map_err(|e| FetchError::Parse {
        field: "<body>".into(),
        message: e.to_string(),
    })?;
    let next_token = match root.get("nextPageToken") {
        None | Some(Value::Null) => None,
        Some(Value::String(t)) => Some(t.clone()),
        Some(other) => {
            return Err(parse_err(
                "nextPageToken",
                format!("expected string, got {other}"),
            ))
        }
    };
    let items = match root.get("items") {
        None | Some(Value::Null) => &[][..],
        Some(Value::Array(items)) => items.as_slice(),
        Some(_) => return Err(parse_err("items", "expected an array".into())),
    };

    let mut snapshots = Vec::with_capacity(items.len());
    let mut warnings = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let (snap, warning) = parse_item(item, i, fetched_at)?.normalized();
        snapshots.push(snap);
        warnings.extend(warning);
    }
    Ok(ParsedPage {
        snapshots,
        next_token,
        warnings,
    })
}

fn parse_item(
    item: &Value,
    i: usize,
    fetched_at: DateTime<Utc>,
) -> Result<VideoStatsSnapshot, FetchError> {
    let video_id = match item.get("id") {
        Some(Value::String(id)) if !id.is_empty() => id.clone(),
        // search-style results nest the id
        Some(Value::Object(obj)) => match obj.get("videoId") {
            Some(Value::String(id)) if !id.is_empty() => id.clone(),
            _ => {
                return Err(parse_err(
                    &format!("items[{i}].id.videoId"),
                    "missing video id".into(),
                ))
            }
        },
        _ => {
            return Err(parse_err(
                &format!("items[{i}].id"),
                "missing video id".into(),
            ))
        }
    };
    let stats = item
        .get("statistics")
        .ok_or_else(|| parse_err(&format!("items[{i}].statistics"), "missing".into()))?;

    let views = count(stats, "viewCount", "views", i)?.ok_or_else(|| {
        parse_err(
            &format!("items[{i}].statistics.viewCount (views)"),
            "missing".into(),
        )
    })?;
    let likes = count(stats, "likeCount", "likes", i)?;
    let dislikes = count(stats, "dislikeCount", "dislikes", i)?;
    let comments = count(stats, "commentCount", "comments", i)?;

    let category = item
        .pointer("/snippet/categoryId")
        .and_then(Value::as_str)
        .map(|id| category_name(id).map_or_else(|| format!("Category {id}"), str::to_string))
        .unwrap_or_else(|| "Unknown".into());

    Ok(VideoStatsSnapshot::new(video_id, fetched_at, views)
        .with_votes(likes, dislikes)
        .with_comments(comments, comments.is_some())
        .with_category(category))
}

fn count(stats: &Value, key: &str, role: &str, i: usize) -> Result<Option<u64>, FetchError> {
    let field = || format!("items[{i}].statistics.{key} ({role})");
    match stats.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| parse_err(&field(), format!("not a non-negative integer: {s:?}"))),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(Some)
            .ok_or_else(|| parse_err(&field(), format!("not a non-negative integer: {n}"))),
        Some(other) => Err(parse_err(&field(), format!("unexpected value {other}"))),
    }
}

fn parse_err(field: &str, message: String) -> FetchError {
    FetchError::Parse {
        field: field.to_string(),
        message,
    }
}
