//! On-disk formats: JSON Lines logs, the JSON manifest, and the items CSV.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ids::ItemId;
use crate::store::{ExperimentManifest, Item, JudgementRecord};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const LOG_FILE: &str = "judgements.jsonl";
pub const SESSIONS_FILE: &str = "sessions.jsonl";

/// Reads a judgement log. Every line must parse and sequence numbers must be
/// strictly increasing; the first violation fails with its 1-based line number.
pub fn load_log(path: &Path) -> Result<Vec<JudgementRecord>> {
    let records: Vec<JudgementRecord> = load_jsonl(path)?;
    let mut prev: Option<u64> = None;
    for (idx, rec) in records.iter().enumerate() {
        let fail = |reason: String| Error::Load {
            path: path.to_path_buf(),
            line: idx + 1,
            reason,
        };
        rec.check_shape().map_err(fail)?;
        if let Some(p) = prev {
            if rec.seq <= p {
                return Err(fail(format!(
                    "sequence number {} does not follow {p}",
                    rec.seq
                )));
            }
        }
        prev = Some(rec.seq);
    }
    Ok(records)
}

/// Parses one JSON value per line, naming the first bad line.
pub(crate) fn load_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let value = serde_json::from_str(&line).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Serialises a value as one newline-terminated line.
pub(crate) fn jsonl_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec(value)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Appends one line with a single write and syncs it before returning.
pub(crate) fn append_line(file: &mut File, path: &Path, line: &[u8]) -> Result<()> {
    file.write_all(line).map_err(|e| Error::io(path, e))?;
    file.sync_data().map_err(|e| Error::io(path, e))
}

pub(crate) fn open_append(path: &Path) -> Result<File> {
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))
}

/// Writes a complete JSON Lines file, replacing any existing one.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    for rec in records {
        buf.extend(jsonl_line(rec)?);
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn write_log(path: &Path, records: &[JudgementRecord]) -> Result<()> {
    write_jsonl(path, records)
}

pub fn read_manifest(path: &Path) -> Result<ExperimentManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: ExperimentManifest = serde_json::from_str(&text).map_err(|e| Error::Load {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    manifest.validate()?;
    Ok(manifest)
}

pub fn write_manifest(path: &Path, manifest: &ExperimentManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    // write-then-rename so a crash never leaves a half-written manifest
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads items from CSV with header `item_id,content`.
pub fn read_items_csv<R: Read>(reader: R) -> Result<Vec<Item>> {
    #[derive(serde::Deserialize)]
    struct Row {
        item_id: u32,
        content: String,
    }
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["item_id", "content"] {
        return Err(Error::InvalidArgument(format!(
            "items CSV header must be `item_id,content`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize::<Row>()
        .map(|row| {
            let row = row?;
            Ok(Item {
                item_id: ItemId(row.item_id),
                content: row.content,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(seq: u64) -> JudgementRecord {
        JudgementRecord::for_test(seq, ItemId(1), ItemId(2), ItemId(1))
    }

    #[test]
    fn missing_log_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_log(&dir.path().join(LOG_FILE)).unwrap().is_empty());
    }

    #[test]
    fn truncated_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(LOG_FILE);
        write_log(&path, &[rec(1), rec(2), rec(3)]).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 20);
        fs::write(&path, bytes).unwrap();
        match load_log(&path).unwrap_err() {
            Error::Load { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_order_sequence_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(LOG_FILE);
        write_log(&path, &[rec(1), rec(3), rec(2)]).unwrap();
        assert!(matches!(load_log(&path).unwrap_err(), Error::Load { line: 3, .. }));
    }

    #[test]
    fn items_csv() {
        let csv = "item_id,content\n1,\"hello, world\"\n2,second\n";
        let items = read_items_csv(csv.as_bytes()).unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].content, "hello, world");
        assert!(read_items_csv("id,text\n1,a\n".as_bytes()).is_err());
    }
}
