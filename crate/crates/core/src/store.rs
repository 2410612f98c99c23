//! Durable homes for the event log, and log-file parsing.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::EngineError;
use crate::event::{EventRecord, EVENT_KINDS};

/// Append-only sink for event records. Implementations must reject a record
/// whose seq is not exactly one past the last stored record.
pub trait LogStore: Send {
    fn append(&mut self, record: &EventRecord) -> Result<(), EngineError>;

    /// Flush buffered bytes to durable storage.
    fn sync(&mut self) -> Result<(), EngineError> {
        Ok(())
    }
}

fn check_next(last: u64, record: &EventRecord) -> Result<(), EngineError> {
    if record.seq != last + 1 {
        return Err(EngineError::SeqConflict {
            expected: last + 1,
            got: record.seq,
        });
    }
    Ok(())
}

/// Keeps serialized lines in memory.
#[derive(Debug, Default)]
pub struct MemoryLog {
    lines: Vec<String>,
}

impl MemoryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

impl LogStore for MemoryLog {
    fn append(&mut self, record: &EventRecord) -> Result<(), EngineError> {
        check_next(self.lines.len() as u64, record)?;
        self.lines.push(record.to_json_line());
        Ok(())
    }
}

/// JSON-lines file, one record per line, LF terminated.
#[derive(Debug)]
pub struct FileLog {
    path: PathBuf,
    file: File,
    last_seq: u64,
}

impl FileLog {
    /// Opens (creating if needed) a log file and returns it with the records it
    /// already holds.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Vec<EventRecord>), EngineError> {
        let path = path.as_ref().to_path_buf();
        let records = if path.exists() {
            let f = File::open(&path).map_err(storage(&path))?;
            parse_log(BufReader::new(f))?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(storage(&path))?;
        let last_seq = records.last().map_or(0, |r| r.seq);
        Ok((
            Self {
                path,
                file,
                last_seq,
            },
            records,
        ))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl LogStore for FileLog {
    fn append(&mut self, record: &EventRecord) -> Result<(), EngineError> {
        check_next(self.last_seq, record)?;
        let mut line = record.to_json_line();
        line.push('\n');
        let before = self.file.metadata().map_err(storage(&self.path))?.len();
        if let Err(e) = self.file.write_all(line.as_bytes()).and_then(|_| self.file.flush()) {
            // drop any torn tail so the file stays a valid log
            let _ = self.file.set_len(before);
            return Err(EngineError::Storage(format!("{}: {e}", self.path.display())));
        }
        self.last_seq = record.seq;
        Ok(())
    }

    fn sync(&mut self) -> Result<(), EngineError> {
        self.file.sync_all().map_err(storage(&self.path))
    }
}

fn storage(path: &Path) -> impl Fn(std::io::Error) -> EngineError + '_ {
    move |e| EngineError::Storage(format!("{}: {e}", path.display()))
}

/// Parses a JSON-lines log, enforcing gapless seq from 1, non-decreasing
/// timestamps and registered event kinds. A trailing empty line is allowed.
pub fn parse_log(reader: impl BufRead) -> Result<Vec<EventRecord>, EngineError> {
    let mut records: Vec<EventRecord> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let expected = records.len() as u64 + 1;
        let line = line.map_err(|e| EngineError::Storage(format!("line {}: {e}", lineno + 1)))?;
        if line.trim().is_empty() {
            return Err(EngineError::CorruptRecord {
                seq: expected,
                reason: format!("blank line {}", lineno + 1),
            });
        }
        let raw: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| EngineError::CorruptRecord {
                seq: expected,
                reason: format!("line {} is not JSON: {e}", lineno + 1),
            })?;
        let seq = raw.get("seq").and_then(|s| s.as_u64()).ok_or_else(|| {
            EngineError::CorruptRecord {
                seq: expected,
                reason: "missing seq".into(),
            }
        })?;
        if seq != expected {
            return Err(EngineError::CorruptRecord {
                seq,
                reason: format!("expected seq {expected}"),
            });
        }
        if let Some(kind) = raw.get("kind").and_then(|k| k.as_str()) {
            if !EVENT_KINDS.contains(&kind) {
                return Err(EngineError::CorruptRecord {
                    seq,
                    reason: format!("unknown event kind {kind:?}"),
                });
            }
        }
        let record: EventRecord =
            serde_json::from_value(raw).map_err(|e| EngineError::CorruptRecord {
                seq,
                reason: e.to_string(),
            })?;
        if let Some(prev) = records.last() {
            if record.ts < prev.ts {
                return Err(EngineError::CorruptRecord {
                    seq,
                    reason: "timestamp earlier than previous record".into(),
                });
            }
        }
        records.push(record);
    }
    Ok(records)
}

pub fn read_log_file(path: impl AsRef<Path>) -> Result<Vec<EventRecord>, EngineError> {
    let path = path.as_ref();
    let f = File::open(path).map_err(storage(path))?;
    parse_log(BufReader::new(f))
}

/// Serializes records back to log-file bytes.
pub fn log_bytes(records: &[EventRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        out.extend_from_slice(r.to_json_line().as_bytes());
        out.push(b'\n');
    }
    out
}
