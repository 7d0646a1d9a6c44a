//! Append-only JSONL event log.
//!
//! One record per line: `{timestamp, session_id, event_type, payload}`.
//! Several sessions may share one log; records are written whole under a
//! lock so lines never interleave mid-record.

use std::fs::OpenOptions;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::apd::Answer;
use crate::diagnostics::Diagnosis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub timestamp: String,
    pub session_id: String,
    pub event_type: String,
    pub payload: serde_json::Value,
}

#[derive(Clone)]
pub struct EventLog {
    sink: Arc<Mutex<Box<dyn Write + Send>>>,
}

impl std::fmt::Debug for EventLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("EventLog")
    }
}

impl EventLog {
    pub fn new(sink: impl Write + Send + 'static) -> Self {
        EventLog {
            sink: Arc::new(Mutex::new(Box::new(sink))),
        }
    }

    /// Open `path` for appending, creating it if needed.
    pub fn append_to(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(EventLog::new(file))
    }

    /// Write one record. Failures go to stderr and are otherwise ignored.
    pub fn record(&self, session_id: &str, event_type: &str, payload: serde_json::Value) {
        let record = LogRecord {
            timestamp: chrono::Utc::now().to_rfc3339(),
            session_id: session_id.to_string(),
            event_type: event_type.to_string(),
            payload,
        };
        if let Err(e) = self.write(&record) {
            eprintln!("typedebug: could not write log record: {e}");
        }
    }

    fn write(&self, record: &LogRecord) -> io::Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut sink = self
            .sink
            .lock()
            .map_err(|_| io::Error::other("log lock poisoned"))?;
        sink.write_all(line.as_bytes())?;
        sink.flush()
    }
}

pub fn read_log(reader: impl BufRead) -> io::Result<Vec<LogRecord>> {
    reader
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| {
            let l = l?;
            serde_json::from_str(&l).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
        })
        .collect()
}

/// Everything needed to replay one logged session.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedSession {
    pub session_id: String,
    pub source: String,
    pub level: u8,
    pub answers: Vec<Answer>,
    pub diagnosis: Option<Diagnosis>,
}

/// Group records by session, in order of first appearance.
pub fn sessions(records: &[LogRecord]) -> Vec<LoggedSession> {
    let mut out: Vec<LoggedSession> = Vec::new();
    for r in records {
        let idx = match out.iter().position(|s| s.session_id == r.session_id) {
            Some(i) => i,
            None => {
                out.push(LoggedSession {
                    session_id: r.session_id.clone(),
                    source: String::new(),
                    level: 4,
                    answers: Vec::new(),
                    diagnosis: None,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        match r.event_type.as_str() {
            "program_submitted" => {
                s.source = r.payload["source"].as_str().unwrap_or_default().to_string();
                s.level = r.payload["level"].as_u64().unwrap_or(4) as u8;
            }
            "answer_given" => {
                if let Ok(a) = serde_json::from_value(r.payload["answer"].clone()) {
                    s.answers.push(a);
                }
            }
            "diagnosis_emitted" => {
                s.diagnosis = serde_json::from_value(r.payload.clone()).ok();
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    struct Broken;

    impl Write for Broken {
        fn write(&mut self, _: &[u8]) -> io::Result<usize> {
            Err(io::Error::other("disk full"))
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn records_are_one_json_object_per_line() {
        let buf = Shared::default();
        let log = EventLog::new(buf.clone());
        log.record("s1", "program_submitted", serde_json::json!({"source": "1", "level": 2}));
        log.record("s1", "answer_given", serde_json::json!({"id": 0, "answer": {"kind": "intended"}}));
        let bytes = buf.0.lock().unwrap().clone();
        let records = read_log(&bytes[..]).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].event_type, "program_submitted");
        assert!(chrono::DateTime::parse_from_rfc3339(&records[0].timestamp).is_ok());
        let s = sessions(&records);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].level, 2);
        assert_eq!(s[0].answers, vec![Answer::Intended]);
    }

    #[test]
    fn write_failures_do_not_panic() {
        EventLog::new(Broken).record("s", "answer_given", serde_json::Value::Null);
    }
}
