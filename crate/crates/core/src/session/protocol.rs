//! JSON-lines machine protocol.
//!
//! Each line is one JSON object whose `type` field names the message.
//! The server greets with `hello`, the client sends one `program`, and
//! then `question` and `answer` alternate until the server sends a
//! `diagnosis` (or a `parse_error`) followed by `bye`. Unknown fields are
//! ignored. The full schema is in `docs/protocol.md`.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, ToSocketAddrs};
use std::thread;

use serde::{Deserialize, Serialize};

use super::{EventLog, QuestionView, Session, SessionError, Step, TopType};
use crate::apd::Answer;
use crate::diagnostics::Diagnosis;
use crate::lang::Span;
use crate::parser::{LanguageLevel, ParseErrorKind};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Message {
    Hello {
        version: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session_id: Option<String>,
    },
    Program {
        source: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<LanguageLevel>,
    },
    ParseError {
        error: ProgramError,
    },
    Question {
        question: QuestionView,
    },
    Answer {
        id: usize,
        answer: Answer,
    },
    Diagnosis {
        diagnosis: Diagnosis,
    },
    /// A protocol violation by the client: malformed line, stale answer id,
    /// message out of turn.
    Error {
        message: String,
    },
    Bye {
        reason: ByeReason,
        /// Inferred top-level types, when the program was well-typed.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        types: Vec<TopType>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ByeReason {
    WellTyped,
    Diagnosis,
    ParseError,
    ProtocolError,
    InternalError,
    ClientClosed,
}

/// A problem with the submitted program that stops the session before
/// debugging starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramError {
    /// `syntax`, `level_violation`, `unbound`, or `declaration`.
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_level: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<String>,
}

impl ProgramError {
    pub fn from_session_error(e: &SessionError) -> Option<ProgramError> {
        let mut out = ProgramError {
            kind: String::new(),
            message: e.to_string(),
            span: e.span(),
            feature: None,
            required_level: None,
            suggestion: None,
        };
        out.kind = match e {
            SessionError::Parse(p) => match &p.kind {
                ParseErrorKind::Syntax(_) => "syntax".into(),
                ParseErrorKind::MissingElse => "missing_else".into(),
                ParseErrorKind::LevelViolation {
                    feature,
                    required_level,
                    suggestion,
                } => {
                    out.feature = Some(feature.clone());
                    out.required_level = Some(*required_level);
                    out.suggestion = suggestion.clone();
                    "level_violation".into()
                }
            },
            SessionError::Unbound(_) => "unbound".into(),
            SessionError::Declarations(_) => "declaration".into(),
            _ => return None,
        };
        Some(out)
    }
}

/// How a protocol conversation ended.
#[derive(Debug, Clone, PartialEq)]
pub enum ServeOutcome {
    WellTyped(Vec<TopType>),
    Diagnosis(Diagnosis),
    ProgramError(ProgramError),
    ProtocolError(String),
    InternalError(String),
    /// The client went away (or said bye) before the session finished.
    ClientClosed,
}

impl ServeOutcome {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ServeOutcome::WellTyped(_) => 0,
            ServeOutcome::Diagnosis(_) => 1,
            ServeOutcome::ProgramError(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServeConfig {
    /// Level used when the `program` message does not name one.
    pub level: LanguageLevel,
    pub log: Option<EventLog>,
}

struct Conn<W: Write> {
    out: W,
}

impl<W: Write> Conn<W> {
    fn send(&mut self, m: &Message) -> io::Result<()> {
        let mut line = serde_json::to_string(m)?;
        line.push('\n');
        self.out.write_all(line.as_bytes())?;
        self.out.flush()
    }

    fn bye(&mut self, reason: ByeReason, types: Vec<TopType>) -> io::Result<()> {
        self.send(&Message::Bye { reason, types })
    }
}

/// Speak the protocol over one connection, running exactly one session.
pub fn serve(
    reader: impl BufRead,
    writer: impl Write,
    config: &ServeConfig,
) -> io::Result<ServeOutcome> {
    let mut session = Session::new(config.level);
    if let Some(log) = &config.log {
        session = session.with_log(log.clone());
    }
    let mut conn = Conn { out: writer };
    conn.send(&Message::Hello {
        version: PROTOCOL_VERSION,
        session_id: Some(session.id().to_string()),
    })?;

    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let msg: Message = match serde_json::from_str(&line) {
            Ok(m) => m,
            Err(e) => {
                let message = format!("malformed message: {e}");
                conn.send(&Message::Error {
                    message: message.clone(),
                })?;
                conn.bye(ByeReason::ProtocolError, vec![])?;
                return Ok(ServeOutcome::ProtocolError(message));
            }
        };
        let result = match msg {
            Message::Program { source, level } => {
                if let Some(level) = level {
                    let _ = session.set_level(level);
                }
                session.submit(&source)
            }
            Message::Answer { id, answer } => session.answer(id, answer),
            Message::Hello { .. } => continue,
            Message::Bye { .. } => {
                conn.bye(ByeReason::ClientClosed, vec![])?;
                return Ok(ServeOutcome::ClientClosed);
            }
            other => {
                conn.send(&Message::Error {
                    message: format!("unexpected message from client: {}", kind_of(&other)),
                })?;
                continue;
            }
        };
        match result {
            Ok(Step::Question(q)) => conn.send(&Message::Question { question: q })?,
            Ok(Step::Diagnosis(d)) => {
                conn.send(&Message::Diagnosis {
                    diagnosis: d.clone(),
                })?;
                conn.bye(ByeReason::Diagnosis, vec![])?;
                return Ok(ServeOutcome::Diagnosis(d));
            }
            Ok(Step::WellTyped(types)) => {
                conn.bye(ByeReason::WellTyped, types.clone())?;
                return Ok(ServeOutcome::WellTyped(types));
            }
            Err(e) => {
                if let Some(error) = ProgramError::from_session_error(&e) {
                    conn.send(&Message::ParseError {
                        error: error.clone(),
                    })?;
                    conn.bye(ByeReason::ParseError, vec![])?;
                    return Ok(ServeOutcome::ProgramError(error));
                }
                conn.send(&Message::Error {
                    message: e.to_string(),
                })?;
                if let SessionError::Debugger(crate::apd::ApdError::WellTyped) = e {
                    conn.bye(ByeReason::InternalError, vec![])?;
                    return Ok(ServeOutcome::InternalError(e.to_string()));
                }
            }
        }
    }
    Ok(ServeOutcome::ClientClosed)
}

fn kind_of(m: &Message) -> &'static str {
    match m {
        Message::Hello { .. } => "hello",
        Message::Program { .. } => "program",
        Message::ParseError { .. } => "parse_error",
        Message::Question { .. } => "question",
        Message::Answer { .. } => "answer",
        Message::Diagnosis { .. } => "diagnosis",
        Message::Error { .. } => "error",
        Message::Bye { .. } => "bye",
    }
}

/// Accept TCP connections forever, one session per connection, each on
/// its own thread.
pub fn listen(addr: impl ToSocketAddrs, config: ServeConfig) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    listen_on(listener, config)
}

pub fn listen_on(listener: TcpListener, config: ServeConfig) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("typedebug: connection failed: {e}");
                continue;
            }
        };
        let config = config.clone();
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(r) => BufReader::new(r),
                Err(e) => {
                    eprintln!("typedebug: connection failed: {e}");
                    return;
                }
            };
            if let Err(e) = serve(reader, stream, &config) {
                eprintln!("typedebug: connection closed: {e}");
            }
        });
    }
    Ok(())
}
