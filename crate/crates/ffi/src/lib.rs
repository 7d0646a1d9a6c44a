//! C interface to the typedebug session.
//!
//! Sessions are opaque handles created with `td_session_new` and released
//! with `td_session_free`. Every step returns a status code and, on
//! success, a JSON string in the machine protocol's message format
//! (`question`, `diagnosis`, `parse_error`, or `bye`). Strings returned by
//! the library are owned by the caller and must be released with
//! `td_string_free`. When a call fails, `td_last_error` describes why.
//!
//! A handle must not be used from two threads at once; distinct handles
//! are independent.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use typedebug::parser::LanguageLevel;
use typedebug::session::protocol::{ByeReason, Message, ProgramError};
use typedebug::session::script::{parse_answer, parse_script};
use typedebug::session::{run_step, Phase, Session, SessionError, Step};

/// Result of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    /// The call succeeded; any output has been written.
    Ok = 0,
    /// A null pointer, invalid UTF-8, a bad level, or a malformed answer.
    InvalidArgument = 1,
    /// The program does not parse, breaks a level restriction, or uses an
    /// unbound name. The output holds a `parse_error` message.
    ProgramError = 2,
    /// The call does not fit the session's state: answering a question
    /// that is not pending, naming a variable not in the question, or
    /// submitting twice.
    SessionState = 3,
    /// An unexpected failure inside the library.
    Internal = 4,
}

/// Where a session stands.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdPhase {
    AwaitingProgram = 0,
    Debugging = 1,
    Done = 2,
    WellTyped = 3,
    Failed = 4,
}

/// An opaque debugging session.
pub struct TdSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).unwrap_or_default());
}

/// Run `f`, turning panics into `TdStatus::Internal`.
fn guard(f: impl FnOnce() -> TdStatus) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {what}"));
            TdStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, TdStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(TdStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        TdStatus::InvalidArgument
    })
}

fn level(n: u8) -> Result<LanguageLevel, TdStatus> {
    LanguageLevel::new(n).map_err(|e| {
        set_error(e);
        TdStatus::InvalidArgument
    })
}

unsafe fn write_json(out: *mut *mut c_char, m: &Message) -> TdStatus {
    if out.is_null() {
        return TdStatus::Ok;
    }
    match serde_json::to_string(m).map(CString::new) {
        Ok(Ok(s)) => {
            *out = s.into_raw();
            TdStatus::Ok
        }
        _ => {
            set_error("could not encode the result");
            TdStatus::Internal
        }
    }
}

fn step_message(step: Step) -> Message {
    match step {
        Step::Question(question) => Message::Question { question },
        Step::Diagnosis(diagnosis) => Message::Diagnosis { diagnosis },
        Step::WellTyped(types) => Message::Bye {
            reason: ByeReason::WellTyped,
            types,
        },
    }
}

unsafe fn finish(result: Result<Step, SessionError>, out: *mut *mut c_char) -> TdStatus {
    match result {
        Ok(step) => write_json(out, &step_message(step)),
        Err(e) => {
            set_error(e.to_string());
            match ProgramError::from_session_error(&e) {
                Some(error) => {
                    let status = write_json(out, &Message::ParseError { error });
                    if status == TdStatus::Ok {
                        TdStatus::ProgramError
                    } else {
                        status
                    }
                }
                None => TdStatus::SessionState,
            }
        }
    }
}

/// Message describing the last failed call on this thread. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn td_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Create a session at `level` (1 to 4). Returns null if the level is out
/// of range.
#[no_mangle]
pub extern "C" fn td_session_new(level_number: u8) -> *mut TdSession {
    match level(level_number) {
        Ok(l) => Box::into_raw(Box::new(TdSession {
            inner: Session::new(l),
        })),
        Err(_) => ptr::null_mut(),
    }
}

/// Release a session. Null is ignored.
///
/// # Safety
/// `session` must come from `td_session_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn td_session_free(session: *mut TdSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Submit the program. On success `*out_json` receives the first step.
///
/// # Safety
/// `session` must be a live handle, `source` a NUL-terminated string, and
/// `out_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn td_session_submit(
    session: *mut TdSession,
    source: *const c_char,
    out_json: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            set_error("session is null");
            return TdStatus::InvalidArgument;
        };
        let source = match read_str(source, "source") {
            Ok(s) => s,
            Err(status) => return status,
        };
        finish(s.inner.submit(source), out_json)
    })
}

/// Answer the pending question `question_id` with `y`, `n`, or
/// `n:<variable>`. On success `*out_json` receives the next step.
///
/// # Safety
/// As for `td_session_submit`.
#[no_mangle]
pub unsafe extern "C" fn td_session_answer(
    session: *mut TdSession,
    question_id: usize,
    answer: *const c_char,
    out_json: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            set_error("session is null");
            return TdStatus::InvalidArgument;
        };
        let answer = match read_str(answer, "answer").map(parse_answer) {
            Ok(Ok(a)) => a,
            Ok(Err(e)) => {
                set_error(e);
                return TdStatus::InvalidArgument;
            }
            Err(status) => return status,
        };
        finish(s.inner.answer(question_id, answer), out_json)
    })
}

/// # Safety
/// `session` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn td_session_phase(session: *const TdSession) -> TdPhase {
    match session.as_ref().map(|s| s.inner.phase()) {
        None | Some(Phase::Failed(_)) => TdPhase::Failed,
        Some(Phase::AwaitingProgram) => TdPhase::AwaitingProgram,
        Some(Phase::Debugging(_)) => TdPhase::Debugging,
        Some(Phase::Done(_)) => TdPhase::Done,
        Some(Phase::WellTyped(_)) => TdPhase::WellTyped,
    }
}

/// Run a whole session in one call with a scripted answer list (one
/// answer per line). `*out_json` receives the final step, or the pending
/// question if the script runs out.
///
/// # Safety
/// `source` and `answers` must be NUL-terminated strings (`answers` may be
/// null for no answers) and `out_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn td_run_script(
    source: *const c_char,
    level_number: u8,
    answers: *const c_char,
    out_json: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let source = match read_str(source, "source") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let script = if answers.is_null() {
            ""
        } else {
            match read_str(answers, "answers") {
                Ok(s) => s,
                Err(status) => return status,
            }
        };
        let answers = match parse_script(script) {
            Ok(a) => a,
            Err(e) => {
                set_error(e);
                return TdStatus::InvalidArgument;
            }
        };
        let level = match level(level_number) {
            Ok(l) => l,
            Err(status) => return status,
        };
        finish(run_step(source, level, &answers), out_json)
    })
}
