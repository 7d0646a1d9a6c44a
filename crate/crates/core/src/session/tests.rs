use std::io::Write;
use std::sync::{Arc, Mutex};

use super::*;
use crate::diagnostics::DiagnosisKind;

const GCD: &str = "let rec gcd m n = if n = 0 then m else gcd n";

#[derive(Clone, Default)]
struct Buf(Arc<Mutex<Vec<u8>>>);

impl Write for Buf {
    fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(b);
        Ok(b.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[test]
fn gcd_session_asks_then_diagnoses() {
    let buf = Buf::default();
    let mut s = Session::new(LanguageLevel::FULL).with_log(EventLog::new(buf.clone()));
    let Step::Question(q) = s.submit(GCD).unwrap() else {
        panic!("expected a question")
    };
    assert_eq!(q.id, 0);
    assert!(q.text.starts_with("Is it your intention that"), "{}", q.text);
    assert_eq!(s.phase(), &Phase::Debugging(0));
    let Step::Diagnosis(d) = s.answer(0, Answer::Intended).unwrap() else {
        panic!("expected a diagnosis")
    };
    assert_eq!(d.kind(), DiagnosisKind::RecursiveUseMismatch);
    assert!(matches!(s.phase(), Phase::Done(_)));
    assert_eq!(s.transcript().len(), 1);

    let records = log::read_log(&buf.0.lock().unwrap()[..]).unwrap();
    let kinds: Vec<&str> = records.iter().map(|r| r.event_type.as_str()).collect();
    assert_eq!(
        kinds,
        ["program_submitted", "question_asked", "answer_given", "diagnosis_emitted"]
    );
    assert_eq!(records[3].payload["code"], 11);
    assert!(records[3].payload["highlights"].is_array());
    assert!(records.iter().all(|r| r.session_id == s.id()));
}

#[test]
fn stale_and_unknown_answers_are_rejected_without_state_change() {
    let mut s = Session::new(LanguageLevel::FULL);
    s.submit(GCD).unwrap();
    assert_eq!(
        s.answer(5, Answer::Intended),
        Err(SessionError::StaleAnswer { got: 5, pending: 0 })
    );
    assert_eq!(
        s.answer(0, Answer::UnintendedBinding("nope".into())),
        Err(SessionError::UnknownBinding("nope".into()))
    );
    assert_eq!(s.phase(), &Phase::Debugging(0));
    assert!(s.transcript().is_empty());
}

#[test]
fn session_order_is_enforced() {
    let mut s = Session::new(LanguageLevel::FULL);
    assert_eq!(s.answer(0, Answer::Intended), Err(SessionError::NoProgram));
    s.submit("let x = 1").unwrap();
    assert_eq!(s.submit("1"), Err(SessionError::ProgramAlreadySubmitted));
    assert_eq!(s.answer(0, Answer::Intended), Err(SessionError::NoPendingQuestion));
}

#[test]
fn well_typed_program_reports_types() {
    let step = run_step("let id x = x\nlet n = id 3;;\n1 + 2", LanguageLevel::FULL, &[]).unwrap();
    let Step::WellTyped(types) = step else {
        panic!("expected well-typed")
    };
    let lines: Vec<String> = types.iter().map(TopType::line).collect();
    assert_eq!(lines, ["val id : 'a -> 'a", "val n : int", "- : int"]);
}

#[test]
fn missing_else_is_a_diagnosis() {
    let step = run_step("let f x = if x then 1", LanguageLevel::BEGINNER, &[]).unwrap();
    let Step::Diagnosis(d) = step else {
        panic!("expected a diagnosis")
    };
    assert_eq!(d.kind(), DiagnosisKind::MissingElse);
}

#[test]
fn program_errors_are_classified() {
    let e = run_step("let x = ", LanguageLevel::FULL, &[]).unwrap_err();
    assert!(e.is_program_error());
    let e = run_step("let x = y", LanguageLevel::FULL, &[]).unwrap_err();
    assert!(matches!(e, SessionError::Unbound(_)));
    let e = run_step("while true do () done", LanguageLevel::BEGINNER, &[]).unwrap_err();
    assert!(e.is_program_error() && e.span().is_some());
}

#[test]
fn steps_are_deterministic() {
    let a = run_step(GCD, LanguageLevel::FULL, &[Answer::Intended]).unwrap();
    let b = run_step(GCD, LanguageLevel::FULL, &[Answer::Intended]).unwrap();
    assert_eq!(a, b);
    let t = transcript(GCD, LanguageLevel::FULL, &[Answer::Intended]).unwrap();
    assert_eq!(t.len(), 1);
}
