//! One debugging session: a program, the answers given so far, and the
//! next question or the final diagnosis.
//!
//! Every step re-runs the whole pipeline (parse, type trees, debugger,
//! diagnostics) from the source and the accumulated answers, with a fresh
//! type-variable counter. A step is therefore a pure function of its
//! inputs, which makes logged sessions replayable byte for byte.

pub mod cli;
pub mod log;
mod pipeline;
pub mod protocol;
pub mod render;
pub mod script;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apd::{debug, make_question, Answer, ApdError, Outcome, Question, ReplayOracle};
use crate::diagnostics::{diagnose, Diagnosis};
use crate::lang::Span;
use crate::mgtt::NodeRef;
use crate::parser::{LanguageLevel, ParseError, ParseErrorKind};
use crate::typeinf::TypeError;
pub use log::{EventLog, LogRecord};
pub use pipeline::{analyze, Analysis, TopType};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("{0}")]
    Declarations(String),
    #[error("{0}")]
    Unbound(TypeError),
    #[error("{0}")]
    Debugger(ApdError),
    #[error("no program has been submitted yet")]
    NoProgram,
    #[error("a program has already been submitted")]
    ProgramAlreadySubmitted,
    #[error("answer to question {got}, but the pending question is {pending}")]
    StaleAnswer { got: usize, pending: usize },
    #[error("no question is pending")]
    NoPendingQuestion,
    #[error("{0} is not a variable of the expression in question")]
    UnknownBinding(String),
}

impl SessionError {
    /// Errors in the submitted program, as opposed to misuse of the session.
    pub fn is_program_error(&self) -> bool {
        matches!(
            self,
            SessionError::Parse(_) | SessionError::Declarations(_) | SessionError::Unbound(_)
        )
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            SessionError::Parse(e) => Some(e.span),
            SessionError::Unbound(e) => Some(e.span),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShownBinding {
    pub name: String,
    pub ty: String,
}

/// A question as presented to the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionView {
    /// Position in the session, from 0; answers must quote it.
    pub id: usize,
    pub node: NodeRef,
    pub span: Span,
    /// The expression's source text with whitespace collapsed.
    pub excerpt: String,
    pub shown_env: Vec<ShownBinding>,
    pub shown_ty: String,
    pub text: String,
}

impl QuestionView {
    pub fn new(q: &Question, source: &str) -> Self {
        let excerpt = q.span.text(source).split_whitespace().collect::<Vec<_>>().join(" ");
        let shown_env: Vec<ShownBinding> = q
            .rendered
            .env
            .iter()
            .map(|(name, ty)| ShownBinding {
                name: name.clone(),
                ty: ty.clone(),
            })
            .collect();
        let mut text = format!(
            "Is it your intention that {excerpt} has type {}",
            q.rendered.ty
        );
        if !shown_env.is_empty() {
            let env: Vec<String> = shown_env
                .iter()
                .map(|b| format!("{} : {}", b.name, b.ty))
                .collect();
            text.push_str(&format!(" where {}", env.join(", ")));
        }
        text.push('?');
        QuestionView {
            id: q.seq,
            node: q.node_ref.clone(),
            span: q.span,
            excerpt,
            shown_env,
            shown_ty: q.rendered.ty.clone(),
            text,
        }
    }

    pub fn has_binding(&self, name: &str) -> bool {
        self.shown_env.iter().any(|b| b.name == name)
    }
}

/// Where a step of the session ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// The program type-checks; nothing to debug.
    WellTyped(Vec<TopType>),
    Question(QuestionView),
    Diagnosis(Diagnosis),
}

/// Run the pipeline on `source` with the given answers, in order.
pub fn run_step(
    source: &str,
    level: LanguageLevel,
    answers: &[Answer],
) -> Result<Step, SessionError> {
    let mut a = match analyze(source, level) {
        Ok(a) => a,
        Err(SessionError::Parse(ParseError {
            kind: ParseErrorKind::MissingElse,
            span,
        })) => return Ok(Step::Diagnosis(Diagnosis::missing_else(span))),
        Err(e) => return Err(e),
    };
    let Some(root) = a.failing else {
        return Ok(Step::WellTyped(a.types));
    };
    let mut oracle = ReplayOracle::new(answers.to_vec());
    match debug(&a.mgtt, root, &mut oracle).map_err(SessionError::Debugger)? {
        Outcome::Pending { question, .. } => Ok(Step::Question(QuestionView::new(&question, source))),
        Outcome::Done { verdict, .. } => Ok(Step::Diagnosis(diagnose(
            &a.mgtt,
            &verdict,
            &a.decls,
            level,
            &mut a.supply,
        ))),
    }
}

/// Questions asked during a completed or pending run, with the answers
/// given; the pending question, if any, comes last without an answer.
pub fn transcript(
    source: &str,
    level: LanguageLevel,
    answers: &[Answer],
) -> Result<Vec<QuestionView>, SessionError> {
    let a = analyze(source, level)?;
    let Some(root) = a.failing else {
        return Ok(vec![]);
    };
    let mut oracle = ReplayOracle::new(answers.to_vec());
    let (asked, pending) = match debug(&a.mgtt, root, &mut oracle).map_err(SessionError::Debugger)? {
        Outcome::Pending {
            question,
            transcript,
        } => (transcript, Some(question)),
        Outcome::Done { transcript, .. } => (transcript, None),
    };
    Ok(asked
        .iter()
        .map(|(q, _)| q)
        .chain(pending.as_ref())
        .map(|q| QuestionView::new(q, source))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    AwaitingProgram,
    /// Waiting for the answer to the question with this id.
    Debugging(usize),
    Done(Diagnosis),
    WellTyped(Vec<TopType>),
    Failed(String),
}

/// A stateful session driven one submission or answer at a time.
#[derive(Debug)]
pub struct Session {
    id: String,
    level: LanguageLevel,
    source: Option<String>,
    phase: Phase,
    pending: Option<QuestionView>,
    transcript: Vec<(QuestionView, Answer)>,
    log: Option<EventLog>,
}

impl Session {
    pub fn new(level: LanguageLevel) -> Self {
        Session {
            id: uuid::Uuid::new_v4().to_string(),
            level,
            source: None,
            phase: Phase::AwaitingProgram,
            pending: None,
            transcript: Vec::new(),
            log: None,
        }
    }

    pub fn with_log(mut self, log: EventLog) -> Self {
        self.log = Some(log);
        self
    }

    /// Change the language level before a program has been submitted.
    pub fn set_level(&mut self, level: LanguageLevel) -> Result<(), SessionError> {
        if self.phase != Phase::AwaitingProgram {
            return Err(SessionError::ProgramAlreadySubmitted);
        }
        self.level = level;
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn level(&self) -> LanguageLevel {
        self.level
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    pub fn pending(&self) -> Option<&QuestionView> {
        self.pending.as_ref()
    }

    pub fn transcript(&self) -> &[(QuestionView, Answer)] {
        &self.transcript
    }

    pub fn answers(&self) -> Vec<Answer> {
        self.transcript.iter().map(|(_, a)| a.clone()).collect()
    }

    pub fn submit(&mut self, source: &str) -> Result<Step, SessionError> {
        if self.phase != Phase::AwaitingProgram {
            return Err(SessionError::ProgramAlreadySubmitted);
        }
        self.source = Some(source.to_string());
        self.event(
            "program_submitted",
            serde_json::json!({ "source": source, "level": self.level.get() }),
        );
        self.advance()
    }

    pub fn answer(&mut self, id: usize, answer: Answer) -> Result<Step, SessionError> {
        let pending = match (&self.phase, &self.pending) {
            (Phase::Debugging(_), Some(q)) => q.clone(),
            (Phase::AwaitingProgram, _) => return Err(SessionError::NoProgram),
            _ => return Err(SessionError::NoPendingQuestion),
        };
        if id != pending.id {
            return Err(SessionError::StaleAnswer {
                got: id,
                pending: pending.id,
            });
        }
        if let Answer::UnintendedBinding(x) = &answer {
            if !pending.has_binding(x) {
                return Err(SessionError::UnknownBinding(x.clone()));
            }
        }
        self.event(
            "answer_given",
            serde_json::json!({ "id": id, "answer": answer }),
        );
        self.transcript.push((pending, answer));
        self.pending = None;
        self.advance()
    }

    fn advance(&mut self) -> Result<Step, SessionError> {
        let source = self.source.clone().ok_or(SessionError::NoProgram)?;
        match run_step(&source, self.level, &self.answers()) {
            Ok(step) => {
                match &step {
                    Step::Question(q) => {
                        self.event("question_asked", serde_json::json!(q));
                        self.phase = Phase::Debugging(q.id);
                        self.pending = Some(q.clone());
                    }
                    Step::Diagnosis(d) => {
                        self.event("diagnosis_emitted", serde_json::json!(d));
                        self.phase = Phase::Done(d.clone());
                    }
                    Step::WellTyped(types) => {
                        self.phase = Phase::WellTyped(types.clone());
                    }
                }
                Ok(step)
            }
            Err(e) => {
                self.phase = Phase::Failed(e.to_string());
                Err(e)
            }
        }
    }

    fn event(&self, event_type: &str, payload: serde_json::Value) {
        if let Some(log) = &self.log {
            log.record(&self.id, event_type, payload);
        }
    }
}

/// Build the question for a node outside a debugging run.
pub fn question_for(a: &Analysis, node: usize, source: &str) -> Option<QuestionView> {
    make_question(&a.mgtt, node, 0).map(|q| QuestionView::new(&q, source))
}

#[cfg(test)]
mod tests;
