use std::collections::HashMap;
use std::mem::discriminant;
use std::path::Path;

use super::{read, read_level, subdirs, CorpusError};
use crate::apd::{debug, Answer, Oracle, Outcome, Question};
use crate::diagnostics::{diagnose, Diagnosis};
use crate::lang::{match_instance, LineIndex, Span, Ty};
use crate::mgtt::{Mgtt, NodeId, Typing};
use crate::parser::LanguageLevel;
use crate::session::script::format_answer;
use crate::session::{analyze, Analysis, QuestionView, SessionError};

#[derive(Debug, Clone, PartialEq)]
pub struct Mutant {
    pub name: String,
    pub level: LanguageLevel,
    pub original: String,
    pub mutated: String,
}

impl Mutant {
    pub fn load(dir: &Path) -> Result<Mutant, CorpusError> {
        Ok(Mutant {
            name: dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            level: read_level(dir)?,
            original: read(&dir.join("original.ml"))?,
            mutated: read(&dir.join("mutated.ml"))?,
        })
    }
}

pub fn load_mutants(root: &Path) -> Result<Vec<Mutant>, CorpusError> {
    subdirs(root)?
        .iter()
        .filter(|d| d.join("mutated.ml").exists())
        .map(|d| Mutant::load(d))
        .collect()
}

/// The region of `mutated` that differs from `original`: everything
/// between their longest common prefix and longest common suffix.
pub fn edit_span(original: &str, mutated: &str) -> Span {
    let prefix = original
        .char_indices()
        .zip(mutated.chars())
        .find(|((_, a), b)| a != b)
        .map(|((i, _), _)| i)
        .unwrap_or(original.len().min(mutated.len()));
    let max_suffix = original.len().min(mutated.len()) - prefix;
    let suffix = original[prefix..]
        .chars()
        .rev()
        .zip(mutated[prefix..].chars().rev())
        .take_while(|(a, b)| a == b)
        .map(|(a, _)| a.len_utf8())
        .scan(0, |acc, n| {
            *acc += n;
            Some(*acc)
        })
        .take_while(|&n| n <= max_suffix)
        .last()
        .unwrap_or(0);
    LineIndex::new(mutated).span(prefix, mutated.len() - suffix)
}

/// How positions in the mutated text map back to the original: unchanged
/// before the edit, shifted by the length change after it, and undefined
/// inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    pub edit: Span,
    pub delta: isize,
}

impl Alignment {
    pub fn new(original: &str, mutated: &str) -> Self {
        Alignment {
            edit: edit_span(original, mutated),
            delta: mutated.len() as isize - original.len() as isize,
        }
    }

    fn position(&self, p: usize) -> Option<usize> {
        if p <= self.edit.start_byte {
            Some(p)
        } else if p >= self.edit.end_byte {
            Some((p as isize - self.delta) as usize)
        } else {
            None
        }
    }

    /// Byte range in the original text of a mutated span.
    pub fn original(&self, s: &Span) -> Option<(usize, usize)> {
        Some((self.position(s.start_byte)?, self.position(s.end_byte)?))
    }
}

/// An oracle that knows the intended program. The question's node is
/// matched with the node of the same kind covering the same text in the
/// original; its typing is intended when it equals the original node's up
/// to renaming of type variables. When only a variable's assumed type
/// differs, that variable is reported.
pub fn automatic_oracle<'a>(
    original: &'a Analysis,
    align: Alignment,
) -> impl FnMut(&Mgtt, &Question) -> Option<Answer> + 'a {
    let mut by_range: HashMap<(usize, usize), Vec<NodeId>> = HashMap::new();
    for (id, n) in original.mgtt.nodes.iter().enumerate() {
        by_range
            .entry((n.span.start_byte, n.span.end_byte))
            .or_default()
            .push(id);
    }
    move |m, q| {
        let kind = discriminant(&m.expr(q.node).kind);
        let counterpart = align.original(&q.span).and_then(|range| {
            let same_kind: Vec<NodeId> = by_range
                .get(&range)?
                .iter()
                .copied()
                .filter(|&o| discriminant(&original.mgtt.expr(o).kind) == kind)
                .collect();
            same_kind
                .iter()
                .copied()
                .find(|&o| original.mgtt.node(o).node_ref == q.node_ref)
                .or(same_kind.first().copied())
        });
        let intended = counterpart.and_then(|o| original.mgtt.node(o).typing());
        Some(match intended {
            Some(t) => judge(t, &q.typing),
            None => Answer::UnintendedType,
        })
    }
}

fn same_up_to_renaming(a: &[Ty], b: &[Ty]) -> bool {
    match_instance(a, b).is_some() && match_instance(b, a).is_some()
}

fn judge(intended: &Typing, actual: &Typing) -> Answer {
    let mut want: Vec<Ty> = vec![intended.ty.clone()];
    let mut got: Vec<Ty> = vec![actual.ty.clone()];
    if !same_up_to_renaming(&want, &got) {
        return Answer::UnintendedType;
    }
    for d in &actual.env {
        let Some(w) = intended.lookup_name(&d.name) else {
            continue;
        };
        want.push(w.ty.clone());
        got.push(d.ty.clone());
        if !same_up_to_renaming(&want, &got) {
            return Answer::UnintendedBinding(d.name.clone());
        }
    }
    Answer::Intended
}

#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    pub name: String,
    /// The edited region of the mutated program.
    pub mutated: Span,
    /// The node the debugger blamed.
    pub blamed: Span,
    pub hit: bool,
    pub diagnosis: Diagnosis,
    /// Each question with the oracle's answer, as `question => answer`.
    pub transcript: Vec<String>,
}

/// Debug the mutated program with the automatic oracle and check whether
/// the blamed node overlaps the edit.
pub fn localize(m: &Mutant) -> Result<Localization, SessionError> {
    let original = analyze(&m.original, m.level)?;
    if original.failing.is_some() {
        return Err(SessionError::Declarations(format!(
            "{}: the original program is ill-typed",
            m.name
        )));
    }
    let mut broken = analyze(&m.mutated, m.level)?;
    let root = broken.failing.ok_or(SessionError::Debugger(
        crate::apd::ApdError::WellTyped,
    ))?;
    let mut oracle = automatic_oracle(&original, Alignment::new(&m.original, &m.mutated));
    let outcome = debug(&broken.mgtt, root, &mut oracle as &mut dyn Oracle)
        .map_err(SessionError::Debugger)?;
    let Outcome::Done {
        verdict,
        transcript,
    } = outcome
    else {
        unreachable!("the automatic oracle always answers")
    };
    let blamed = broken.mgtt.node(verdict.node()).span;
    let mutated = edit_span(&m.original, &m.mutated);
    let diagnosis = diagnose(
        &broken.mgtt,
        &verdict,
        &broken.decls,
        m.level,
        &mut broken.supply,
    );
    Ok(Localization {
        name: m.name.clone(),
        hit: blamed.overlaps(&mutated),
        mutated,
        blamed,
        diagnosis,
        transcript: transcript
            .iter()
            .map(|(q, a)| {
                format!(
                    "{} => {}",
                    QuestionView::new(q, &m.mutated).text,
                    format_answer(a)
                )
            })
            .collect(),
    })
}
