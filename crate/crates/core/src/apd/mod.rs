//! Two-step algorithmic program debugging over the type tree.
//!
//! Step one walks down to the leftmost ill-typed node whose children are
//! all well-typed; that step needs no user input. Step two asks the user
//! whether the types of nodes are the intended ones and follows the
//! unintended ones down to the error source.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{Namer, Span};
use crate::mgtt::{Leaf, Mgtt, NodeId, NodeRef, RenderedTyping, Typing};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Answer {
    Intended,
    UnintendedType,
    /// The type demanded of this variable is not the intended one.
    UnintendedBinding(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    /// Position of the question in the session, from 0.
    pub seq: usize,
    pub node: NodeId,
    pub node_ref: NodeRef,
    pub span: Span,
    pub typing: Typing,
    pub rendered: RenderedTyping,
}

/// Source of answers. `None` means no answer is available yet, which
/// suspends debugging with the question pending.
pub trait Oracle {
    fn answer(&mut self, m: &Mgtt, q: &Question) -> Option<Answer>;
}

/// Replays a fixed answer list, then reports pending.
#[derive(Debug, Clone, Default)]
pub struct ReplayOracle {
    answers: Vec<Answer>,
    next: usize,
}

impl ReplayOracle {
    pub fn new(answers: Vec<Answer>) -> Self {
        ReplayOracle { answers, next: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl Oracle for ReplayOracle {
    fn answer(&mut self, _m: &Mgtt, _q: &Question) -> Option<Answer> {
        let a = self.answers.get(self.next).cloned();
        if a.is_some() {
            self.next += 1;
        }
        a
    }
}

impl<F: FnMut(&Mgtt, &Question) -> Option<Answer>> Oracle for F {
    fn answer(&mut self, m: &Mgtt, q: &Question) -> Option<Answer> {
        self(m, q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// An ill-typed node whose subexpressions all have intended types.
    IllTypedSource(NodeId),
    /// A well-typed node with an unintended type whose subexpressions all
    /// have intended types.
    WellTypedUnintended(NodeId),
    /// The node where the unintended type of `name` is first forced.
    ForcedBinding { node: NodeId, name: String },
}

impl Verdict {
    pub fn node(&self) -> NodeId {
        match self {
            Verdict::IllTypedSource(n) | Verdict::WellTypedUnintended(n) => *n,
            Verdict::ForcedBinding { node, .. } => *node,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Done {
        verdict: Verdict,
        transcript: Vec<(Question, Answer)>,
    },
    Pending {
        question: Question,
        transcript: Vec<(Question, Answer)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApdError {
    #[error("the program is well-typed")]
    WellTyped,
    #[error("{0} is not a variable of the expression in question")]
    UnknownBinding(String),
}

/// Run both steps from `root` (an ill-typed item).
pub fn debug(m: &Mgtt, root: NodeId, oracle: &mut dyn Oracle) -> Result<Outcome, ApdError> {
    let frontier = m.ill_typed_frontier(root).ok_or(ApdError::WellTyped)?;
    let mut run = Run {
        m,
        oracle,
        asked: HashMap::new(),
        examined: HashSet::new(),
        transcript: Vec::new(),
    };
    match run.examine(frontier) {
        Ok(verdict) => Ok(Outcome::Done {
            verdict,
            transcript: run.transcript,
        }),
        Err(Stop::Pending(question)) => Ok(Outcome::Pending {
            question,
            transcript: run.transcript,
        }),
        Err(Stop::Error(e)) => Err(e),
    }
}

/// Nodes whose typing needs no confirmation: variables whose type is
/// whatever the context demands of them.
pub fn is_trivially_intended(m: &Mgtt, id: NodeId) -> bool {
    matches!(m.node(id).leaf, Some(Leaf::Demanded(_)))
}

pub fn make_question(m: &Mgtt, id: NodeId, seq: usize) -> Option<Question> {
    let n = m.node(id);
    let typing = n.typing()?.clone();
    let rendered = typing.render(&mut Namer::new());
    Some(Question {
        seq,
        node: id,
        node_ref: n.node_ref.clone(),
        span: n.span,
        typing,
        rendered,
    })
}

enum Stop {
    Pending(Question),
    Error(ApdError),
}

struct Run<'a> {
    m: &'a Mgtt,
    oracle: &'a mut dyn Oracle,
    asked: HashMap<NodeId, Answer>,
    examined: HashSet<NodeId>,
    transcript: Vec<(Question, Answer)>,
}

impl Run<'_> {
    fn ask(&mut self, id: NodeId) -> Result<Answer, Stop> {
        if let Some(a) = self.asked.get(&id) {
            return Ok(a.clone());
        }
        let q = make_question(self.m, id, self.transcript.len())
            .expect("only well-typed nodes are asked about");
        match self.oracle.answer(self.m, &q) {
            None => Err(Stop::Pending(q)),
            Some(a) => {
                if let Answer::UnintendedBinding(x) = &a {
                    if q.typing.lookup_name(x).is_none() {
                        return Err(Stop::Error(ApdError::UnknownBinding(x.clone())));
                    }
                }
                self.asked.insert(id, a.clone());
                self.transcript.push((q, a.clone()));
                Ok(a)
            }
        }
    }

    fn examine(&mut self, id: NodeId) -> Result<Verdict, Stop> {
        self.examined.insert(id);
        let children = self.m.node(id).children.clone();
        for c in children {
            if is_trivially_intended(self.m, c) || self.m.node(c).is_ill_typed() {
                continue;
            }
            match self.ask(c)? {
                Answer::Intended => {}
                Answer::UnintendedType => return self.blame(c),
                Answer::UnintendedBinding(x) => return Ok(self.first_forced(c, &x)),
            }
        }
        Ok(if self.m.node(id).is_ill_typed() {
            Verdict::IllTypedSource(id)
        } else {
            Verdict::WellTypedUnintended(id)
        })
    }

    /// A well-typed node has an unintended type: look inside it, or inside
    /// the definition it refers to.
    fn blame(&mut self, id: NodeId) -> Result<Verdict, Stop> {
        if let Some(origin) = self.m.node(id).origin {
            let def = self.m.definition(origin);
            if !self.examined.contains(&def) && !self.m.node(def).is_ill_typed() {
                return self.examine(def);
            }
        }
        if self.m.node(id).children.is_empty() {
            return Ok(Verdict::WellTypedUnintended(id));
        }
        self.examine(id)
    }

    /// Descend to the leftmost child that already gives `name` a concrete
    /// type, as long as there is one.
    fn first_forced(&self, from: NodeId, name: &str) -> Verdict {
        let forced = |id: NodeId| {
            self.m
                .node(id)
                .typing()
                .and_then(|t| t.lookup_name(name))
                .is_some_and(|d| !d.ty.is_var())
        };
        let mut cur = from;
        while let Some(next) = self
            .m
            .node(cur)
            .children
            .iter()
            .copied()
            .find(|&c| forced(c))
        {
            cur = next;
        }
        Verdict::ForcedBinding {
            node: cur,
            name: name.to_string(),
        }
    }
}

#[cfg(test)]
mod tests;
