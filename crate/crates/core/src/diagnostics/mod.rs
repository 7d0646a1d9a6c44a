//! Expression-specific error messages for a blamed node.
//!
//! Each rule re-checks parts of the blamed expression with the ordinary
//! type inferencer (annotate-and-recheck probes) to find which constraint
//! of the expression is violated, then reports the types involved. When no
//! single constraint fails on its own, the blame is explained by a variable
//! used at two incompatible types.

mod catalog;
mod conflict;

use serde::{Deserialize, Serialize};

use crate::apd::Verdict;
use crate::lang::{Decls, Expr, ExprKind, Namer, Span, Ty, VarSupply};
use crate::mgtt::{ComposeError, IllTyped, Mgtt, NodeId, Status};
use crate::parser::LanguageLevel;
use crate::typeinf::{self, Inferencer, TypeEnv};
pub use catalog::{ordinal, AppTypes, DiagnosisKind, NumberedType, Payload};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub code: u8,
    #[serde(flatten)]
    pub payload: Payload,
    /// Source regions to highlight, most important first.
    pub highlights: Vec<Span>,
    pub message: String,
}

impl Diagnosis {
    pub fn new(payload: Payload, highlights: Vec<Span>) -> Self {
        Diagnosis {
            code: payload.kind().code(),
            message: payload.message(),
            payload,
            highlights,
        }
    }

    pub fn kind(&self) -> DiagnosisKind {
        self.payload.kind()
    }

    /// The parser found an `if` without `else` where `unit` is unavailable.
    pub fn missing_else(span: Span) -> Self {
        Diagnosis::new(Payload::MissingElse {}, vec![span])
    }
}

/// A type-checking problem whose failure justifies a diagnosis.
#[derive(Debug, Clone)]
pub struct Probe {
    pub env: TypeEnv,
    pub expr: Expr,
}

impl Probe {
    pub fn fails(&self, decls: &Decls, supply: &mut VarSupply) -> bool {
        typeinf::infer(&self.env, &self.expr, decls, supply).is_err()
    }
}

/// Explain a debugging verdict.
pub fn diagnose(
    m: &Mgtt,
    verdict: &Verdict,
    decls: &Decls,
    level: LanguageLevel,
    supply: &mut VarSupply,
) -> Diagnosis {
    diagnose_with_probe(m, verdict, decls, level, supply).0
}

/// Like [`diagnose`], also returning the failing probe behind the message.
pub fn diagnose_with_probe(
    m: &Mgtt,
    verdict: &Verdict,
    decls: &Decls,
    level: LanguageLevel,
    supply: &mut VarSupply,
) -> (Diagnosis, Option<Probe>) {
    let mut d = Diagnoser {
        m,
        decls,
        level,
        supply,
        namer: Namer::new(),
    };
    match verdict {
        Verdict::IllTypedSource(id) => d.ill_typed(*id),
        other => (d.unintended(other), None),
    }
}

type Outcome = (Diagnosis, Option<Probe>);

struct Diagnoser<'a> {
    m: &'a Mgtt,
    decls: &'a Decls,
    level: LanguageLevel,
    supply: &'a mut VarSupply,
    namer: Namer,
}

impl Diagnoser<'_> {
    fn ill_typed(&mut self, id: NodeId) -> Outcome {
        match &self.m.node(id).status {
            Status::IllTyped(IllTyped::RecursiveUse { def_ty, use_ty }) => {
                self.letrec(id, def_ty.clone(), use_ty.clone())
            }
            Status::IllTyped(IllTyped::ConstructorArity { .. }) => self.constructor(id),
            _ => match &self.m.expr(id).kind {
                ExprKind::If { .. } => self.conditional(id),
                ExprKind::Match { .. } => self.match_expr(id),
                ExprKind::App { .. } => self.application(id),
                ExprKind::Constructor { .. } => self.constructor(id),
                _ => self.conflicting_variable(id),
            },
        }
    }

    fn render(&mut self, t: &Ty) -> String {
        self.namer.render(t)
    }

    fn ty(&self, id: NodeId) -> Ty {
        self.m
            .node(id)
            .typing()
            .expect("children of a blamed node are well-typed")
            .ty
            .clone()
    }

    /// The child node standing for subexpression `e` of node `id`.
    fn child_for(&self, id: NodeId, e: &Expr) -> NodeId {
        *self
            .m
            .node(id)
            .children
            .iter()
            .find(|&&c| std::ptr::eq(self.m.expr(c), e))
            .expect("subexpression has a node")
    }

    /// The environment the node's expression is checked in: top-level
    /// definitions plus its local bindings, outermost first.
    fn probe_env(&mut self, id: NodeId) -> TypeEnv {
        let n = self.m.node(id);
        let mut env = self.m.tops[n.node_ref.item].env.clone();
        for (name, b) in n.scope.bindings().into_iter().rev() {
            env.insert(name, b.probe_scheme(self.supply));
        }
        env
    }

    fn probe(&mut self, env: &TypeEnv, expr: Expr) -> Result<Ty, Probe> {
        typeinf::infer(env, &expr, self.decls, self.supply)
            .map(|(_, t)| t)
            .map_err(|_| Probe {
                env: env.clone(),
                expr,
            })
    }

    fn whole_probe(&mut self, id: NodeId) -> Probe {
        Probe {
            env: self.probe_env(id),
            expr: self.m.expr(id).clone(),
        }
    }

    fn conditional(&mut self, id: NodeId) -> Outcome {
        let e = self.m.expr(id);
        let ExprKind::If {
            cond,
            then_branch,
            else_branch,
        } = &e.kind
        else {
            unreachable!("conditional node")
        };
        let env = self.probe_env(id);
        if let Err(p) = self.probe(&env, annot(cond, Ty::Bool)) {
            let t = self.ty(self.child_for(id, cond));
            let payload = Payload::PredicateNotBool {
                predicate_type: self.render(&t),
            };
            return (Diagnosis::new(payload, vec![cond.span]), Some(p));
        }
        match else_branch {
            None => {
                if let Err(p) = self.probe(&env, annot(then_branch, Ty::Unit)) {
                    let t = self.ty(self.child_for(id, then_branch));
                    let payload = Payload::ThenNotUnit {
                        then_type: self.render(&t),
                    };
                    return (Diagnosis::new(payload, vec![then_branch.span]), Some(p));
                }
            }
            Some(el) => {
                let branches = Expr::new(
                    ExprKind::List(vec![(**then_branch).clone(), (**el).clone()]),
                    e.span,
                );
                if let Err(p) = self.probe(&env, branches) {
                    let tt = self.ty(self.child_for(id, then_branch));
                    let te = self.ty(self.child_for(id, el));
                    let payload = Payload::ThenElseMismatch {
                        then_type: self.render(&tt),
                        else_type: self.render(&te),
                    };
                    return (Diagnosis::new(payload, vec![e.span]), Some(p));
                }
            }
        }
        self.conflicting_variable(id)
    }

    fn match_expr(&mut self, id: NodeId) -> Outcome {
        let e = self.m.expr(id);
        let ExprKind::Match { scrutinee, arms } = &e.kind else {
            unreachable!("match node")
        };
        let env = self.probe_env(id);
        let with_arms = |arms: Vec<crate::lang::Arm>| {
            Expr::new(
                ExprKind::Match {
                    scrutinee: scrutinee.clone(),
                    arms,
                },
                e.span,
            )
        };
        let dummy = |k: usize| -> Vec<crate::lang::Arm> {
            arms[..k]
                .iter()
                .map(|a| crate::lang::Arm {
                    pattern: a.pattern.clone(),
                    body: Expr::new(ExprKind::Unit, a.body.span),
                })
                .collect()
        };

        // Patterns against the scrutinee and each other, bodies ignored.
        for k in 1..=arms.len() {
            let Err(p) = self.probe(&env, with_arms(dummy(k))) else {
                continue;
            };
            let pattern = &arms[k - 1].pattern;
            let mut inf = Inferencer::new(self.decls, self.supply);
            let Ok((pt, _)) = typeinf::infer_pattern(&mut inf, pattern) else {
                break;
            };
            let scrutinee_ty = self.ty(self.child_for(id, scrutinee));
            let payload = if k == 1 {
                Payload::MatchPatternVsScrutinee {
                    arm: k,
                    pattern_type: self.render(&pt),
                    scrutinee_type: self.render(&scrutinee_ty),
                }
            } else {
                let mut inf = Inferencer::new(self.decls, self.supply);
                let mut common = scrutinee_ty;
                for a in &arms[..k - 1] {
                    if let Ok((t, _)) = typeinf::infer_pattern(&mut inf, &a.pattern) {
                        let _ = inf.subst.unify(&common, &t);
                        common = inf.subst.apply(&common);
                    }
                }
                Payload::MatchPatternVsPattern {
                    arm: k,
                    pattern_type: self.render(&pt),
                    previous_type: self.render(&common),
                }
            };
            return (Diagnosis::new(payload, vec![pattern.span]), Some(p));
        }

        // Bodies against each other.
        for k in 2..=arms.len() {
            let Err(p) = self.probe(&env, with_arms(arms[..k].to_vec())) else {
                continue;
            };
            if self.probe(&env, with_arms(vec![arms[k - 1].clone()])).is_err() {
                break;
            }
            let Ok(previous) = self.probe(&env, with_arms(arms[..k - 1].to_vec())) else {
                break;
            };
            let body = &arms[k - 1].body;
            let bt = self.ty(self.child_for(id, body));
            let payload = Payload::MatchBranchMismatch {
                arm: k,
                branch_type: self.render(&bt),
                previous_type: self.render(&previous),
            };
            return (Diagnosis::new(payload, vec![body.span]), Some(p));
        }
        self.conflicting_variable(id)
    }

    fn application(&mut self, id: NodeId) -> Outcome {
        let e = self.m.expr(id);
        let ExprKind::App { func, args, fixity } = &e.kind else {
            unreachable!("application node")
        };
        let env = self.probe_env(id);
        let app_of = |k: usize| {
            Expr::new(
                ExprKind::App {
                    func: func.clone(),
                    args: args[..k].to_vec(),
                    fixity: *fixity,
                },
                e.span,
            )
        };
        let fty = self.ty(self.child_for(id, func));
        if !fty.is_arrow() && !fty.is_var() {
            let probe = self.probe(&env, app_of(1)).err();
            let payload = Payload::AppNonFunction {
                function_type: self.render(&fty),
                arguments: args.len(),
            };
            return (Diagnosis::new(payload, vec![e.span]), probe);
        }
        let mut failing = None;
        for k in 1..=args.len() {
            if let Err(p) = self.probe(&env, app_of(k)) {
                failing = Some((k, p));
                break;
            }
        }
        let Some((k, probe)) = failing else {
            return self.conflicting_variable(id);
        };
        let arg_tys: Vec<Ty> = args
            .iter()
            .map(|a| self.ty(self.child_for(id, a)))
            .collect();
        let required = if fty.is_var() {
            Some(self.supply.fresh())
        } else {
            fty.uncurry().0.get(k - 1).map(|t| (*t).clone())
        };
        let function_type = self.render(&fty);
        let argument_types: Vec<String> = arg_tys.iter().map(|t| self.render(t)).collect();
        let app = AppTypes {
            operator: e.infix_operator().map(str::to_string),
            function_type,
            argument_types: argument_types.clone(),
            argument: k,
            required_type: required.map(|t| self.render(&t)),
        };
        let payload = if fty.is_var() && arg_tys.iter().all(Ty::is_var) {
            Payload::AllTypeVariables(app)
        } else if self.level.get() == 1 && arg_tys.iter().any(Ty::is_arrow) {
            let function_arguments = arg_tys
                .iter()
                .zip(argument_types)
                .enumerate()
                .filter(|(_, (t, _))| t.is_arrow())
                .map(|(i, (_, ty))| NumberedType { index: i + 1, ty })
                .collect();
            Payload::AppPartialLevel1 {
                app,
                function_arguments,
            }
        } else {
            Payload::AppArgConflict(app)
        };
        (Diagnosis::new(payload, vec![e.span]), Some(probe))
    }

    fn letrec(&mut self, id: NodeId, def_ty: Ty, use_ty: Ty) -> Outcome {
        let e = self.m.expr(id);
        let ExprKind::LetRec { name, bound, .. } = &e.kind else {
            unreachable!("recursive definition node")
        };
        let payload = Payload::RecursiveUseMismatch {
            name: name.name.clone(),
            definition_type: self.render(&def_ty),
            use_type: self.render(&use_ty),
        };
        let probe = self.whole_probe(id);
        (Diagnosis::new(payload, vec![bound.span]), Some(probe))
    }

    fn constructor(&mut self, id: NodeId) -> Outcome {
        let e = self.m.expr(id);
        let ExprKind::Constructor { head, args } = &e.kind else {
            unreachable!("constructor node")
        };
        let ExprKind::ConstrName(cname) = &head.kind else {
            unreachable!("constructor head is a name")
        };
        let Some(info) = self.decls.constructor(cname) else {
            return self.generic(id);
        };
        let decl_span = info.decl_span;
        let want: Vec<Ty> = crate::typeinf::constructor_parameters(info.args, args.len());
        let found: Vec<Ty> = args
            .iter()
            .map(|a| self.ty(self.child_for(id, a)))
            .collect();
        let argument = if want.len() == found.len() {
            let env = self.probe_env(id);
            let mut bad = None;
            for (k, (a, w)) in args.iter().zip(&want).enumerate() {
                if let Err(p) = self.probe(&env, annot(a, w.clone())) {
                    bad = Some((k + 1, p));
                    break;
                }
            }
            match bad {
                Some(b) => Some(b),
                None => return self.conflicting_variable(id),
            }
        } else {
            None
        };
        let expected = want.iter().map(|t| self.render(t)).collect();
        let found = found.iter().map(|t| self.render(t)).collect();
        let (argument, probe) = match argument {
            Some((k, p)) => (Some(k), p),
            None => (None, self.whole_probe(id)),
        };
        let payload = Payload::ConstructorMismatch {
            constructor: cname.clone(),
            expected,
            found,
            argument,
        };
        (Diagnosis::new(payload, vec![e.span, decl_span]), Some(probe))
    }

    fn unintended(&mut self, verdict: &Verdict) -> Diagnosis {
        let id = verdict.node();
        let n = self.m.node(id);
        let typing = n.typing().expect("unintended nodes are well-typed");
        match verdict {
            Verdict::ForcedBinding { name, .. } => {
                let t = typing
                    .lookup_name(name)
                    .map(|d| d.ty.clone())
                    .unwrap_or_else(|| typing.ty.clone());
                let payload = Payload::WellTypedUnintendedInfo {
                    ty: self.render(&t),
                    binding: Some(name.clone()),
                    constructor: None,
                };
                Diagnosis::new(payload, vec![n.span])
            }
            _ => {
                let ty = self.render(&typing.ty);
                let (constructor, highlights) = match &self.m.expr(id).kind {
                    ExprKind::ConstrName(c) => {
                        let mut hs = vec![n.span];
                        hs.extend(self.decls.constructor(c).map(|i| i.decl_span));
                        (Some(c.clone()), hs)
                    }
                    _ => (None, vec![n.span]),
                };
                let payload = Payload::WellTypedUnintendedInfo {
                    ty,
                    binding: None,
                    constructor,
                };
                Diagnosis::new(payload, highlights)
            }
        }
    }

    fn generic(&mut self, id: NodeId) -> Outcome {
        let detail = match &self.m.node(id).status {
            Status::IllTyped(IllTyped::Compose(ComposeError::Rule(err)))
            | Status::IllTyped(IllTyped::Compose(ComposeError::SharedVariable {
                error: err, ..
            })) => match err {
                crate::lang::UnifyError::Mismatch(a, b) => {
                    let (a, b) = (self.render(a), self.render(b));
                    format!("The types {a} and {b} are incompatible.")
                }
                crate::lang::UnifyError::Occurs(v, t) => {
                    let (v, t) = (self.render(&Ty::Var(*v)), self.render(t));
                    format!("The type {v} would have to contain itself in {t}.")
                }
            },
            Status::IllTyped(IllTyped::ConstructorArity { expected, found }) => format!(
                "The constructor expects {expected} argument(s) but is given {found}."
            ),
            Status::IllTyped(IllTyped::RecursiveUse { .. }) => {
                "A recursive call does not match the definition.".to_string()
            }
            _ => "Its parts cannot be typed together.".to_string(),
        };
        let span = self.m.node(id).span;
        let probe = self.whole_probe(id);
        (
            Diagnosis::new(Payload::GenericExpressionError { detail }, vec![span]),
            Some(probe),
        )
    }
}

fn annot(e: &Expr, t: Ty) -> Expr {
    Expr::new(ExprKind::Annot(Box::new(e.clone()), t), e.span)
}

#[cfg(test)]
mod tests;
