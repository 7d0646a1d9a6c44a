use std::collections::HashSet;

use super::{TypeError, TypeErrorKind};
use crate::lang::{Decls, Expr, ExprKind, Pattern, PatternKind, Program};

/// Report the first unbound variable, constructor, or record field in
/// program order. `predefined` names (builtins) are in scope everywhere;
/// each top-level definition is in scope for the items after it.
pub fn check_scopes<'a>(
    program: &Program,
    decls: &Decls,
    predefined: impl IntoIterator<Item = &'a str>,
) -> Result<(), TypeError> {
    let mut top: HashSet<String> = predefined.into_iter().map(str::to_string).collect();
    for item in &program.items {
        let mut bound = Vec::new();
        let c = Checker { decls, top: &top };
        c.expr(item, &mut bound)?;
        if let ExprKind::Let {
            name, body: None, ..
        }
        | ExprKind::LetRec {
            name, body: None, ..
        } = &item.kind
        {
            top.insert(name.name.clone());
        }
    }
    Ok(())
}

struct Checker<'a> {
    decls: &'a Decls,
    top: &'a HashSet<String>,
}

impl Checker<'_> {
    fn expr(&self, e: &Expr, bound: &mut Vec<String>) -> Result<(), TypeError> {
        use ExprKind::*;
        let err = |kind| Err(TypeError { kind, span: e.span });
        match &e.kind {
            Var(x) => {
                if !bound.contains(x) && !self.top.contains(x) {
                    return err(TypeErrorKind::Unbound(x.clone()));
                }
            }
            ConstrName(c) => {
                if self.decls.constructor(c).is_none() {
                    return err(TypeErrorKind::UnboundConstructor(c.clone()));
                }
            }
            Constructor { head, args } => {
                self.expr(head, bound)?;
                for a in args {
                    self.expr(a, bound)?;
                }
            }
            Fun(x, body) => {
                bound.push(x.name.clone());
                let r = self.expr(body, bound);
                bound.pop();
                r?;
            }
            Let {
                name,
                bound: b,
                body,
            } => {
                self.expr(b, bound)?;
                if let Some(body) = body {
                    bound.push(name.name.clone());
                    let r = self.expr(body, bound);
                    bound.pop();
                    r?;
                }
            }
            LetRec {
                name,
                bound: b,
                body,
            } => {
                bound.push(name.name.clone());
                let r = self
                    .expr(b, bound)
                    .and_then(|_| body.as_ref().map_or(Ok(()), |x| self.expr(x, bound)));
                bound.pop();
                r?;
            }
            Match { scrutinee, arms } => {
                self.expr(scrutinee, bound)?;
                for arm in arms {
                    self.pattern(&arm.pattern)?;
                    let vars: Vec<String> = arm
                        .pattern
                        .bound_vars()
                        .into_iter()
                        .map(|x| x.name.clone())
                        .collect();
                    let n = vars.len();
                    bound.extend(vars);
                    let r = self.expr(&arm.body, bound);
                    bound.truncate(bound.len() - n);
                    r?;
                }
            }
            For {
                var,
                start,
                end,
                body,
                ..
            } => {
                self.expr(start, bound)?;
                self.expr(end, bound)?;
                bound.push(var.name.clone());
                let r = self.expr(body, bound);
                bound.pop();
                r?;
            }
            Record(fields) => {
                for (f, v) in fields {
                    if self.decls.field(&f.name).is_none() {
                        return Err(TypeError {
                            kind: TypeErrorKind::UnboundField(f.name.clone()),
                            span: f.span,
                        });
                    }
                    self.expr(v, bound)?;
                }
            }
            Field(r, f) => {
                self.expr(r, bound)?;
                if self.decls.field(&f.name).is_none() {
                    return Err(TypeError {
                        kind: TypeErrorKind::UnboundField(f.name.clone()),
                        span: f.span,
                    });
                }
            }
            _ => {
                for c in e.children() {
                    self.expr(c, bound)?;
                }
            }
        }
        Ok(())
    }

    fn pattern(&self, p: &Pattern) -> Result<(), TypeError> {
        match &p.kind {
            PatternKind::Constructor(c, ps) => {
                if self.decls.constructor(&c.name).is_none() {
                    return Err(TypeError {
                        kind: TypeErrorKind::UnboundConstructor(c.name.clone()),
                        span: c.span,
                    });
                }
                ps.iter().try_for_each(|q| self.pattern(q))
            }
            PatternKind::Record(fields) => {
                for (f, q) in fields {
                    if self.decls.field(&f.name).is_none() {
                        return Err(TypeError {
                            kind: TypeErrorKind::UnboundField(f.name.clone()),
                            span: f.span,
                        });
                    }
                    self.pattern(q)?;
                }
                Ok(())
            }
            PatternKind::Cons(h, t) => {
                self.pattern(h)?;
                self.pattern(t)
            }
            PatternKind::Tuple(ps) => ps.iter().try_for_each(|q| self.pattern(q)),
            _ => Ok(()),
        }
    }
}
