//! Hindley–Milner inference (Algorithm W with a threaded substitution),
//! let-polymorphism under the value restriction, and scope checking.

mod builtins;
mod scope;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::lang::{
    Decls, Expr, ExprKind, Ident, Pattern, PatternKind, Span, Subst, Ty, TyScheme, TyVar,
    VarSupply,
};
pub use builtins::{builtin_schemes, is_builtin};
pub use scope::check_scopes;

/// Typing context mapping names to schemes. Scoped extension is done with
/// [`TypeEnv::insert`] followed by [`TypeEnv::restore`].
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    map: HashMap<String, TyScheme>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut env = Self::new();
        for (name, s) in builtin_schemes() {
            env.map.insert(name.to_string(), s);
        }
        env
    }

    pub fn get(&self, name: &str) -> Option<&TyScheme> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, s: TyScheme) -> Option<TyScheme> {
        self.map.insert(name.into(), s)
    }

    pub fn restore(&mut self, name: &str, old: Option<TyScheme>) {
        match old {
            Some(s) => {
                self.map.insert(name.to_string(), s);
            }
            None => {
                self.map.remove(name);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TyScheme)> {
        self.map.iter()
    }

    fn ftv(&self, subst: &Subst) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        for s in self.map.values() {
            if s.body.vars().len() == s.quantified.len() {
                continue;
            }
            let body = subst.apply(&s.body);
            for v in body.ftv() {
                if !s.quantified.contains(&v) {
                    out.insert(v);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeErrorKind {
    Unbound(String),
    UnboundConstructor(String),
    UnboundField(String),
    ConstructorArity {
        name: String,
        expected: usize,
        found: usize,
    },
    /// The expression at `span` has type `found` where `expected` is required.
    Mismatch { expected: Ty, found: Ty },
    /// Unifying `expected` with `found` would build an infinite type, as
    /// in self-application.
    Circular { expected: Ty, found: Ty },
    DuplicateBinding(String),
    MissingField(String),
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::Unbound(x) => write!(f, "Unbound variable {x}"),
            TypeErrorKind::UnboundConstructor(c) => write!(f, "Unbound constructor {c}"),
            TypeErrorKind::UnboundField(l) => write!(f, "Unbound record field {l}"),
            TypeErrorKind::ConstructorArity {
                name,
                expected,
                found,
            } => write!(
                f,
                "The constructor {name} expects {expected} argument(s), but is applied to {found}"
            ),
            TypeErrorKind::Mismatch { expected, found } => {
                let mut n = crate::lang::Namer::new();
                let found = n.render(found);
                let expected = n.render(expected);
                write!(
                    f,
                    "This expression has type {found} but an expression was expected of type {expected}"
                )
            }
            TypeErrorKind::Circular { expected, found } => {
                let mut n = crate::lang::Namer::new();
                let found = n.render(found);
                let expected = n.render(expected);
                write!(
                    f,
                    "This expression has type {found} but an expression was expected of type {expected}\nThe type variable occurs inside the other type"
                )
            }
            TypeErrorKind::DuplicateBinding(x) => {
                write!(f, "Variable {x} is bound several times in this matching")
            }
            TypeErrorKind::MissingField(l) => write!(f, "Some record fields are undefined: {l}"),
        }
    }
}

/// Inference state: the threaded substitution, the shared variable supply,
/// and the program's type declarations.
pub struct Inferencer<'a> {
    pub subst: Subst,
    pub supply: &'a mut VarSupply,
    pub decls: &'a Decls,
}

impl<'a> Inferencer<'a> {
    pub fn new(decls: &'a Decls, supply: &'a mut VarSupply) -> Self {
        Inferencer {
            subst: Subst::new(),
            supply,
            decls,
        }
    }

    pub fn fresh(&mut self) -> Ty {
        self.supply.fresh()
    }

    /// Require the expression at `span`, of type `found`, to have type
    /// `expected`.
    pub fn expect(&mut self, expected: &Ty, found: &Ty, span: Span) -> Result<(), TypeError> {
        self.subst.unify(expected, found).map_err(|err| {
            let (expected, found) = (self.subst.apply(expected), self.subst.apply(found));
            let kind = match err {
                crate::lang::UnifyError::Occurs(..) => TypeErrorKind::Circular { expected, found },
                crate::lang::UnifyError::Mismatch(..) => TypeErrorKind::Mismatch { expected, found },
            };
            TypeError { kind, span }
        })
    }

    pub fn generalize(&self, env: &TypeEnv, t: &Ty) -> TyScheme {
        let t = self.subst.apply(t);
        let env_ftv = env.ftv(&self.subst);
        let quantified = t
            .vars()
            .into_iter()
            .filter(|v| !env_ftv.contains(v))
            .collect();
        TyScheme {
            quantified,
            body: t,
        }
    }

    /// Infer the type of `e`; the result has the current substitution applied.
    pub fn infer(&mut self, env: &mut TypeEnv, e: &Expr) -> Result<Ty, TypeError> {
        let t = self.infer_raw(env, e)?;
        Ok(self.subst.apply(&t))
    }

    fn infer_raw(&mut self, env: &mut TypeEnv, e: &Expr) -> Result<Ty, TypeError> {
        use ExprKind::*;
        match &e.kind {
            Var(x) => match env.get(x) {
                Some(s) => Ok(s.clone().instantiate(self.supply)),
                None => Err(TypeError {
                    kind: TypeErrorKind::Unbound(x.clone()),
                    span: e.span,
                }),
            },
            Int(_) => Ok(Ty::Int),
            Float(_) => Ok(Ty::Float),
            Str(_) => Ok(Ty::Str),
            Char(_) => Ok(Ty::Char),
            Bool(_) => Ok(Ty::Bool),
            Unit => Ok(Ty::Unit),
            ConstrName(c) => Ok(constructor_function(self.decls, c, e.span)?),
            Tuple(es) => {
                let mut ts = Vec::with_capacity(es.len());
                for x in es {
                    ts.push(self.infer_raw(env, x)?);
                }
                Ok(Ty::Tuple(ts))
            }
            List(es) => {
                let elem = self.fresh();
                for x in es {
                    let t = self.infer_raw(env, x)?;
                    self.expect(&elem, &t, x.span)?;
                }
                Ok(Ty::list(elem))
            }
            Cons(h, t) => {
                let th = self.infer_raw(env, h)?;
                let tt = self.infer_raw(env, t)?;
                self.expect(&Ty::list(th), &tt, t.span)?;
                Ok(tt)
            }
            Fun(x, body) => {
                let a = self.fresh();
                let old = env.insert(x.name.clone(), TyScheme::mono(a.clone()));
                let r = self.infer_raw(env, body);
                env.restore(&x.name, old);
                Ok(Ty::arrow(a, r?))
            }
            App { func, args, .. } => {
                let mut tf = self.infer_raw(env, func)?;
                for arg in args {
                    let ta = self.infer_raw(env, arg)?;
                    let tf_now = self.subst.apply(&tf);
                    match tf_now {
                        Ty::Arrow(p, r) => {
                            self.expect(&p, &ta, arg.span)?;
                            tf = *r;
                        }
                        Ty::Var(_) => {
                            let r = self.fresh();
                            self.expect(&tf_now, &Ty::arrow(ta, r.clone()), func.span)?;
                            tf = r;
                        }
                        other => {
                            let r = self.fresh();
                            return Err(TypeError {
                                kind: TypeErrorKind::Mismatch {
                                    expected: Ty::arrow(self.subst.apply(&ta), r),
                                    found: other,
                                },
                                span: func.span.to(&arg.span),
                            });
                        }
                    }
                }
                Ok(tf)
            }
            If {
                cond,
                then_branch,
                else_branch,
            } => {
                let tc = self.infer_raw(env, cond)?;
                self.expect(&Ty::Bool, &tc, cond.span)?;
                let tt = self.infer_raw(env, then_branch)?;
                match else_branch {
                    Some(el) => {
                        let te = self.infer_raw(env, el)?;
                        self.expect(&tt, &te, el.span)?;
                    }
                    None => self.expect(&Ty::Unit, &tt, then_branch.span)?,
                }
                Ok(tt)
            }
            Match { scrutinee, arms } => {
                let ts = self.infer_raw(env, scrutinee)?;
                let result = self.fresh();
                for arm in arms {
                    let (tp, binds) = infer_pattern(self, &arm.pattern)?;
                    self.expect(&ts, &tp, arm.pattern.span)?;
                    let olds: Vec<_> = binds
                        .iter()
                        .map(|(x, t)| (x.name.clone(), env.insert(x.name.clone(), TyScheme::mono(t.clone()))))
                        .collect();
                    let tb = self.infer_raw(env, &arm.body);
                    for (x, old) in olds.into_iter().rev() {
                        env.restore(&x, old);
                    }
                    self.expect(&result, &tb?, arm.body.span)?;
                }
                Ok(result)
            }
            Let { name, bound, body } => {
                let tb = self.infer_raw(env, bound)?;
                let scheme = if bound.is_syntactic_value() {
                    self.generalize(env, &tb)
                } else {
                    TyScheme::mono(self.subst.apply(&tb))
                };
                match body {
                    None => Ok(tb),
                    Some(body) => {
                        let old = env.insert(name.name.clone(), scheme);
                        let r = self.infer_raw(env, body);
                        env.restore(&name.name, old);
                        r
                    }
                }
            }
            LetRec { name, bound, body } => {
                let tf = self.fresh();
                let old = env.insert(name.name.clone(), TyScheme::mono(tf.clone()));
                let tb = self.infer_raw(env, bound);
                env.restore(&name.name, old);
                let tb = tb?;
                self.expect(&tf, &tb, bound.span)?;
                match body {
                    None => Ok(tb),
                    Some(body) => {
                        let scheme = if bound.is_syntactic_value() {
                            self.generalize(env, &tb)
                        } else {
                            TyScheme::mono(self.subst.apply(&tb))
                        };
                        let old = env.insert(name.name.clone(), scheme);
                        let r = self.infer_raw(env, body);
                        env.restore(&name.name, old);
                        r
                    }
                }
            }
            Constructor { head, args } => {
                let ExprKind::ConstrName(c) = &head.kind else {
                    unreachable!("constructor head is always a name")
                };
                let info = lookup_constructor(self.decls, c, head.span)?;
                let decl_args = constructor_parameters(info.args, args.len());
                let result = Ty::Named(info.type_name.to_string());
                if decl_args.len() != args.len() {
                    return Err(TypeError {
                        kind: TypeErrorKind::ConstructorArity {
                            name: c.clone(),
                            expected: decl_args.len(),
                            found: args.len(),
                        },
                        span: e.span,
                    });
                }
                for (want, arg) in decl_args.iter().zip(args) {
                    let ta = self.infer_raw(env, arg)?;
                    self.expect(want, &ta, arg.span)?;
                }
                Ok(result)
            }
            Record(fields) => {
                let (record, decl_fields) = record_for_literal(self.decls, fields, e.span)?;
                for (f, v) in fields {
                    let want = decl_fields
                        .iter()
                        .find(|(n, _)| *n == f.name)
                        .map(|(_, t)| t.clone())
                        .ok_or_else(|| TypeError {
                            kind: TypeErrorKind::UnboundField(f.name.clone()),
                            span: f.span,
                        })?;
                    let tv = self.infer_raw(env, v)?;
                    self.expect(&want, &tv, v.span)?;
                }
                Ok(Ty::Named(record))
            }
            Field(r, f) => {
                let info = self.decls.field(&f.name).ok_or_else(|| TypeError {
                    kind: TypeErrorKind::UnboundField(f.name.clone()),
                    span: f.span,
                })?;
                let (record, ft) = (Ty::Named(info.record.to_string()), info.ty.clone());
                let tr = self.infer_raw(env, r)?;
                self.expect(&record, &tr, r.span)?;
                Ok(ft)
            }
            Annot(inner, t) => {
                let ti = self.infer_raw(env, inner)?;
                self.expect(t, &ti, inner.span)?;
                Ok(ti)
            }
            Seq(a, b) => {
                self.infer_raw(env, a)?;
                self.infer_raw(env, b)
            }
            Assign(r, v) => {
                let tr = self.infer_raw(env, r)?;
                let tv = self.infer_raw(env, v)?;
                self.expect(&Ty::Ref(Box::new(tv)), &tr, r.span)?;
                Ok(Ty::Unit)
            }
            Deref(r) => {
                let tr = self.infer_raw(env, r)?;
                let a = self.fresh();
                self.expect(&Ty::Ref(Box::new(a.clone())), &tr, r.span)?;
                Ok(a)
            }
            While(c, body) => {
                let tc = self.infer_raw(env, c)?;
                self.expect(&Ty::Bool, &tc, c.span)?;
                self.infer_raw(env, body)?;
                Ok(Ty::Unit)
            }
            For {
                var,
                start,
                end,
                body,
                ..
            } => {
                let ts = self.infer_raw(env, start)?;
                self.expect(&Ty::Int, &ts, start.span)?;
                let te = self.infer_raw(env, end)?;
                self.expect(&Ty::Int, &te, end.span)?;
                let old = env.insert(var.name.clone(), TyScheme::mono(Ty::Int));
                let r = self.infer_raw(env, body);
                env.restore(&var.name, old);
                r?;
                Ok(Ty::Unit)
            }
        }
    }
}

pub fn lookup_constructor<'d>(
    decls: &'d Decls,
    name: &str,
    span: Span,
) -> Result<crate::lang::decls::ConstructorInfo<'d>, TypeError> {
    decls.constructor(name).ok_or_else(|| TypeError {
        kind: TypeErrorKind::UnboundConstructor(name.to_string()),
        span,
    })
}

/// Expected types for `given` constructor arguments. A constructor
/// declared with one tuple argument, as in `P of (int * int)`, also
/// accepts the tuple written out as separate arguments, `P (1, 2)`.
pub fn constructor_parameters(declared: &[Ty], given: usize) -> Vec<Ty> {
    match declared {
        [Ty::Tuple(items)] if given > 1 && items.len() == given => items.clone(),
        _ => declared.to_vec(),
    }
}

/// The type of a constructor used as a function.
pub fn constructor_function(decls: &Decls, name: &str, span: Span) -> Result<Ty, TypeError> {
    Ok(lookup_constructor(decls, name, span)?.as_function_type())
}

/// Resolve a record literal to its declared record type and field list.
pub fn record_for_literal(
    decls: &Decls,
    fields: &[(Ident, Expr)],
    span: Span,
) -> Result<(String, Vec<(String, Ty)>), TypeError> {
    let first = fields.first().ok_or(TypeError {
        kind: TypeErrorKind::MissingField(String::new()),
        span,
    })?;
    let info = decls.field(&first.0.name).ok_or_else(|| TypeError {
        kind: TypeErrorKind::UnboundField(first.0.name.clone()),
        span: first.0.span,
    })?;
    let all: Vec<(String, Ty)> = info
        .all
        .iter()
        .map(|(n, t)| (n.to_string(), (*t).clone()))
        .collect();
    for (n, _) in &all {
        if !fields.iter().any(|(f, _)| f.name == *n) {
            return Err(TypeError {
                kind: TypeErrorKind::MissingField(n.clone()),
                span,
            });
        }
    }
    for (i, (f, _)) in fields.iter().enumerate() {
        if fields[..i].iter().any(|(g, _)| g.name == f.name) {
            return Err(TypeError {
                kind: TypeErrorKind::DuplicateBinding(f.name.clone()),
                span: f.span,
            });
        }
    }
    Ok((info.record.to_string(), all))
}

/// Type of a pattern and the (monomorphic) types of the variables it binds.
pub fn infer_pattern(
    inf: &mut Inferencer<'_>,
    p: &Pattern,
) -> Result<(Ty, Vec<(Ident, Ty)>), TypeError> {
    let mut binds = Vec::new();
    let t = pattern_type(inf, p, &mut binds)?;
    for (i, (x, _)) in binds.iter().enumerate() {
        if binds[..i].iter().any(|(y, _)| y.name == x.name) {
            return Err(TypeError {
                kind: TypeErrorKind::DuplicateBinding(x.name.clone()),
                span: x.span,
            });
        }
    }
    Ok((inf.subst.apply(&t), binds))
}

fn pattern_type(
    inf: &mut Inferencer<'_>,
    p: &Pattern,
    binds: &mut Vec<(Ident, Ty)>,
) -> Result<Ty, TypeError> {
    Ok(match &p.kind {
        PatternKind::Wildcard => inf.fresh(),
        PatternKind::Var(x) => {
            let t = inf.fresh();
            binds.push((x.clone(), t.clone()));
            t
        }
        PatternKind::Int(_) => Ty::Int,
        PatternKind::Bool(_) => Ty::Bool,
        PatternKind::Str(_) => Ty::Str,
        PatternKind::Char(_) => Ty::Char,
        PatternKind::Unit => Ty::Unit,
        PatternKind::Nil => Ty::list(inf.fresh()),
        PatternKind::Cons(h, t) => {
            let th = pattern_type(inf, h, binds)?;
            let tt = pattern_type(inf, t, binds)?;
            inf.expect(&Ty::list(th), &tt, t.span)?;
            tt
        }
        PatternKind::Tuple(ps) => {
            let mut ts = Vec::new();
            for q in ps {
                ts.push(pattern_type(inf, q, binds)?);
            }
            Ty::Tuple(ts)
        }
        PatternKind::Constructor(c, ps) => {
            let info = lookup_constructor(inf.decls, &c.name, c.span)?;
            let want = constructor_parameters(info.args, ps.len());
            let result = Ty::Named(info.type_name.to_string());
            if want.len() != ps.len() {
                return Err(TypeError {
                    kind: TypeErrorKind::ConstructorArity {
                        name: c.name.clone(),
                        expected: want.len(),
                        found: ps.len(),
                    },
                    span: p.span,
                });
            }
            for (w, q) in want.iter().zip(ps) {
                let tq = pattern_type(inf, q, binds)?;
                inf.expect(w, &tq, q.span)?;
            }
            result
        }
        PatternKind::Record(fields) => {
            let mut record: Option<String> = None;
            for (f, q) in fields {
                let info = inf.decls.field(&f.name).ok_or_else(|| TypeError {
                    kind: TypeErrorKind::UnboundField(f.name.clone()),
                    span: f.span,
                })?;
                let (rname, ft) = (info.record.to_string(), info.ty.clone());
                if let Some(r) = &record {
                    if *r != rname {
                        return Err(TypeError {
                            kind: TypeErrorKind::Mismatch {
                                expected: Ty::Named(r.clone()),
                                found: Ty::Named(rname),
                            },
                            span: f.span,
                        });
                    }
                }
                record = Some(rname);
                let tq = pattern_type(inf, q, binds)?;
                inf.expect(&ft, &tq, q.span)?;
            }
            Ty::Named(record.unwrap_or_default())
        }
    })
}

/// Outcome of checking one top-level item.
#[derive(Debug, Clone)]
pub struct ItemType {
    /// The defined name for `let` items without `in`.
    pub name: Option<String>,
    pub scheme: TyScheme,
}

/// Infer `e` in `env`, W-style: the substitution and the type.
pub fn infer(
    env: &TypeEnv,
    e: &Expr,
    decls: &Decls,
    supply: &mut VarSupply,
) -> Result<(Subst, Ty), TypeError> {
    let mut env = env.clone();
    let mut inf = Inferencer::new(decls, supply);
    let t = inf.infer(&mut env, e)?;
    Ok((inf.subst, t))
}

/// Check a top-level item and return its generalized type.
pub fn infer_item(
    env: &TypeEnv,
    item: &Expr,
    decls: &Decls,
    supply: &mut VarSupply,
) -> Result<ItemType, TypeError> {
    let mut env = env.clone();
    let mut inf = Inferencer::new(decls, supply);
    let t = inf.infer(&mut env, item)?;
    let (name, generalizable) = match &item.kind {
        ExprKind::Let {
            name,
            bound,
            body: None,
        }
        | ExprKind::LetRec {
            name,
            bound,
            body: None,
        } => (Some(name.name.clone()), bound.is_syntactic_value()),
        _ => (None, item.is_syntactic_value()),
    };
    let scheme = if generalizable {
        inf.generalize(&env, &t)
    } else {
        TyScheme::mono(t)
    };
    Ok(ItemType { name, scheme })
}

/// `true` when `specific` is an instance of the scheme `general`.
pub fn is_instance(general: &Ty, specific: &Ty) -> bool {
    crate::lang::unify::match_instance(
        std::slice::from_ref(general),
        std::slice::from_ref(specific),
    )
    .is_some()
}
