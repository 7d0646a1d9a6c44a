use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::span::Span;
use super::ty::Ty;

/// A name together with the span of its occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// How an application was written in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixity {
    /// `f a b`
    Prefix,
    /// `a + b`
    Infix,
    /// `- a`
    Unary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Var(String),
    Int(i64),
    Float(f64),
    Str(String),
    Char(char),
    Bool(bool),
    Unit,
    Tuple(Vec<Expr>),
    List(Vec<Expr>),
    Cons(Box<Expr>, Box<Expr>),
    Fun(Ident, Box<Expr>),
    /// Curried application flattened along its spine. Binary operators are
    /// applications of the operator variable with `Fixity::Infix`.
    App {
        func: Box<Expr>,
        args: Vec<Expr>,
        fixity: Fixity,
    },
    If {
        cond: Box<Expr>,
        then_branch: Box<Expr>,
        else_branch: Option<Box<Expr>>,
    },
    Match {
        scrutinee: Box<Expr>,
        arms: Vec<Arm>,
    },
    /// `body` is `None` for a top-level definition.
    Let {
        name: Ident,
        bound: Box<Expr>,
        body: Option<Box<Expr>>,
    },
    LetRec {
        name: Ident,
        bound: Box<Expr>,
        body: Option<Box<Expr>>,
    },
    /// `head` is always a `ConstrName` expression carrying the constructor's
    /// own span.
    Constructor {
        head: Box<Expr>,
        args: Vec<Expr>,
    },
    ConstrName(String),
    Record(Vec<(Ident, Expr)>),
    Field(Box<Expr>, Ident),
    /// Type ascription. Only built internally by annotate-and-recheck probes.
    Annot(Box<Expr>, Ty),
    Seq(Box<Expr>, Box<Expr>),
    Assign(Box<Expr>, Box<Expr>),
    Deref(Box<Expr>),
    While(Box<Expr>, Box<Expr>),
    For {
        var: Ident,
        start: Box<Expr>,
        end: Box<Expr>,
        downward: bool,
        body: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub pattern: Pattern,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternKind {
    Wildcard,
    Var(Ident),
    Int(i64),
    Bool(bool),
    Str(String),
    Char(char),
    Unit,
    Nil,
    Cons(Box<Pattern>, Box<Pattern>),
    Tuple(Vec<Pattern>),
    Constructor(Ident, Vec<Pattern>),
    Record(Vec<(Ident, Pattern)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeDeclKind,
    pub decl_span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDeclKind {
    Variant(Vec<ConstructorDecl>),
    Record(Vec<FieldDecl>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructorDecl {
    pub name: String,
    pub args: Vec<Ty>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: Ty,
    pub span: Span,
}

/// A parsed source file: type declarations and top-level items in order.
/// Items are `Let`/`LetRec` nodes without a body, or bare expressions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub decls: Vec<TypeDecl>,
    pub items: Vec<Expr>,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Direct subexpressions in source order.
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        let mut out: Vec<&Expr> = match &self.kind {
            Var(_) | Int(_) | Float(_) | Str(_) | Char(_) | Bool(_) | Unit | ConstrName(_) => {
                vec![]
            }
            Tuple(es) | List(es) => es.iter().collect(),
            Cons(h, t) => vec![h, t],
            Fun(_, body) => vec![body],
            App { func, args, .. } => std::iter::once(&**func).chain(args.iter()).collect(),
            If {
                cond,
                then_branch,
                else_branch,
            } => {
                let mut v = vec![&**cond, &**then_branch];
                v.extend(else_branch.as_deref());
                v
            }
            Match { scrutinee, arms } => std::iter::once(&**scrutinee)
                .chain(arms.iter().map(|a| &a.body))
                .collect(),
            Let { bound, body, .. } | LetRec { bound, body, .. } => {
                let mut v = vec![&**bound];
                v.extend(body.as_deref());
                v
            }
            Constructor { head, args } => {
                if args.is_empty() {
                    vec![]
                } else {
                    std::iter::once(&**head).chain(args.iter()).collect()
                }
            }
            Record(fields) => fields.iter().map(|(_, e)| e).collect(),
            Field(e, _) | Annot(e, _) | Deref(e) => vec![e],
            Seq(a, b) | Assign(a, b) | While(a, b) => vec![a, b],
            For {
                start, end, body, ..
            } => vec![start, end, body],
        };
        out.sort_by_key(|e| e.span.start_byte);
        out
    }

    /// Syntactic values generalize at `let`; everything else stays monomorphic.
    pub fn is_syntactic_value(&self) -> bool {
        use ExprKind::*;
        match &self.kind {
            Var(_) | Int(_) | Float(_) | Str(_) | Char(_) | Bool(_) | Unit | Fun(..)
            | ConstrName(_) => true,
            Tuple(es) | List(es) => es.iter().all(Expr::is_syntactic_value),
            Cons(h, t) => h.is_syntactic_value() && t.is_syntactic_value(),
            Constructor { args, .. } => args.iter().all(Expr::is_syntactic_value),
            Record(fields) => fields.iter().all(|(_, e)| e.is_syntactic_value()),
            Annot(e, _) => e.is_syntactic_value(),
            _ => false,
        }
    }

    /// Free term variables, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out, &mut seen);
        out
    }

    /// Span-free rendering of the tree, used to compare ASTs modulo spans.
    pub fn sexp(&self) -> String {
        let mut s = String::new();
        write_sexp(self, &mut s);
        s
    }

    /// Binder name introduced by this node for its body, if any.
    pub fn binder(&self) -> Option<&Ident> {
        match &self.kind {
            ExprKind::Fun(x, _) => Some(x),
            ExprKind::Let { name, .. } | ExprKind::LetRec { name, .. } => Some(name),
            ExprKind::For { var, .. } => Some(var),
            _ => None,
        }
    }

    /// Infix operator name when this node is a binary operator application.
    pub fn infix_operator(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::App {
                func,
                fixity: Fixity::Infix,
                ..
            } => match &func.kind {
                ExprKind::Var(op) => Some(op),
                _ => None,
            },
            _ => None,
        }
    }
}

impl Pattern {
    /// Variables bound by the pattern, in source order.
    pub fn bound_vars(&self) -> Vec<&Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Ident>) {
        match &self.kind {
            PatternKind::Var(x) => out.push(x),
            PatternKind::Cons(h, t) => {
                h.collect_vars(out);
                t.collect_vars(out);
            }
            PatternKind::Tuple(ps) | PatternKind::Constructor(_, ps) => {
                ps.iter().for_each(|p| p.collect_vars(out))
            }
            PatternKind::Record(fields) => fields.iter().for_each(|(_, p)| p.collect_vars(out)),
            _ => {}
        }
    }

    pub fn sexp(&self) -> String {
        let mut s = String::new();
        write_pat_sexp(self, &mut s);
        s
    }
}

fn collect_free(
    e: &Expr,
    bound: &mut Vec<String>,
    out: &mut Vec<String>,
    seen: &mut BTreeSet<String>,
) {
    use ExprKind::*;
    match &e.kind {
        Var(x) => {
            if !bound.contains(x) && seen.insert(x.clone()) {
                out.push(x.clone());
            }
        }
        Fun(x, body) => {
            bound.push(x.name.clone());
            collect_free(body, bound, out, seen);
            bound.pop();
        }
        Let {
            name, bound: b, body, ..
        } => {
            collect_free(b, bound, out, seen);
            if let Some(body) = body {
                bound.push(name.name.clone());
                collect_free(body, bound, out, seen);
                bound.pop();
            }
        }
        LetRec {
            name, bound: b, body, ..
        } => {
            bound.push(name.name.clone());
            collect_free(b, bound, out, seen);
            if let Some(body) = body {
                collect_free(body, bound, out, seen);
            }
            bound.pop();
        }
        Match { scrutinee, arms } => {
            collect_free(scrutinee, bound, out, seen);
            for arm in arms {
                let vars: Vec<String> = arm
                    .pattern
                    .bound_vars()
                    .into_iter()
                    .map(|i| i.name.clone())
                    .collect();
                let n = vars.len();
                bound.extend(vars);
                collect_free(&arm.body, bound, out, seen);
                bound.truncate(bound.len() - n);
            }
        }
        For {
            var,
            start,
            end,
            body,
            ..
        } => {
            collect_free(start, bound, out, seen);
            collect_free(end, bound, out, seen);
            bound.push(var.name.clone());
            collect_free(body, bound, out, seen);
            bound.pop();
        }
        _ => {
            for c in e.children() {
                collect_free(c, bound, out, seen);
            }
        }
    }
}

fn write_sexp(e: &Expr, s: &mut String) {
    use ExprKind::*;
    let list = |s: &mut String, tag: &str, es: &[&Expr]| {
        s.push('(');
        s.push_str(tag);
        for c in es {
            s.push(' ');
            write_sexp(c, s);
        }
        s.push(')');
    };
    match &e.kind {
        Var(x) => s.push_str(x),
        Int(n) => write!(s, "{n}").unwrap(),
        Float(f) => write!(s, "{f:?}").unwrap(),
        Str(t) => write!(s, "{t:?}").unwrap(),
        Char(c) => write!(s, "{c:?}").unwrap(),
        Bool(b) => write!(s, "{b}").unwrap(),
        Unit => s.push_str("()"),
        ConstrName(c) => s.push_str(c),
        Tuple(es) => list(s, "tuple", &es.iter().collect::<Vec<_>>()),
        List(es) => list(s, "list", &es.iter().collect::<Vec<_>>()),
        Cons(h, t) => list(s, "cons", &[h, t]),
        Fun(x, b) => list(s, &format!("fun {}", x.name), &[b]),
        App { func, args, fixity } => {
            let tag = match fixity {
                Fixity::Prefix => "app",
                Fixity::Infix => "infix",
                Fixity::Unary => "unary",
            };
            let mut v = vec![&**func];
            v.extend(args.iter());
            list(s, tag, &v)
        }
        If {
            cond,
            then_branch,
            else_branch,
        } => {
            let mut v = vec![&**cond, &**then_branch];
            v.extend(else_branch.as_deref());
            list(s, "if", &v)
        }
        Match { scrutinee, arms } => {
            s.push_str("(match ");
            write_sexp(scrutinee, s);
            for arm in arms {
                s.push_str(" (");
                write_pat_sexp(&arm.pattern, s);
                s.push(' ');
                write_sexp(&arm.body, s);
                s.push(')');
            }
            s.push(')');
        }
        Let { name, bound, body } => {
            let mut v = vec![&**bound];
            v.extend(body.as_deref());
            list(s, &format!("let {}", name.name), &v)
        }
        LetRec { name, bound, body } => {
            let mut v = vec![&**bound];
            v.extend(body.as_deref());
            list(s, &format!("letrec {}", name.name), &v)
        }
        Constructor { head, args } => {
            let mut v = vec![&**head];
            v.extend(args.iter());
            list(s, "con", &v)
        }
        Record(fields) => {
            s.push_str("(record");
            for (f, e) in fields {
                write!(s, " ({} ", f.name).unwrap();
                write_sexp(e, s);
                s.push(')');
            }
            s.push(')');
        }
        Field(e, f) => list(s, &format!("field {}", f.name), &[e]),
        Annot(e, t) => list(s, &format!("annot {t:?}"), &[e]),
        Seq(a, b) => list(s, "seq", &[a, b]),
        Assign(a, b) => list(s, "assign", &[a, b]),
        Deref(a) => list(s, "deref", &[a]),
        While(a, b) => list(s, "while", &[a, b]),
        For {
            var,
            start,
            end,
            downward,
            body,
        } => list(
            s,
            &format!("for {} {}", var.name, if *downward { "downto" } else { "to" }),
            &[start, end, body],
        ),
    }
}

fn write_pat_sexp(p: &Pattern, s: &mut String) {
    match &p.kind {
        PatternKind::Wildcard => s.push('_'),
        PatternKind::Var(x) => s.push_str(&x.name),
        PatternKind::Int(n) => write!(s, "{n}").unwrap(),
        PatternKind::Bool(b) => write!(s, "{b}").unwrap(),
        PatternKind::Str(t) => write!(s, "{t:?}").unwrap(),
        PatternKind::Char(c) => write!(s, "{c:?}").unwrap(),
        PatternKind::Unit => s.push_str("()"),
        PatternKind::Nil => s.push_str("[]"),
        PatternKind::Cons(h, t) => {
            s.push_str("(:: ");
            write_pat_sexp(h, s);
            s.push(' ');
            write_pat_sexp(t, s);
            s.push(')');
        }
        PatternKind::Tuple(ps) | PatternKind::Constructor(_, ps) => {
            match &p.kind {
                PatternKind::Constructor(c, _) => write!(s, "({}", c.name).unwrap(),
                _ => s.push_str("(,"),
            }
            for q in ps {
                s.push(' ');
                write_pat_sexp(q, s);
            }
            s.push(')');
        }
        PatternKind::Record(fields) => {
            s.push_str("{");
            for (f, q) in fields {
                write!(s, " {}=", f.name).unwrap();
                write_pat_sexp(q, s);
            }
            s.push('}');
        }
    }
}
