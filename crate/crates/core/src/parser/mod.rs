//! Hand-written lexer and recursive-descent parser for the teaching subset.
//!
//! Operator precedence, loosest first: `;`, `:=`, `,`, `||`, `&&`,
//! comparisons, `::`/`@` (right associative), additive, multiplicative,
//! unary minus, application, `!` and field access. `if`, `match`, `fun`,
//! `let`, `while` and `for` may start any operand and extend as far right
//! as possible.

mod lexer;
mod level;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::ast::{ConstructorDecl, FieldDecl, TypeDeclKind};
use crate::lang::{
    Arm, Decls, Expr, ExprKind, Fixity, Ident, LineIndex, Pattern, PatternKind, Program, Span,
    Ty, TypeDecl,
};
pub use lexer::{tokenize, Tok, Token};
pub use level::LanguageLevel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax(String),
    LevelViolation {
        feature: String,
        required_level: u8,
        suggestion: Option<String>,
    },
    MissingElse,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "Syntax error: {msg}"),
            ParseErrorKind::MissingElse => write!(f, "The else statement is missing."),
            ParseErrorKind::LevelViolation {
                feature,
                required_level,
                suggestion,
            } => {
                write!(
                    f,
                    "{feature} is not available at this language level (requires level {required_level})."
                )?;
                if let Some(s) = suggestion {
                    write!(f, " Use {s} instead.")?;
                }
                Ok(())
            }
        }
    }
}

/// Parse a whole program: type declarations, top-level definitions, and
/// expressions, optionally separated by `;;`.
pub fn parse_program(src: &str, level: LanguageLevel) -> Result<Program, ParseError> {
    let mut p = Parser::new(src, level)?;
    let program = p.program()?;
    check_declared_types(&program, &p.index)?;
    Ok(program)
}

/// Parse a single expression spanning the whole input.
pub fn parse_expression(src: &str, level: LanguageLevel) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, level)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

fn check_declared_types(program: &Program, index: &LineIndex) -> Result<(), ParseError> {
    if let Err(msg) = Decls::new(program.decls.clone()) {
        let span = program
            .decls
            .last()
            .map(|d| d.decl_span)
            .unwrap_or_else(|| index.span(0, 0));
        return Err(ParseError {
            kind: ParseErrorKind::Syntax(msg),
            span,
        });
    }
    fn walk(t: &Ty, known: &dyn Fn(&str) -> bool) -> Option<String> {
        match t {
            Ty::Named(n) if !known(n) => Some(n.clone()),
            Ty::Arrow(a, b) => walk(a, known).or_else(|| walk(b, known)),
            Ty::Tuple(ts) => ts.iter().find_map(|t| walk(t, known)),
            Ty::List(t) | Ty::Ref(t) => walk(t, known),
            _ => None,
        }
    }
    let known = |n: &str| program.decls.iter().any(|d| d.name == n);
    for d in &program.decls {
        let tys: Vec<&Ty> = match &d.kind {
            TypeDeclKind::Variant(cs) => cs.iter().flat_map(|c| c.args.iter()).collect(),
            TypeDeclKind::Record(fs) => fs.iter().map(|f| &f.ty).collect(),
        };
        if let Some(bad) = tys.into_iter().find_map(|t| walk(t, &known)) {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("the type {bad} is not defined")),
                span: d.decl_span,
            });
        }
    }
    Ok(())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    index: LineIndex,
    level: LanguageLevel,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, level: LanguageLevel) -> PResult<Self> {
        let index = LineIndex::new(src);
        let toks = tokenize(src).map_err(|(s, e, kind)| ParseError {
            kind,
            span: index.span(s, e),
        })?;
        Ok(Parser {
            toks,
            pos: 0,
            index,
            level,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn cur(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> Option<Token> {
        (self.peek() == t).then(|| self.bump())
    }

    fn expect(&mut self, t: Tok) -> PResult<Token> {
        if *self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("expected {}", t.describe())))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let t = self.cur();
        let found = if t.tok == Tok::Eof {
            "the input ended".to_string()
        } else {
            format!("found {}", t.tok.describe())
        };
        ParseError {
            kind: ParseErrorKind::Syntax(format!("{what}, but {found}")),
            span: self.index.span(t.start, t.end),
        }
    }

    fn span(&self, start: usize, end: usize) -> Span {
        self.index.span(start, end)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn require_side_effects(&self, feature: &str, start: usize, end: usize) -> PResult<()> {
        if self.level.allows_side_effects() {
            Ok(())
        } else {
            Err(ParseError {
                kind: ParseErrorKind::LevelViolation {
                    feature: feature.to_string(),
                    required_level: 3,
                    suggestion: None,
                },
                span: self.span(start, end),
            })
        }
    }

    fn require_operator(&self, op: &str, start: usize, end: usize) -> PResult<()> {
        if self.level.allows_confusing_operators() {
            return Ok(());
        }
        let suggestion = match op {
            "==" => Some("="),
            "!=" => Some("<>"),
            "or" => Some("||"),
            "&" => Some("&&"),
            _ => return Ok(()),
        };
        Err(ParseError {
            kind: ParseErrorKind::LevelViolation {
                feature: op.to_string(),
                required_level: 4,
                suggestion: suggestion.map(str::to_string),
            },
            span: self.span(start, end),
        })
    }

    // ---- program ------------------------------------------------------

    fn program(&mut self) -> PResult<Program> {
        let mut decls = Vec::new();
        let mut items = Vec::new();
        loop {
            while self.eat(&Tok::SemiSemi).is_some() {}
            match self.peek() {
                Tok::Eof => break,
                Tok::Type => decls.extend(self.type_decls()?),
                Tok::Let => items.push(self.let_binding(true)?),
                _ => items.push(self.expr()?),
            }
        }
        Ok(Program { decls, items })
    }

    fn lident(&mut self) -> PResult<Ident> {
        let t = self.cur().clone();
        match t.tok {
            Tok::Lident(name) => {
                self.bump();
                Ok(Ident {
                    name,
                    span: self.span(t.start, t.end),
                })
            }
            _ => Err(self.unexpected("expected a name")),
        }
    }

    /// A binder position: a lowercase name or `_`.
    fn binder(&mut self) -> PResult<Ident> {
        if let Tok::Underscore = self.peek() {
            let t = self.bump();
            return Ok(Ident {
                name: "_".into(),
                span: self.span(t.start, t.end),
            });
        }
        self.lident()
    }

    fn at_binder(&self) -> bool {
        matches!(self.peek(), Tok::Lident(_) | Tok::Underscore)
    }

    // ---- type declarations --------------------------------------------

    fn type_decls(&mut self) -> PResult<Vec<TypeDecl>> {
        let mut out = Vec::new();
        let mut kw = self.expect(Tok::Type)?;
        loop {
            let name = self.lident()?.name;
            self.expect(Tok::Eq)?;
            let kind = if self.eat(&Tok::LBrace).is_some() {
                let mut fields = Vec::new();
                loop {
                    let f = self.lident()?;
                    self.expect(Tok::Colon)?;
                    let ty = self.type_expr()?;
                    fields.push(FieldDecl {
                        name: f.name,
                        ty,
                        span: self.span(f.span.start_byte, self.prev_end()),
                    });
                    if self.eat(&Tok::Semi).is_some() && *self.peek() != Tok::RBrace {
                        continue;
                    }
                    break;
                }
                self.expect(Tok::RBrace)?;
                TypeDeclKind::Record(fields)
            } else {
                self.eat(&Tok::Bar);
                let mut ctors = Vec::new();
                loop {
                    let t = self.cur().clone();
                    let Tok::Uident(cname) = t.tok else {
                        return Err(self.unexpected("expected a constructor name"));
                    };
                    self.bump();
                    let args = if self.eat(&Tok::Of).is_some() {
                        let parts = self.type_tuple()?;
                        if self.eat(&Tok::Arrow).is_some() {
                            let ret = self.type_expr()?;
                            vec![Ty::arrow(tuple_or_single(parts), ret)]
                        } else {
                            parts
                        }
                    } else {
                        vec![]
                    };
                    ctors.push(ConstructorDecl {
                        name: cname,
                        args,
                        span: self.span(t.start, self.prev_end()),
                    });
                    if self.eat(&Tok::Bar).is_none() {
                        break;
                    }
                }
                TypeDeclKind::Variant(ctors)
            };
            out.push(TypeDecl {
                name,
                kind,
                decl_span: self.span(kw.start, self.prev_end()),
            });
            match self.eat(&Tok::And) {
                Some(t) => kw = t,
                None => break,
            }
        }
        Ok(out)
    }

    fn type_expr(&mut self) -> PResult<Ty> {
        let parts = self.type_tuple()?;
        let lhs = tuple_or_single(parts);
        if self.eat(&Tok::Arrow).is_some() {
            Ok(Ty::arrow(lhs, self.type_expr()?))
        } else {
            Ok(lhs)
        }
    }

    fn type_tuple(&mut self) -> PResult<Vec<Ty>> {
        let mut parts = vec![self.type_postfix()?];
        while self.eat(&Tok::Star).is_some() {
            parts.push(self.type_postfix()?);
        }
        Ok(parts)
    }

    fn type_postfix(&mut self) -> PResult<Ty> {
        let mut t = self.type_atom()?;
        loop {
            match self.peek() {
                Tok::Lident(s) if s == "list" => {
                    self.bump();
                    t = Ty::list(t);
                }
                Tok::Lident(s) if s == "ref" => {
                    self.bump();
                    t = Ty::Ref(Box::new(t));
                }
                _ => return Ok(t),
            }
        }
    }

    fn type_atom(&mut self) -> PResult<Ty> {
        if self.eat(&Tok::LParen).is_some() {
            let t = self.type_expr()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let name = self.lident()?.name;
        Ok(match name.as_str() {
            "int" => Ty::Int,
            "float" => Ty::Float,
            "bool" => Ty::Bool,
            "string" => Ty::Str,
            "char" => Ty::Char,
            "unit" => Ty::Unit,
            _ => Ty::Named(name),
        })
    }

    // ---- expressions --------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.assign_level()?;
        if *self.peek() != Tok::Semi {
            return Ok(lhs);
        }
        let semi = self.cur().clone();
        self.require_side_effects("the sequence operator ;", semi.start, semi.end)?;
        self.bump();
        if self.closes_sequence() {
            return Ok(lhs);
        }
        let rhs = self.expr()?;
        let span = lhs.span.to(&rhs.span);
        Ok(Expr::new(ExprKind::Seq(Box::new(lhs), Box::new(rhs)), span))
    }

    fn closes_sequence(&self) -> bool {
        matches!(
            self.peek(),
            Tok::RParen
                | Tok::RBracket
                | Tok::RBrace
                | Tok::End
                | Tok::Done
                | Tok::In
                | Tok::Bar
                | Tok::SemiSemi
                | Tok::Eof
                | Tok::Then
                | Tok::Else
                | Tok::With
                | Tok::Let
                | Tok::Type
        )
    }

    fn assign_level(&mut self) -> PResult<Expr> {
        let lhs = self.tuple_level()?;
        if *self.peek() == Tok::ColonEq {
            let t = self.cur().clone();
            self.require_side_effects("assignment :=", t.start, t.end)?;
            self.bump();
            let rhs = self.assign_level()?;
            let span = lhs.span.to(&rhs.span);
            return Ok(Expr::new(ExprKind::Assign(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn tuple_level(&mut self) -> PResult<Expr> {
        let first = self.or_level()?;
        if *self.peek() != Tok::Comma {
            return Ok(first);
        }
        let mut es = vec![first];
        while self.eat(&Tok::Comma).is_some() {
            es.push(self.or_level()?);
        }
        let span = es[0].span.to(&es.last().unwrap().span);
        Ok(Expr::new(ExprKind::Tuple(es), span))
    }

    fn infix(&mut self, lhs: Expr, op: Token, rhs: Expr) -> Expr {
        let name = op.tok.operator_name().unwrap().to_string();
        let span = lhs.span.to(&rhs.span);
        Expr::new(
            ExprKind::App {
                func: Box::new(Expr::new(ExprKind::Var(name), self.span(op.start, op.end))),
                args: vec![lhs, rhs],
                fixity: Fixity::Infix,
            },
            span,
        )
    }

    fn take_operator(&mut self, accepted: &[Tok]) -> PResult<Option<Token>> {
        if !accepted.contains(self.peek()) {
            return Ok(None);
        }
        let t = self.bump();
        self.require_operator(t.tok.operator_name().unwrap(), t.start, t.end)?;
        Ok(Some(t))
    }

    fn or_level(&mut self) -> PResult<Expr> {
        let lhs = self.and_level()?;
        match self.take_operator(&[Tok::BarBar, Tok::Or])? {
            Some(op) => {
                let rhs = self.or_level()?;
                Ok(self.infix(lhs, op, rhs))
            }
            None => Ok(lhs),
        }
    }

    fn and_level(&mut self) -> PResult<Expr> {
        let lhs = self.cmp_level()?;
        match self.take_operator(&[Tok::AmpAmp, Tok::Amp])? {
            Some(op) => {
                let rhs = self.and_level()?;
                Ok(self.infix(lhs, op, rhs))
            }
            None => Ok(lhs),
        }
    }

    fn cmp_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.cons_level()?;
        let ops = [
            Tok::Eq,
            Tok::Ne,
            Tok::Lt,
            Tok::Gt,
            Tok::Le,
            Tok::Ge,
            Tok::EqEq,
            Tok::BangEq,
        ];
        while let Some(op) = self.take_operator(&ops)? {
            let rhs = self.cons_level()?;
            lhs = self.infix(lhs, op, rhs);
        }
        Ok(lhs)
    }

    fn cons_level(&mut self) -> PResult<Expr> {
        let lhs = self.add_level()?;
        if self.eat(&Tok::ColonColon).is_some() {
            let rhs = self.cons_level()?;
            let span = lhs.span.to(&rhs.span);
            return Ok(Expr::new(ExprKind::Cons(Box::new(lhs), Box::new(rhs)), span));
        }
        if let Some(op) = self.take_operator(&[Tok::At])? {
            let rhs = self.cons_level()?;
            return Ok(self.infix(lhs, op, rhs));
        }
        Ok(lhs)
    }

    fn add_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_level()?;
        let ops = [Tok::Plus, Tok::Minus, Tok::Caret, Tok::PlusDot, Tok::MinusDot];
        while let Some(op) = self.take_operator(&ops)? {
            let rhs = self.mul_level()?;
            lhs = self.infix(lhs, op, rhs);
        }
        Ok(lhs)
    }

    fn mul_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_level()?;
        let ops = [Tok::Star, Tok::Slash, Tok::Mod, Tok::StarDot, Tok::SlashDot];
        while let Some(op) = self.take_operator(&ops)? {
            let rhs = self.unary_level()?;
            lhs = self.infix(lhs, op, rhs);
        }
        Ok(lhs)
    }

    fn unary_level(&mut self) -> PResult<Expr> {
        let name = match self.peek() {
            Tok::Minus => "~-",
            Tok::MinusDot => "~-.",
            _ => return self.app_level(),
        };
        let op = self.bump();
        let operand = self.unary_level()?;
        let span = self.span(op.start, operand.span.end_byte);
        Ok(Expr::new(
            ExprKind::App {
                func: Box::new(Expr::new(
                    ExprKind::Var(name.to_string()),
                    self.span(op.start, op.end),
                )),
                args: vec![operand],
                fixity: Fixity::Unary,
            },
            span,
        ))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Float(_)
                | Tok::Str(_)
                | Tok::Char(_)
                | Tok::Lident(_)
                | Tok::Uident(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::LBracket
                | Tok::LBrace
                | Tok::Begin
                | Tok::Bang
        )
    }

    fn app_level(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::If => return self.if_expr(),
            Tok::Match => return self.match_expr(),
            Tok::Fun => return self.fun_expr(),
            Tok::Let => return self.let_binding(false),
            Tok::While => return self.while_expr(),
            Tok::For => return self.for_expr(),
            _ => {}
        }
        if !self.starts_atom() {
            return Err(self.unexpected("expected an expression"));
        }
        let (head, _) = self.simple()?;
        if let ExprKind::Constructor { args, .. } = &head.kind {
            if args.is_empty() && self.starts_atom() {
                let (arg, parenthesized) = self.simple()?;
                let span = head.span.to(&arg.span);
                let args = match arg.kind {
                    ExprKind::Tuple(items) if parenthesized => items,
                    _ => vec![arg],
                };
                let ExprKind::Constructor { head: name, .. } = head.kind else {
                    unreachable!()
                };
                return Ok(Expr::new(ExprKind::Constructor { head: name, args }, span));
            }
            return Ok(head);
        }
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.simple()?.0);
        }
        if args.is_empty() {
            return Ok(head);
        }
        let span = head.span.to(&args.last().unwrap().span);
        Ok(Expr::new(
            ExprKind::App {
                func: Box::new(head),
                args,
                fixity: Fixity::Prefix,
            },
            span,
        ))
    }

    /// An atom with trailing field accesses. The flag reports whether the
    /// atom was written in parentheses.
    fn simple(&mut self) -> PResult<(Expr, bool)> {
        if *self.peek() == Tok::Bang {
            let t = self.bump();
            self.require_side_effects("dereference !", t.start, t.end)?;
            let (inner, _) = self.simple()?;
            let span = self.span(t.start, inner.span.end_byte);
            return Ok((Expr::new(ExprKind::Deref(Box::new(inner)), span), false));
        }
        let (mut e, mut paren) = self.atom()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let field = self.lident()?;
            let span = e.span.to(&field.span);
            e = Expr::new(ExprKind::Field(Box::new(e), field), span);
            paren = false;
        }
        Ok((e, paren))
    }

    fn atom(&mut self) -> PResult<(Expr, bool)> {
        let t = self.cur().clone();
        let sp = self.span(t.start, t.end);
        let lit = |k| Ok((Expr::new(k, sp), false));
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                lit(ExprKind::Int(n))
            }
            Tok::Float(f) => {
                self.bump();
                lit(ExprKind::Float(f))
            }
            Tok::Str(s) => {
                self.bump();
                lit(ExprKind::Str(s))
            }
            Tok::Char(c) => {
                self.bump();
                lit(ExprKind::Char(c))
            }
            Tok::True | Tok::False => {
                self.bump();
                lit(ExprKind::Bool(t.tok == Tok::True))
            }
            Tok::Lident(name) => {
                if name == "ref" {
                    self.require_side_effects("ref", t.start, t.end)?;
                }
                self.bump();
                lit(ExprKind::Var(name))
            }
            Tok::Uident(name) => {
                self.bump();
                let head = Expr::new(ExprKind::ConstrName(name), sp);
                lit(ExprKind::Constructor {
                    head: Box::new(head),
                    args: vec![],
                })
            }
            Tok::LParen => self.paren(),
            Tok::Begin => {
                self.bump();
                let mut e = self.expr()?;
                let close = self.expect(Tok::End)?;
                e.span = self.span(t.start, close.end);
                Ok((e, true))
            }
            Tok::LBracket => {
                self.bump();
                let mut es = Vec::new();
                while *self.peek() != Tok::RBracket {
                    es.push(self.assign_level()?);
                    if self.eat(&Tok::Semi).is_none() {
                        break;
                    }
                }
                let close = self.expect(Tok::RBracket)?;
                Ok((
                    Expr::new(ExprKind::List(es), self.span(t.start, close.end)),
                    false,
                ))
            }
            Tok::LBrace => {
                self.bump();
                let mut fields = Vec::new();
                loop {
                    let f = self.lident()?;
                    self.expect(Tok::Eq)?;
                    let v = self.tuple_level()?;
                    fields.push((f, v));
                    if self.eat(&Tok::Semi).is_none() || *self.peek() == Tok::RBrace {
                        break;
                    }
                }
                let close = self.expect(Tok::RBrace)?;
                Ok((
                    Expr::new(ExprKind::Record(fields), self.span(t.start, close.end)),
                    false,
                ))
            }
            _ => Err(self.unexpected("expected an expression")),
        }
    }

    fn paren(&mut self) -> PResult<(Expr, bool)> {
        let open = self.bump();
        if let Some(close) = self.eat(&Tok::RParen) {
            self.require_side_effects("the unit value ()", open.start, close.end)?;
            return Ok((
                Expr::new(ExprKind::Unit, self.span(open.start, close.end)),
                false,
            ));
        }
        if let Some(op) = self.peek().operator_name() {
            if *self.peek_at(1) == Tok::RParen {
                let t = self.bump();
                self.require_operator(op, t.start, t.end)?;
                let close = self.bump();
                return Ok((
                    Expr::new(
                        ExprKind::Var(op.to_string()),
                        self.span(open.start, close.end),
                    ),
                    false,
                ));
            }
        }
        if *self.peek() == Tok::ColonColon && *self.peek_at(1) == Tok::RParen {
            return Err(self.unexpected("the section (::) is not supported"));
        }
        let mut e = self.expr()?;
        let close = self.expect(Tok::RParen)?;
        e.span = self.span(open.start, close.end);
        Ok((e, true))
    }

    fn if_expr(&mut self) -> PResult<Expr> {
        let kw = self.expect(Tok::If)?;
        let cond = self.expr()?;
        self.expect(Tok::Then)?;
        let then_branch = self.assign_level()?;
        let else_branch = if self.eat(&Tok::Else).is_some() {
            Some(Box::new(self.assign_level()?))
        } else {
            None
        };
        let end = else_branch
            .as_ref()
            .map_or(then_branch.span.end_byte, |e| e.span.end_byte);
        let span = self.span(kw.start, end);
        if else_branch.is_none() && !self.level.allows_side_effects() {
            return Err(ParseError {
                kind: ParseErrorKind::MissingElse,
                span,
            });
        }
        Ok(Expr::new(
            ExprKind::If {
                cond: Box::new(cond),
                then_branch: Box::new(then_branch),
                else_branch,
            },
            span,
        ))
    }

    fn match_expr(&mut self) -> PResult<Expr> {
        let kw = self.expect(Tok::Match)?;
        let scrutinee = self.expr()?;
        self.expect(Tok::With)?;
        self.eat(&Tok::Bar);
        let mut arms = Vec::new();
        loop {
            let pattern = self.pattern()?;
            self.expect(Tok::Arrow)?;
            let body = self.expr()?;
            arms.push(Arm { pattern, body });
            if self.eat(&Tok::Bar).is_none() {
                break;
            }
        }
        let span = self.span(kw.start, arms.last().unwrap().body.span.end_byte);
        Ok(Expr::new(
            ExprKind::Match {
                scrutinee: Box::new(scrutinee),
                arms,
            },
            span,
        ))
    }

    fn fun_expr(&mut self) -> PResult<Expr> {
        let kw = self.expect(Tok::Fun)?;
        let mut params = vec![self.binder()?];
        while self.at_binder() {
            params.push(self.binder()?);
        }
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        let mut e = wrap_params(params, body, &self.index);
        e.span = self.span(kw.start, e.span.end_byte);
        Ok(e)
    }

    /// `let [rec] f x y = e [in body]`. Without `in` this is only valid at
    /// top level.
    fn let_binding(&mut self, top: bool) -> PResult<Expr> {
        let kw = self.expect(Tok::Let)?;
        let is_rec = self.eat(&Tok::Rec).is_some();
        let name = self.binder()?;
        let mut params = Vec::new();
        while self.at_binder() {
            params.push(self.binder()?);
        }
        self.expect(Tok::Eq)?;
        let bound = self.expr()?;
        let bound = wrap_params(params, bound, &self.index);
        let body = if self.eat(&Tok::In).is_some() {
            Some(Box::new(self.expr()?))
        } else if top {
            None
        } else {
            return Err(self.unexpected("expected in"));
        };
        let end = body
            .as_ref()
            .map_or(bound.span.end_byte, |b| b.span.end_byte);
        let span = self.span(kw.start, end);
        let bound = Box::new(bound);
        let kind = if is_rec {
            ExprKind::LetRec { name, bound, body }
        } else {
            ExprKind::Let { name, bound, body }
        };
        Ok(Expr::new(kind, span))
    }

    fn while_expr(&mut self) -> PResult<Expr> {
        let kw = self.expect(Tok::While)?;
        self.require_side_effects("while loops", kw.start, kw.end)?;
        let cond = self.expr()?;
        self.expect(Tok::Do)?;
        let body = self.expr()?;
        let done = self.expect(Tok::Done)?;
        Ok(Expr::new(
            ExprKind::While(Box::new(cond), Box::new(body)),
            self.span(kw.start, done.end),
        ))
    }

    fn for_expr(&mut self) -> PResult<Expr> {
        let kw = self.expect(Tok::For)?;
        self.require_side_effects("for loops", kw.start, kw.end)?;
        let var = self.lident()?;
        self.expect(Tok::Eq)?;
        let start = self.expr()?;
        let downward = match self.peek() {
            Tok::To => false,
            Tok::Downto => true,
            _ => return Err(self.unexpected("expected to or downto")),
        };
        self.bump();
        let end = self.expr()?;
        self.expect(Tok::Do)?;
        let body = self.expr()?;
        let done = self.expect(Tok::Done)?;
        Ok(Expr::new(
            ExprKind::For {
                var,
                start: Box::new(start),
                end: Box::new(end),
                downward,
                body: Box::new(body),
            },
            self.span(kw.start, done.end),
        ))
    }

    // ---- patterns -----------------------------------------------------

    fn pattern(&mut self) -> PResult<Pattern> {
        let first = self.pat_cons()?;
        if *self.peek() != Tok::Comma {
            return Ok(first);
        }
        let mut ps = vec![first];
        while self.eat(&Tok::Comma).is_some() {
            ps.push(self.pat_cons()?);
        }
        let span = ps[0].span.to(&ps.last().unwrap().span);
        Ok(Pattern {
            kind: PatternKind::Tuple(ps),
            span,
        })
    }

    fn pat_cons(&mut self) -> PResult<Pattern> {
        let head = self.pat_app()?;
        if self.eat(&Tok::ColonColon).is_some() {
            let tail = self.pat_cons()?;
            let span = head.span.to(&tail.span);
            return Ok(Pattern {
                kind: PatternKind::Cons(Box::new(head), Box::new(tail)),
                span,
            });
        }
        Ok(head)
    }

    fn starts_pat_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Underscore
                | Tok::Lident(_)
                | Tok::Uident(_)
                | Tok::Int(_)
                | Tok::Str(_)
                | Tok::Char(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::LBracket
                | Tok::LBrace
                | Tok::Minus
        )
    }

    fn pat_app(&mut self) -> PResult<Pattern> {
        if let Tok::Uident(name) = self.peek().clone() {
            let t = self.bump();
            let ident = Ident {
                name,
                span: self.span(t.start, t.end),
            };
            if !self.starts_pat_atom() {
                return Ok(Pattern {
                    kind: PatternKind::Constructor(ident.clone(), vec![]),
                    span: ident.span,
                });
            }
            let (arg, parenthesized) = self.pat_atom()?;
            let span = ident.span.to(&arg.span);
            let args = match arg.kind {
                PatternKind::Tuple(ps) if parenthesized => ps,
                _ => vec![arg],
            };
            return Ok(Pattern {
                kind: PatternKind::Constructor(ident, args),
                span,
            });
        }
        Ok(self.pat_atom()?.0)
    }

    fn pat_atom(&mut self) -> PResult<(Pattern, bool)> {
        let t = self.cur().clone();
        let sp = self.span(t.start, t.end);
        let simple = |kind| Ok((Pattern { kind, span: sp }, false));
        match t.tok {
            Tok::Underscore => {
                self.bump();
                simple(PatternKind::Wildcard)
            }
            Tok::Lident(name) => {
                self.bump();
                simple(PatternKind::Var(Ident { name, span: sp }))
            }
            Tok::Uident(name) => {
                self.bump();
                simple(PatternKind::Constructor(Ident { name, span: sp }, vec![]))
            }
            Tok::Int(n) => {
                self.bump();
                simple(PatternKind::Int(n))
            }
            Tok::Minus => {
                self.bump();
                let n = self.cur().clone();
                let Tok::Int(v) = n.tok else {
                    return Err(self.unexpected("expected an integer"));
                };
                self.bump();
                Ok((
                    Pattern {
                        kind: PatternKind::Int(-v),
                        span: self.span(t.start, n.end),
                    },
                    false,
                ))
            }
            Tok::Str(s) => {
                self.bump();
                simple(PatternKind::Str(s))
            }
            Tok::Char(c) => {
                self.bump();
                simple(PatternKind::Char(c))
            }
            Tok::True | Tok::False => {
                self.bump();
                simple(PatternKind::Bool(t.tok == Tok::True))
            }
            Tok::LParen => {
                self.bump();
                if let Some(close) = self.eat(&Tok::RParen) {
                    self.require_side_effects("the unit value ()", t.start, close.end)?;
                    return Ok((
                        Pattern {
                            kind: PatternKind::Unit,
                            span: self.span(t.start, close.end),
                        },
                        false,
                    ));
                }
                let mut p = self.pattern()?;
                let close = self.expect(Tok::RParen)?;
                p.span = self.span(t.start, close.end);
                Ok((p, true))
            }
            Tok::LBracket => {
                self.bump();
                let mut elems = Vec::new();
                while *self.peek() != Tok::RBracket {
                    elems.push(self.pat_cons()?);
                    if self.eat(&Tok::Semi).is_none() {
                        break;
                    }
                }
                let close = self.expect(Tok::RBracket)?;
                let end_span = self.span(close.start, close.end);
                let mut acc = Pattern {
                    kind: PatternKind::Nil,
                    span: if elems.is_empty() {
                        self.span(t.start, close.end)
                    } else {
                        end_span
                    },
                };
                for p in elems.into_iter().rev() {
                    let span = p.span.to(&acc.span);
                    acc = Pattern {
                        kind: PatternKind::Cons(Box::new(p), Box::new(acc)),
                        span,
                    };
                }
                acc.span = self.span(t.start, close.end);
                Ok((acc, false))
            }
            Tok::LBrace => {
                self.bump();
                let mut fields = Vec::new();
                loop {
                    let f = self.lident()?;
                    let p = if self.eat(&Tok::Eq).is_some() {
                        self.pattern()?
                    } else {
                        Pattern {
                            kind: PatternKind::Var(f.clone()),
                            span: f.span,
                        }
                    };
                    fields.push((f, p));
                    if self.eat(&Tok::Semi).is_none() || *self.peek() == Tok::RBrace {
                        break;
                    }
                }
                let close = self.expect(Tok::RBrace)?;
                Ok((
                    Pattern {
                        kind: PatternKind::Record(fields),
                        span: self.span(t.start, close.end),
                    },
                    false,
                ))
            }
            _ => Err(self.unexpected("expected a pattern")),
        }
    }
}

fn tuple_or_single(mut parts: Vec<Ty>) -> Ty {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Ty::Tuple(parts)
    }
}

/// Desugar `f x y = e` into nested single-parameter functions. Each inner
/// function's span runs from its parameter to the end of the body.
fn wrap_params(params: Vec<Ident>, body: Expr, index: &LineIndex) -> Expr {
    let end = body.span.end_byte;
    params.into_iter().rev().fold(body, |acc, x| {
        let span = index.span(x.span.start_byte, end);
        Expr::new(ExprKind::Fun(x, Box::new(acc)), span)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u8) -> LanguageLevel {
        LanguageLevel::new(n).unwrap()
    }

    fn sexp(src: &str) -> String {
        parse_expression(src, LanguageLevel::FULL).unwrap().sexp()
    }

    #[test]
    fn missing_else_depends_on_level() {
        let src = "fun x -> if true then x + 1";
        let err = parse_expression(src, lv(1)).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingElse);
        assert_eq!(err.span.text(src), "if true then x + 1");
        assert!(parse_expression(src, lv(3)).is_ok());
    }

    #[test]
    fn physical_equality_requires_level_four() {
        let err = parse_expression("a == b", lv(3)).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::LevelViolation {
                feature: "==".into(),
                required_level: 4,
                suggestion: Some("=".into())
            }
        );
        assert!(parse_expression("a == b", lv(4)).is_ok());
    }

    #[test]
    fn dangling_operator_is_a_syntax_error() {
        let err = parse_expression("1 + ", lv(4)).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn precedence() {
        assert_eq!(sexp("1 + 2 * 3"), "(infix + 1 (infix * 2 3))");
        assert_eq!(sexp("a :: b @ c"), "(cons a (infix @ b c))");
        assert_eq!(sexp("f x y + g z"), "(infix + (app f x y) (app g z))");
        assert_eq!(sexp("- f x"), "(unary ~- (app f x))");
        assert_eq!(sexp("a && b || c"), "(infix || (infix && a b) c)");
        assert_eq!(sexp("1, 2 = 3"), "(tuple 1 (infix = 2 3))");
    }

    #[test]
    fn list_with_comma_is_a_singleton_of_a_tuple() {
        assert_eq!(sexp("[1, 2]"), "(list (tuple 1 2))");
        assert_eq!(sexp("[1; 2;]"), "(list 1 2)");
    }

    #[test]
    fn branches_include_tuples() {
        assert_eq!(sexp("if f then 1, 2 else 3.5"), "(if f (tuple 1 2) 3.5)");
    }

    #[test]
    fn parenthesized_span_includes_parens() {
        let src = "f (g x)";
        let e = parse_expression(src, lv(4)).unwrap();
        let ExprKind::App { args, .. } = &e.kind else {
            panic!()
        };
        assert_eq!(args[0].span.text(src), "(g x)");
    }

    #[test]
    fn constructor_arguments_split_on_parenthesized_tuples() {
        assert_eq!(sexp("Node (a, b)"), "(con Node a b)");
        let e = parse_expression("Some (a, b)", lv(4)).unwrap();
        match &e.kind {
            ExprKind::Constructor { args, .. } => assert_eq!(args.len(), 2),
            other => panic!("{other:?}"),
        }
        let e = parse_expression("Some x", lv(4)).unwrap();
        match &e.kind {
            ExprKind::Constructor { args, .. } => assert_eq!(args.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn operator_sections() {
        assert_eq!(sexp("( + )"), "+");
        assert_eq!(sexp("(=) 1"), "(app = 1)");
    }

    #[test]
    fn sequence_and_imperative_features_are_gated() {
        for src in ["a; b", "x := 1", "!r", "ref 1", "()", "while true do () done"] {
            let err = parse_expression(src, lv(2)).unwrap_err();
            assert!(
                matches!(err.kind, ParseErrorKind::LevelViolation { required_level: 3, .. }),
                "{src}: {err:?}"
            );
            assert!(parse_expression(src, lv(3)).is_ok(), "{src}");
        }
    }

    #[test]
    fn program_items() {
        let src = "type t = A | B of int * t\nlet rec f n = n\nlet g = f 1 ;; g";
        let p = parse_program(src, lv(4)).unwrap();
        assert_eq!(p.decls.len(), 1);
        assert_eq!(p.items.len(), 3);
        let TypeDeclKind::Variant(cs) = &p.decls[0].kind else {
            panic!()
        };
        assert_eq!(cs[1].args.len(), 2);
        assert!(matches!(p.items[0].kind, ExprKind::LetRec { body: None, .. }));
    }

    #[test]
    fn unknown_type_in_declaration() {
        assert!(parse_program("type t = A of u", lv(4)).is_err());
    }

    #[test]
    fn match_and_patterns() {
        let s = sexp("match l with [] -> 0 | x :: rest -> x | [a; b] -> a");
        assert!(s.starts_with("(match l"), "{s}");
    }
}
