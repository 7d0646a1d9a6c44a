//! Abstract syntax, types, and the substitution machinery shared by the
//! parser, the inferencer, and the type tree.

pub mod ast;
pub mod decls;
pub mod span;
pub mod ty;
pub mod unify;

pub use ast::{Arm, Expr, ExprKind, Fixity, Ident, Pattern, PatternKind, Program, TypeDecl};
pub use decls::Decls;
pub use span::{LineIndex, Span};
pub use ty::{render_type, Namer, Ty, TyScheme, TyVar, VarSupply};
pub use unify::{match_instance, unify, Subst, UnifyError};
