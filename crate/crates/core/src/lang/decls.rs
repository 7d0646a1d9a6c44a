use std::collections::HashMap;

use super::ast::{TypeDecl, TypeDeclKind};
use super::span::Span;
use super::ty::Ty;

/// Lookup tables over a program's type declarations. Constructor and field
/// names share one flat namespace each, as in OCaml.
#[derive(Debug, Clone, Default)]
pub struct Decls {
    decls: Vec<TypeDecl>,
    constructors: HashMap<String, (usize, usize)>,
    fields: HashMap<String, (usize, usize)>,
}

pub struct ConstructorInfo<'d> {
    pub name: &'d str,
    pub type_name: &'d str,
    pub args: &'d [Ty],
    pub decl_span: Span,
}

pub struct FieldInfo<'d> {
    pub record: &'d str,
    pub ty: &'d Ty,
    /// Every field of the record, in declaration order.
    pub all: Vec<(&'d str, &'d Ty)>,
}

impl Decls {
    pub fn new(decls: Vec<TypeDecl>) -> Result<Self, String> {
        let mut out = Decls::default();
        for (di, d) in decls.iter().enumerate() {
            if decls[..di].iter().any(|e| e.name == d.name) {
                return Err(format!("the type {} is declared twice", d.name));
            }
            match &d.kind {
                TypeDeclKind::Variant(cs) => {
                    for (ci, c) in cs.iter().enumerate() {
                        if out.constructors.insert(c.name.clone(), (di, ci)).is_some() {
                            return Err(format!("the constructor {} is declared twice", c.name));
                        }
                    }
                }
                TypeDeclKind::Record(fs) => {
                    for (fi, f) in fs.iter().enumerate() {
                        if out.fields.insert(f.name.clone(), (di, fi)).is_some() {
                            return Err(format!("the field {} is declared twice", f.name));
                        }
                    }
                }
            }
        }
        out.decls = decls;
        Ok(out)
    }

    pub fn decls(&self) -> &[TypeDecl] {
        &self.decls
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.decls.iter().any(|d| d.name == name)
    }

    pub fn constructor(&self, name: &str) -> Option<ConstructorInfo<'_>> {
        let &(di, ci) = self.constructors.get(name)?;
        let d = &self.decls[di];
        match &d.kind {
            TypeDeclKind::Variant(cs) => Some(ConstructorInfo {
                name: &cs[ci].name,
                type_name: &d.name,
                args: &cs[ci].args,
                decl_span: d.decl_span,
            }),
            TypeDeclKind::Record(_) => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<FieldInfo<'_>> {
        let &(di, fi) = self.fields.get(name)?;
        let d = &self.decls[di];
        match &d.kind {
            TypeDeclKind::Record(fs) => Some(FieldInfo {
                record: &d.name,
                ty: &fs[fi].ty,
                all: fs.iter().map(|f| (f.name.as_str(), &f.ty)).collect(),
            }),
            TypeDeclKind::Variant(_) => None,
        }
    }
}

impl<'d> ConstructorInfo<'d> {
    /// The constructor viewed as a function: `t1 * ... * tn -> T`, or just
    /// `T` when nullary.
    pub fn as_function_type(&self) -> Ty {
        let result = Ty::Named(self.type_name.to_string());
        match self.args {
            [] => result,
            [single] => Ty::arrow(single.clone(), result),
            many => Ty::arrow(Ty::Tuple(many.to_vec()), result),
        }
    }
}
