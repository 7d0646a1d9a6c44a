use std::collections::BTreeSet;
use std::rc::Rc;

use super::{BinderId, NodeId, Typing};
use crate::lang::{TyScheme, TyVar, VarSupply};

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    /// A variable whose type is demanded from the context. `definition` is
    /// the bound expression for monomorphic `let`s and recursive names.
    Mono {
        id: BinderId,
        definition: Option<NodeId>,
    },
    /// A let-polymorphic definition with the typing of its bound expression,
    /// or `None` when that expression is ill-typed.
    Poly {
        definition: NodeId,
        typing: Option<Typing>,
    },
}

impl Binding {
    /// The scheme used when re-checking code in this scope: generic in the
    /// variables the definition does not share with its assumptions.
    pub fn probe_scheme(&self, supply: &mut VarSupply) -> TyScheme {
        match self {
            Binding::Mono { .. } => TyScheme::mono(supply.fresh()),
            Binding::Poly { typing: None, .. } => {
                let v = supply.fresh_var();
                TyScheme {
                    quantified: vec![v],
                    body: crate::lang::Ty::Var(v),
                }
            }
            Binding::Poly {
                typing: Some(t), ..
            } => {
                let fixed: BTreeSet<TyVar> = t
                    .env
                    .iter()
                    .chain(t.carried.iter())
                    .flat_map(|d| d.ty.vars())
                    .collect();
                TyScheme {
                    quantified: t.ty.vars().into_iter().filter(|v| !fixed.contains(v)).collect(),
                    body: t.ty.clone(),
                }
            }
        }
    }
}

#[derive(Debug)]
struct Frame {
    name: String,
    binding: Binding,
    parent: Scope,
}

/// Persistent list of local bindings, innermost first. Cheap to clone, so
/// every tree node keeps the scope it was built in.
#[derive(Debug, Clone, Default)]
pub struct Scope(Option<Rc<Frame>>);

impl Scope {
    pub fn empty() -> Self {
        Scope(None)
    }

    pub fn push(&self, name: &str, binding: Binding) -> Scope {
        Scope(Some(Rc::new(Frame {
            name: name.to_string(),
            binding,
            parent: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Binding> {
        let mut cur = self.0.as_ref();
        while let Some(f) = cur {
            if f.name == name {
                return Some(&f.binding);
            }
            cur = f.parent.0.as_ref();
        }
        None
    }

    /// All visible bindings, innermost first, shadowed ones omitted.
    pub fn bindings(&self) -> Vec<(&str, &Binding)> {
        let mut out: Vec<(&str, &Binding)> = Vec::new();
        let mut cur = self.0.as_ref();
        while let Some(f) = cur {
            if !out.iter().any(|(n, _)| *n == f.name) {
                out.push((&f.name, &f.binding));
            }
            cur = f.parent.0.as_ref();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_bindings_shadow_outer() {
        let s = Scope::empty()
            .push(
                "x",
                Binding::Mono {
                    id: BinderId::at(0),
                    definition: None,
                },
            )
            .push(
                "x",
                Binding::Mono {
                    id: BinderId::at(9),
                    definition: None,
                },
            );
        assert_eq!(
            s.lookup("x"),
            Some(&Binding::Mono {
                id: BinderId::at(9),
                definition: None
            })
        );
        assert_eq!(s.bindings().len(), 1);
        assert!(s.lookup("y").is_none());
    }
}
