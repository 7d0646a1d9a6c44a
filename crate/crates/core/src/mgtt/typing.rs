use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{Namer, Subst, Ty, TyVar, UnifyError, VarSupply};

/// Where a demanded variable is bound: the byte offset of its binding
/// occurrence, or its name when nothing in the tree binds it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    At(usize),
    Free(String),
}

/// Identity of a demanded variable. `copy` distinguishes renamed copies
/// made while locating conflicting uses; it is 0 in the tree itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinderId {
    pub site: Site,
    pub copy: u32,
}

impl BinderId {
    pub fn at(offset: usize) -> Self {
        BinderId {
            site: Site::At(offset),
            copy: 0,
        }
    }

    pub fn free(name: &str) -> Self {
        BinderId {
            site: Site::Free(name.to_string()),
            copy: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: BinderId,
    pub name: String,
    pub ty: Ty,
}

/// A principal typing: the assumptions an expression demands of its free
/// variables, and its type under them. `carried` holds the assumptions of
/// let-polymorphic definitions used inside, still to be linked with the
/// definition's own assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct Typing {
    pub env: Vec<Demand>,
    pub ty: Ty,
    pub carried: Vec<Demand>,
}

impl Typing {
    pub fn leaf(ty: Ty) -> Self {
        Typing {
            env: vec![],
            ty,
            carried: vec![],
        }
    }

    pub fn lookup(&self, id: &BinderId) -> Option<&Ty> {
        self.env.iter().find(|d| d.id == *id).map(|d| &d.ty)
    }

    pub fn lookup_name(&self, name: &str) -> Option<&Demand> {
        self.env.iter().find(|d| d.name == name)
    }

    /// Every type in the typing, env first.
    pub fn types(&self) -> impl Iterator<Item = &Ty> {
        self.env
            .iter()
            .chain(self.carried.iter())
            .map(|d| &d.ty)
            .chain(std::iter::once(&self.ty))
    }

    pub fn apply(&self, s: &Subst) -> Typing {
        let ap = |ds: &[Demand]| {
            ds.iter()
                .map(|d| Demand {
                    id: d.id.clone(),
                    name: d.name.clone(),
                    ty: s.apply(&d.ty),
                })
                .collect()
        };
        Typing {
            env: ap(&self.env),
            ty: s.apply(&self.ty),
            carried: ap(&self.carried),
        }
    }

    /// A copy with every type variable replaced by a fresh one.
    pub fn freshen(&self, supply: &mut VarSupply) -> Typing {
        let mut map: HashMap<TyVar, Ty> = HashMap::new();
        for t in self.types() {
            for v in t.vars() {
                map.entry(v).or_insert_with(|| supply.fresh());
            }
        }
        let ren = |ds: &[Demand]| {
            ds.iter()
                .map(|d| Demand {
                    id: d.id.clone(),
                    name: d.name.clone(),
                    ty: d.ty.rename(&map),
                })
                .collect()
        };
        Typing {
            env: ren(&self.env),
            ty: self.ty.rename(&map),
            carried: ren(&self.carried),
        }
    }

    /// Render as `x : t, y : u |- ty` with one shared namer.
    pub fn render(&self, namer: &mut Namer) -> RenderedTyping {
        let env = self
            .env
            .iter()
            .map(|d| (d.name.clone(), namer.render(&d.ty)))
            .collect();
        RenderedTyping {
            env,
            ty: namer.render(&self.ty),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedTyping {
    pub env: Vec<(String, String)>,
    pub ty: String,
}

impl fmt::Display for RenderedTyping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let env: Vec<String> = self.env.iter().map(|(x, t)| format!("{x} : {t}")).collect();
        write!(f, "{{{}}} |- {}", env.join(", "), self.ty)
    }
}

/// Accumulates the children of one node: merges their assumptions under a
/// growing substitution.
#[derive(Debug, Default)]
pub struct Composer {
    pub subst: Subst,
    pub env: Vec<Demand>,
    pub carried: Vec<Demand>,
}

/// Why composing a node failed.
#[derive(Debug, Clone, PartialEq)]
pub enum ComposeError {
    /// Two children demand incompatible types of the same variable.
    SharedVariable { name: String, error: UnifyError },
    /// The node's own typing rule failed.
    Rule(UnifyError),
}

impl Composer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Merge a child's assumptions and return its type.
    pub fn absorb(&mut self, t: &Typing) -> Result<Ty, ComposeError> {
        for d in &t.env {
            merge_into(&mut self.subst, &mut self.env, d)?;
        }
        for d in &t.carried {
            merge_into(&mut self.subst, &mut self.carried, d)?;
        }
        Ok(t.ty.clone())
    }

    /// Remove the assumption on a binder introduced by this node.
    pub fn take(&mut self, id: &BinderId) -> Option<Ty> {
        let i = self.env.iter().position(|d| d.id == *id)?;
        Some(self.env.remove(i).ty)
    }

    pub fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), ComposeError> {
        self.subst.unify(a, b).map_err(ComposeError::Rule)
    }

    /// Link carried assumptions with matching demands, then apply the
    /// substitution.
    pub fn finish(mut self, ty: Ty) -> Result<Typing, ComposeError> {
        let carried = std::mem::take(&mut self.carried);
        let mut keep = Vec::new();
        for d in carried {
            match self.env.iter().find(|e| e.id == d.id) {
                Some(e) => {
                    let et = e.ty.clone();
                    self.subst
                        .unify(&et, &d.ty)
                        .map_err(|error| ComposeError::SharedVariable {
                            name: d.name.clone(),
                            error,
                        })?;
                }
                None => keep.push(d),
            }
        }
        let t = Typing {
            env: self.env,
            ty,
            carried: keep,
        };
        Ok(t.apply(&self.subst))
    }
}

fn merge_into(s: &mut Subst, into: &mut Vec<Demand>, d: &Demand) -> Result<(), ComposeError> {
    match into.iter().find(|e| e.id == d.id) {
        Some(e) => {
            let et = e.ty.clone();
            s.unify(&et, &d.ty)
                .map_err(|error| ComposeError::SharedVariable {
                    name: d.name.clone(),
                    error,
                })
        }
        None => {
            into.push(d.clone());
            Ok(())
        }
    }
}
