use std::collections::{BTreeSet, HashMap, HashSet};

use super::{Diagnoser, Diagnosis, Outcome, Payload};
use crate::lang::{Subst, Ty};
use crate::mgtt::{BinderId, Demand, Mgtt, NodeId, Typing};

/// One use of a shared variable: the child it occurs in and its type
/// after the node's own rule has been applied.
#[derive(Clone)]
struct Copy {
    child: usize,
    ty: Ty,
}

impl Diagnoser<'_> {
    /// Every child is fine on its own and every local constraint holds, so
    /// some variable must be demanded at incompatible types by different
    /// children. Rename each child's copy apart, re-run the node's rule,
    /// and find the first variable whose copies cannot be unified.
    pub(super) fn conflicting_variable(&mut self, id: NodeId) -> Outcome {
        let children = self.m.node(id).children.clone();
        let Some(typings) = children
            .iter()
            .map(|&c| self.m.node(c).typing().cloned())
            .collect::<Option<Vec<Typing>>>()
        else {
            return self.generic(id);
        };

        let mut order: Vec<(BinderId, String)> = Vec::new();
        let mut owners: HashMap<BinderId, BTreeSet<usize>> = HashMap::new();
        for (i, t) in typings.iter().enumerate() {
            for d in t.env.iter().chain(&t.carried) {
                if !owners.contains_key(&d.id) {
                    order.push((d.id.clone(), d.name.clone()));
                }
                owners.entry(d.id.clone()).or_default().insert(i);
            }
        }
        let shared: Vec<(BinderId, String)> = order
            .into_iter()
            .filter(|(b, _)| owners[b].len() > 1)
            .collect();
        if shared.is_empty() {
            return self.generic(id);
        }
        let split: HashSet<&BinderId> = shared.iter().map(|(b, _)| b).collect();
        let renamed: Vec<Typing> = typings
            .iter()
            .enumerate()
            .map(|(i, t)| rename_apart(t, &split, i as u32 + 1))
            .collect();
        let Ok(together) = self.m.recompose(id, &renamed, self.decls, self.supply) else {
            return self.generic(id);
        };

        let copies: Vec<Vec<Copy>> = shared
            .iter()
            .map(|(b, _)| {
                owners[b]
                    .iter()
                    .filter_map(|&child| {
                        let key = BinderId {
                            site: b.site.clone(),
                            copy: child as u32 + 1,
                        };
                        together
                            .env
                            .iter()
                            .chain(&together.carried)
                            .find(|d| d.id == key)
                            .map(|d| Copy {
                                child,
                                ty: d.ty.clone(),
                            })
                    })
                    .collect()
            })
            .collect();

        let Some((which, first, second, subst)) = find_conflict(&copies) else {
            return self.generic(id);
        };
        let (binder, name) = &shared[which];
        let first_ty = subst.apply(&first.ty);
        let second_ty = subst.apply(&second.ty);
        let payload = Payload::ConflictingVariable {
            variable: name.clone(),
            first_type: self.render(&first_ty),
            second_type: self.render(&second_ty),
        };
        let highlights = vec![
            self.m.node(forcing(self.m, children[first.child], binder)).span,
            self.m.node(forcing(self.m, children[second.child], binder)).span,
        ];
        let probe = self.whole_probe(id);
        (Diagnosis::new(payload, highlights), Some(probe))
    }
}

fn rename_apart(t: &Typing, split: &HashSet<&BinderId>, copy: u32) -> Typing {
    let ren = |ds: &[Demand]| {
        ds.iter()
            .map(|d| {
                let mut d = d.clone();
                if split.contains(&d.id) {
                    d.id.copy = copy;
                }
                d
            })
            .collect()
    };
    Typing {
        env: ren(&t.env),
        ty: t.ty.clone(),
        carried: ren(&t.carried),
    }
}

/// For each variable in order, first unify the copies of all the other
/// variables as far as possible, then this variable's copies; the first
/// variable whose own copies then clash is the culprit. If every variable
/// passes that test, fall back to unifying everything in order.
fn find_conflict(copies: &[Vec<Copy>]) -> Option<(usize, Copy, Copy, Subst)> {
    for (x, own) in copies.iter().enumerate() {
        let mut s = Subst::new();
        for (y, other) in copies.iter().enumerate() {
            if y != x {
                unify_all(&mut s, other);
            }
        }
        if let Some((a, b)) = unify_all(&mut s, own) {
            return Some((x, a, b, s));
        }
    }
    let mut s = Subst::new();
    for (x, own) in copies.iter().enumerate() {
        if let Some((a, b)) = unify_all(&mut s, own) {
            return Some((x, a, b, s));
        }
    }
    None
}

/// Unify every copy with the first one, skipping failures; returns the
/// first clashing pair.
fn unify_all(s: &mut Subst, copies: &[Copy]) -> Option<(Copy, Copy)> {
    let (head, rest) = copies.split_first()?;
    let mut clash = None;
    for c in rest {
        if s.try_unify(&head.ty, &c.ty).is_err() && clash.is_none() {
            clash = Some((head.clone(), c.clone()));
        }
    }
    clash
}

/// The node inside `from` where the variable first gets a concrete type:
/// descend into the leftmost child that already forces it.
fn forcing(m: &Mgtt, from: NodeId, binder: &BinderId) -> NodeId {
    let forces = |n: NodeId| {
        m.node(n)
            .typing()
            .and_then(|t| t.lookup(binder))
            .is_some_and(|t| !t.is_var())
    };
    let mut cur = from;
    while let Some(next) = m.node(cur).children.iter().copied().find(|&c| forces(c)) {
        cur = next;
    }
    cur
}
