use std::collections::HashMap;

use thiserror::Error;

use super::ty::{Ty, TyVar};

/// An idempotent substitution: no mapped variable occurs in any image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Subst {
    map: HashMap<TyVar, Ty>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnifyError {
    #[error("type mismatch between {0} and {1}")]
    Mismatch(Ty, Ty),
    #[error("occurs check: {0:?} occurs in {1}")]
    Occurs(TyVar, Ty),
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, v: TyVar) -> Option<&Ty> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TyVar, &Ty)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Ty) -> Ty {
        if self.map.is_empty() {
            return t.clone();
        }
        t.rename(&self.map)
    }

    /// Bind `v` to `t` (already applied), keeping the map idempotent.
    fn bind(&mut self, v: TyVar, t: Ty) -> Result<(), UnifyError> {
        if t == Ty::Var(v) {
            return Ok(());
        }
        if t.occurs(v) {
            return Err(UnifyError::Occurs(v, t));
        }
        let single: HashMap<TyVar, Ty> = [(v, t.clone())].into_iter().collect();
        for image in self.map.values_mut() {
            if image.occurs(v) {
                *image = image.rename(&single);
            }
        }
        self.map.insert(v, t);
        Ok(())
    }

    /// Extend in place so that `a` and `b` become equal. On failure the
    /// substitution may hold a partial extension; callers that need to
    /// retry clone first.
    pub fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), UnifyError> {
        let a = self.apply(a);
        let b = self.apply(b);
        self.unify_applied(&a, &b)
    }

    fn unify_applied(&mut self, a: &Ty, b: &Ty) -> Result<(), UnifyError> {
        match (a, b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => self.bind(*x, t.clone()),
            (Ty::Arrow(a1, r1), Ty::Arrow(a2, r2)) => {
                self.unify(a1, a2)?;
                self.unify(r1, r2)
            }
            (Ty::Tuple(xs), Ty::Tuple(ys)) if xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Ty::List(x), Ty::List(y)) | (Ty::Ref(x), Ty::Ref(y)) => self.unify(x, y),
            (Ty::Named(x), Ty::Named(y)) if x == y => Ok(()),
            (x, y) if x == y && is_base(x) => Ok(()),
            (x, y) => Err(UnifyError::Mismatch(x.clone(), y.clone())),
        }
    }

    /// Unify with rollback: on failure `self` is left unchanged.
    pub fn try_unify(&mut self, a: &Ty, b: &Ty) -> Result<(), UnifyError> {
        let mut next = self.clone();
        next.unify(a, b)?;
        *self = next;
        Ok(())
    }
}

fn is_base(t: &Ty) -> bool {
    matches!(
        t,
        Ty::Int | Ty::Float | Ty::Bool | Ty::Str | Ty::Char | Ty::Unit
    )
}

/// Functional entry point: extend `s` so that `s(t1) == s(t2)`.
pub fn unify(t1: &Ty, t2: &Ty, s: &Subst) -> Result<Subst, UnifyError> {
    let mut next = s.clone();
    next.unify(t1, t2)?;
    Ok(next)
}

/// One-way matching: a substitution over the variables of `general` that
/// maps it to `specific`, if one exists.
pub fn match_instance(general: &[Ty], specific: &[Ty]) -> Option<HashMap<TyVar, Ty>> {
    fn go(g: &Ty, s: &Ty, m: &mut HashMap<TyVar, Ty>) -> bool {
        match (g, s) {
            (Ty::Var(v), t) => match m.get(v) {
                Some(bound) => bound == t,
                None => {
                    m.insert(*v, t.clone());
                    true
                }
            },
            (Ty::Arrow(a1, r1), Ty::Arrow(a2, r2)) => go(a1, a2, m) && go(r1, r2, m),
            (Ty::Tuple(xs), Ty::Tuple(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, m))
            }
            (Ty::List(x), Ty::List(y)) | (Ty::Ref(x), Ty::Ref(y)) => go(x, y, m),
            (x, y) => x == y,
        }
    }
    if general.len() != specific.len() {
        return None;
    }
    let mut m = HashMap::new();
    general
        .iter()
        .zip(specific)
        .all(|(g, s)| go(g, s, &mut m))
        .then_some(m)
}
