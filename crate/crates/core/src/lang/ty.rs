use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// A unification variable. Ids come from the session's [`VarSupply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyVar(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Var(TyVar),
    Int,
    Float,
    Bool,
    Str,
    Char,
    Unit,
    Arrow(Box<Ty>, Box<Ty>),
    Tuple(Vec<Ty>),
    List(Box<Ty>),
    /// A declared variant or record type.
    Named(String),
    Ref(Box<Ty>),
}

/// A type with universally quantified variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TyScheme {
    pub quantified: Vec<TyVar>,
    pub body: Ty,
}

/// Fresh variable allocation. One supply per session so every module draws
/// from the same counter.
#[derive(Debug, Clone, Default)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_var(&mut self) -> TyVar {
        let v = TyVar(self.next);
        self.next += 1;
        v
    }

    pub fn fresh(&mut self) -> Ty {
        Ty::Var(self.fresh_var())
    }
}

impl Ty {
    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    pub fn list(t: Ty) -> Ty {
        Ty::List(Box::new(t))
    }

    /// `a1 -> a2 -> ... -> ret`
    pub fn curried(params: impl IntoIterator<Item = Ty>, ret: Ty) -> Ty {
        let params: Vec<Ty> = params.into_iter().collect();
        params
            .into_iter()
            .rev()
            .fold(ret, |acc, p| Ty::arrow(p, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Ty::Var(_))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Ty::Arrow(..))
    }

    /// Free variables in left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<TyVar> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn ftv(&self) -> BTreeSet<TyVar> {
        self.vars().into_iter().collect()
    }

    fn collect_vars(&self, out: &mut Vec<TyVar>) {
        match self {
            Ty::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Ty::Arrow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Ty::Tuple(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Ty::List(t) | Ty::Ref(t) => t.collect_vars(out),
            _ => {}
        }
    }

    pub fn occurs(&self, v: TyVar) -> bool {
        match self {
            Ty::Var(w) => *w == v,
            Ty::Arrow(a, b) => a.occurs(v) || b.occurs(v),
            Ty::Tuple(ts) => ts.iter().any(|t| t.occurs(v)),
            Ty::List(t) | Ty::Ref(t) => t.occurs(v),
            _ => false,
        }
    }

    /// Replace variables according to `map`, leaving the rest untouched.
    pub fn rename(&self, map: &HashMap<TyVar, Ty>) -> Ty {
        match self {
            Ty::Var(v) => map.get(v).cloned().unwrap_or(Ty::Var(*v)),
            Ty::Arrow(a, b) => Ty::arrow(a.rename(map), b.rename(map)),
            Ty::Tuple(ts) => Ty::Tuple(ts.iter().map(|t| t.rename(map)).collect()),
            Ty::List(t) => Ty::List(Box::new(t.rename(map))),
            Ty::Ref(t) => Ty::Ref(Box::new(t.rename(map))),
            other => other.clone(),
        }
    }

    /// Parameter types and final result of a curried arrow.
    pub fn uncurry(&self) -> (Vec<&Ty>, &Ty) {
        let mut params = Vec::new();
        let mut t = self;
        while let Ty::Arrow(a, b) = t {
            params.push(&**a);
            t = b;
        }
        (params, t)
    }

    /// Fresh copy of the type with every variable renamed.
    pub fn freshen(&self, supply: &mut VarSupply) -> Ty {
        let map: HashMap<TyVar, Ty> = self
            .vars()
            .into_iter()
            .map(|v| (v, supply.fresh()))
            .collect();
        self.rename(&map)
    }
}

impl TyScheme {
    pub fn mono(t: Ty) -> Self {
        TyScheme {
            quantified: vec![],
            body: t,
        }
    }

    /// Quantify all variables of `t`.
    pub fn closed(t: Ty) -> Self {
        TyScheme {
            quantified: t.vars(),
            body: t,
        }
    }

    pub fn instantiate(&self, supply: &mut VarSupply) -> Ty {
        if self.quantified.is_empty() {
            return self.body.clone();
        }
        let map: HashMap<TyVar, Ty> = self
            .quantified
            .iter()
            .map(|v| (*v, supply.fresh()))
            .collect();
        self.body.rename(&map)
    }

    pub fn ftv(&self) -> BTreeSet<TyVar> {
        let mut s = self.body.ftv();
        for v in &self.quantified {
            s.remove(v);
        }
        s
    }
}

/// Assigns display names `'a`, `'b`, ... to variables in order of first
/// appearance. Share one namer across types that are shown together.
#[derive(Debug, Default, Clone)]
pub struct Namer {
    names: HashMap<TyVar, String>,
}

impl Namer {
    pub fn new() -> Self {
        Self::default()
    }

    fn name(&mut self, v: TyVar) -> String {
        let n = self.names.len();
        self.names
            .entry(v)
            .or_insert_with(|| {
                let letter = (b'a' + (n % 26) as u8) as char;
                if n < 26 {
                    format!("'{letter}")
                } else {
                    format!("'{letter}{}", n / 26)
                }
            })
            .clone()
    }

    pub fn render(&mut self, t: &Ty) -> String {
        let mut s = String::new();
        self.write(t, Prec::Arrow, &mut s);
        s
    }

    fn write(&mut self, t: &Ty, ctx: Prec, s: &mut String) {
        match t {
            Ty::Var(v) => s.push_str(&self.name(*v)),
            Ty::Int => s.push_str("int"),
            Ty::Float => s.push_str("float"),
            Ty::Bool => s.push_str("bool"),
            Ty::Str => s.push_str("string"),
            Ty::Char => s.push_str("char"),
            Ty::Unit => s.push_str("unit"),
            Ty::Named(n) => s.push_str(n),
            Ty::Arrow(a, b) => {
                let paren = ctx > Prec::Arrow;
                if paren {
                    s.push('(');
                }
                self.write(a, Prec::Tuple, s);
                s.push_str(" -> ");
                self.write(b, Prec::Arrow, s);
                if paren {
                    s.push(')');
                }
            }
            Ty::Tuple(ts) => {
                let paren = ctx > Prec::Tuple;
                if paren {
                    s.push('(');
                }
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        s.push_str(" * ");
                    }
                    self.write(t, Prec::Postfix, s);
                }
                if paren {
                    s.push(')');
                }
            }
            Ty::List(t) => {
                self.write(t, Prec::Postfix, s);
                s.push_str(" list");
            }
            Ty::Ref(t) => {
                self.write(t, Prec::Postfix, s);
                s.push_str(" ref");
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Arrow,
    Tuple,
    Postfix,
}

/// Render a single type with its own variable naming.
pub fn render_type(t: &Ty) -> String {
    Namer::new().render(t)
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_type(self))
    }
}

/// Canonical form up to variable renaming: variables are renumbered from 0
/// in order of first appearance across `tys`.
pub fn canonicalize<'a>(tys: impl IntoIterator<Item = &'a Ty>) -> Vec<Ty> {
    let tys: Vec<&Ty> = tys.into_iter().collect();
    let mut map = HashMap::new();
    for t in &tys {
        for v in t.vars() {
            let n = map.len() as u32;
            map.entry(v).or_insert(Ty::Var(TyVar(n)));
        }
    }
    tys.iter().map(|t| t.rename(&map)).collect()
}

pub fn alpha_eq(a: &Ty, b: &Ty) -> bool {
    canonicalize([a]) == canonicalize([b])
}
