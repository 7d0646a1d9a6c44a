//! Seeded random programs for the property suites.
//!
//! `typed_term` builds closed, well-typed expressions by choosing a target
//! type first and then a production that yields it. `mutated_term`
//! replays the same choices but swaps one base literal for a literal of a
//! different type. `surface_program` builds syntax only, mixing in the
//! constructs that are gated by language level.

#![allow(dead_code)]

pub mod checks;
pub mod levels;
pub mod replay;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum GTy {
    Int,
    Bool,
    Str,
    List(Box<GTy>),
    Arrow(Box<GTy>, Box<GTy>),
    Pair(Box<GTy>, Box<GTy>),
}

impl GTy {
    fn arrow(a: GTy, b: GTy) -> GTy {
        GTy::Arrow(Box::new(a), Box::new(b))
    }
}

#[derive(Clone)]
struct Var {
    name: String,
    ty: Option<GTy>,
}

pub const MAX_DEPTH: u32 = 6;

struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
    sites: usize,
    flip_at: Option<usize>,
}

impl Gen {
    fn new(seed: u64, flip_at: Option<usize>) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
            sites: 0,
            flip_at,
        }
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn ty(&mut self, size: u32) -> GTy {
        let pick = if size == 0 {
            self.rng.gen_range(0..3)
        } else {
            self.rng.gen_range(0..6)
        };
        match pick {
            0 => GTy::Int,
            1 => GTy::Bool,
            2 => GTy::Str,
            3 => GTy::List(Box::new(self.ty(size - 1))),
            4 => GTy::arrow(self.ty(size - 1), self.ty(size - 1)),
            _ => GTy::Pair(Box::new(self.ty(size - 1)), Box::new(self.ty(size - 1))),
        }
    }

    /// A base literal, or at the chosen site one of another type.
    fn literal(&mut self, t: &GTy) -> String {
        let site = self.sites;
        self.sites += 1;
        let n: u32 = self.rng.gen_range(0..10);
        let b: bool = self.rng.gen();
        if self.flip_at == Some(site) {
            return match t {
                GTy::Int => "\"oops\"".into(),
                GTy::Bool => n.to_string(),
                _ => b.to_string(),
            };
        }
        match t {
            GTy::Int => n.to_string(),
            GTy::Bool => b.to_string(),
            _ => format!("\"s{n}\""),
        }
    }

    fn leaf(&mut self, t: &GTy, env: &[Var]) -> String {
        let vars: Vec<&Var> = env.iter().filter(|v| v.ty.as_ref() == Some(t)).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.5) {
            return vars.choose(&mut self.rng).unwrap().name.clone();
        }
        match t {
            GTy::Int | GTy::Bool | GTy::Str => self.literal(t),
            GTy::List(_) => "[]".into(),
            GTy::Pair(a, b) => format!("({}, {})", self.leaf(a, env), self.leaf(b, env)),
            GTy::Arrow(a, b) => {
                let x = self.name("x");
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: x.clone(),
                    ty: Some((**a).clone()),
                });
                format!("(fun {x} -> {})", self.leaf(b, &inner))
            }
        }
    }

    fn expr(&mut self, t: &GTy, env: &[Var], depth: u32) -> String {
        if depth <= 1 {
            return self.leaf(t, env);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0 | 1 => self.leaf(t, env),
            2 => {
                let c = self.expr(&GTy::Bool, env, d);
                let a = self.expr(t, env, d);
                let b = self.expr(t, env, d);
                format!("(if {c} then {a} else {b})")
            }
            3 => {
                let s = self.ty(1);
                let x = self.name("v");
                let bound = self.expr(&s, env, d);
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: x.clone(),
                    ty: Some(s),
                });
                let body = self.expr(t, &inner, d);
                format!("(let {x} = {bound} in {body})")
            }
            4 => {
                let s = self.ty(1);
                let f = self.expr(&GTy::arrow(s.clone(), t.clone()), env, d);
                let a = self.expr(&s, env, d);
                format!("({f} {a})")
            }
            5 => {
                let s = self.ty(1);
                let (h, tl) = (self.name("h"), self.name("t"));
                let scrutinee = self.expr(&GTy::List(Box::new(s.clone())), env, d);
                let empty = self.expr(t, env, d);
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: h.clone(),
                    ty: Some(s.clone()),
                });
                inner.push(Var {
                    name: tl.clone(),
                    ty: Some(GTy::List(Box::new(s))),
                });
                let cons = self.expr(t, &inner, d);
                format!("(match {scrutinee} with [] -> {empty} | {h} :: {tl} -> {cons})")
            }
            6 => {
                let id = self.name("id");
                let y = self.name("y");
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: id.clone(),
                    ty: None,
                });
                let body = self.expr(t, &inner, d);
                format!("(let {id} = fun {y} -> {y} in {body})")
            }
            7 => {
                let f = self.name("f");
                let n = self.name("n");
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: n.clone(),
                    ty: Some(GTy::Int),
                });
                let base = self.expr(t, &inner, d);
                let arg = self.expr(&GTy::Int, env, d);
                format!(
                    "(let rec {f} {n} = if {n} <= 0 then {base} else {f} ({n} - 1) in {f} {arg})"
                )
            }
            _ => self.shaped(t, env, d),
        }
    }

    /// Productions determined by the target type.
    fn shaped(&mut self, t: &GTy, env: &[Var], d: u32) -> String {
        let polys: Vec<String> = env
            .iter()
            .filter(|v| v.ty.is_none())
            .map(|v| v.name.clone())
            .collect();
        if !polys.is_empty() && self.rng.gen_bool(0.3) {
            let id = polys.choose(&mut self.rng).unwrap().clone();
            return format!("({id} {})", self.expr(t, env, d));
        }
        match t {
            GTy::Int => {
                let op = *["+", "-", "*"].choose(&mut self.rng).unwrap();
                let a = self.expr(&GTy::Int, env, d);
                let b = self.expr(&GTy::Int, env, d);
                format!("({a} {op} {b})")
            }
            GTy::Bool => match self.rng.gen_range(0..3) {
                0 => {
                    let a = self.expr(&GTy::Int, env, d);
                    let b = self.expr(&GTy::Int, env, d);
                    format!("({a} < {b})")
                }
                1 => {
                    let a = self.expr(&GTy::Bool, env, d);
                    let b = self.expr(&GTy::Bool, env, d);
                    format!("({a} && {b})")
                }
                _ => {
                    let s = self.ty(1);
                    let a = self.expr(&s, env, d);
                    let b = self.expr(&s, env, d);
                    format!("({a} = {b})")
                }
            },
            GTy::Str => {
                if self.rng.gen_bool(0.3) {
                    format!("(string_of_int {})", self.expr(&GTy::Int, env, d))
                } else {
                    let a = self.expr(&GTy::Str, env, d);
                    let b = self.expr(&GTy::Str, env, d);
                    format!("({a} ^ {b})")
                }
            }
            GTy::List(e) => {
                if self.rng.gen_bool(0.5) {
                    let h = self.expr(e, env, d);
                    let rest = self.expr(t, env, d);
                    format!("({h} :: {rest})")
                } else {
                    let a = self.expr(e, env, d);
                    let b = self.expr(e, env, d);
                    format!("[{a}; {b}]")
                }
            }
            GTy::Pair(a, b) => {
                let x = self.expr(a, env, d);
                let y = self.expr(b, env, d);
                format!("({x}, {y})")
            }
            GTy::Arrow(a, b) => {
                let x = self.name("x");
                let mut inner = env.to_vec();
                inner.push(Var {
                    name: x.clone(),
                    ty: Some((**a).clone()),
                });
                format!("(fun {x} -> {})", self.expr(b, &inner, d))
            }
        }
    }
}

/// A closed, well-typed term, and the number of literal sites in it.
pub fn typed_term_with_sites(seed: u64) -> (String, usize) {
    let mut g = Gen::new(seed, None);
    let t = g.ty(2);
    let src = g.expr(&t, &[], MAX_DEPTH);
    (src, g.sites)
}

pub fn typed_term(seed: u64) -> String {
    typed_term_with_sites(seed).0
}

/// The term of `typed_term(seed)` with literal site `site` replaced by a
/// literal of another type. The result may still be well-typed when the
/// literal sat under a polymorphic context.
pub fn mutated_term(seed: u64, site: usize) -> String {
    let mut g = Gen::new(seed, Some(site));
    let t = g.ty(2);
    g.expr(&t, &[], MAX_DEPTH)
}

/// Candidate ill-typed terms: every seed yields at most one, chosen by a
/// second generator so the site does not correlate with the term.
pub fn ill_typed_candidates(seed: u64) -> impl Iterator<Item = String> {
    let mut pick = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (seed..).filter_map(move |s| {
        let (_, sites) = typed_term_with_sites(s);
        (sites > 0).then(|| mutated_term(s, pick.gen_range(0..sites)))
    })
}

/// Random surface syntax, often ill-typed and sometimes malformed,
/// including constructs gated by language level.
pub fn surface_program(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = surface(&mut rng, 4);
    if rng.gen_bool(0.1) {
        s.push_str(" +");
    }
    s
}

fn surface(rng: &mut ChaCha8Rng, depth: u32) -> String {
    let atoms = ["1", "x", "y", "true", "\"a\"", "[]", "r"];
    if depth == 0 {
        return atoms.choose(rng).unwrap().to_string();
    }
    let gated = rng.gen_bool(0.08);
    let mut sub = || surface(rng, depth - 1);
    let (a, b, c) = (sub(), sub(), sub());
    if gated {
        return match rng.gen_range(0..11) {
            0 => format!("(if {a} then {b})"),
            1 => format!("({a}; {b})"),
            2 => format!("(r := {a})"),
            3 => "(!r)".to_string(),
            4 => format!("(ref {a})"),
            5 => "()".to_string(),
            6 => format!("(while {a} do {b} done)"),
            7 => format!("(for i = 1 to 3 do {a} done)"),
            8 => format!("({a} == {b})"),
            9 => format!("({a} != {b})"),
            _ => format!("({a} {} {b})", ["or", "&"][rng.gen_range(0..2)]),
        };
    }
    match rng.gen_range(0..11) {
        0 => format!("({a} + {b})"),
        1 => format!("(if {a} then {b} else {c})"),
        2 => format!("(fun x -> {a})"),
        3 => format!("(let x = {a} in {b})"),
        4 => format!("({a}, {b})"),
        5 => format!("[{a}; {b}]"),
        6 => format!("({a} {b})"),
        7 => format!("(match {a} with [] -> {b} | h :: t -> {c})"),
        8 => format!("({a} = {b})"),
        9 => format!("({a} <> {b})"),
        _ => format!("({a} && {b})"),
    }
}
