//! Property checks shared by the property suites and the acceptance run.

use std::collections::BTreeMap;

use typedebug::apd::{debug, Answer, Oracle, Outcome, Verdict};
use typedebug::lang::ty::{alpha_eq, canonicalize};
use typedebug::lang::{match_instance, Decls, ExprKind, Ty, TyScheme, VarSupply};
use typedebug::mgtt::{Leaf, Mgtt, NodeId, Origin, Site, TopScope, Typing};
use typedebug::parser::{parse_expression, LanguageLevel};
use typedebug::typeinf::{infer, TypeEnv};

fn build(src: &str) -> Result<(Mgtt, NodeId), String> {
    let e = parse_expression(src, LanguageLevel::FULL).map_err(|e| format!("{src}: {e}"))?;
    Ok(Mgtt::of_expr(&e, &Decls::default(), &mut VarSupply::new()))
}

/// Demands keyed by binder, with binders outside `range` seen as free, the
/// way they appear when the subexpression is built on its own.
fn keyed(t: &Typing, range: (usize, usize)) -> BTreeMap<Site, Ty> {
    t.env
        .iter()
        .map(|d| {
            let site = match &d.id.site {
                Site::At(o) if *o < range.0 || *o >= range.1 => Site::Free(d.name.clone()),
                s => s.clone(),
            };
            (site, d.ty.clone())
        })
        .collect()
}

/// Let-polymorphic definitions outside `id` that its subtree uses, as
/// top-level schemes quantified over every variable of the definition.
/// The flag is set when one of them has assumptions of its own: the tree
/// links those to the use site, a bare scheme cannot.
fn outside_definitions(m: &Mgtt, id: NodeId) -> (TopScope, bool) {
    let range = m.node(id).span;
    let mut top = TopScope::builtins();
    let mut linked = false;
    let mut stack = vec![id];
    while let Some(n) = stack.pop() {
        let node = m.node(n);
        if let (Some(Leaf::PolyLocal), Some(Origin::Local(def)), ExprKind::Var(name)) =
            (&node.leaf, node.origin, &m.expr(n).kind)
        {
            let d = m.node(def);
            let inside = d.span.start_byte >= range.start_byte && d.span.end_byte <= range.end_byte;
            if let (false, Some(t)) = (inside, d.typing()) {
                top.env.insert(name.clone(), TyScheme::closed(t.ty.clone()));
                linked |= !t.env.is_empty();
            }
        }
        stack.extend(node.children.iter().copied());
    }
    (top, linked)
}

/// The root typing of a closed well-typed term is its principal type with
/// no assumptions, and each node's typing is the typing of its
/// subexpression built alone. Let-polymorphic definitions from outside the
/// subexpression are supplied to the isolated build as schemes, the way
/// the tree instantiates them at each use. Where such a definition has
/// assumptions of its own, the tree typing must be an instance of the
/// isolated one.
pub fn principality(src: &str) -> Result<usize, String> {
    let e = parse_expression(src, LanguageLevel::FULL).map_err(|e| format!("{src}: {e}"))?;
    let (s, t) = infer(&TypeEnv::with_builtins(), &e, &Decls::default(), &mut VarSupply::new())
        .map_err(|e| format!("{src}: not well-typed: {e}"))?;
    let want = s.apply(&t);
    let (m, root) = build(src)?;
    let top = m
        .node(root)
        .typing()
        .ok_or_else(|| format!("{src}: root is ill-typed in the tree"))?;
    if !alpha_eq(&top.ty, &want) {
        return Err(format!("{src}: root {} but inference gives {}", top.ty, want));
    }
    if !top.env.is_empty() {
        return Err(format!("{src}: closed term with demands"));
    }

    for id in 0..m.nodes.len() {
        let node = m.node(id);
        let range = (node.span.start_byte, node.span.end_byte);
        let text = node.span.text(src);
        let tree = node
            .typing()
            .ok_or_else(|| format!("{src}: node {text:?} ill-typed"))?;
        let (context, linked) = outside_definitions(&m, id);
        let mut alone = Mgtt::new();
        let alone_root = alone.add_item(
            m.expr(id),
            context,
            &Decls::default(),
            &mut VarSupply::new(),
        );
        let iso = alone
            .node(alone_root)
            .typing()
            .ok_or_else(|| format!("{src}: node {text:?} ill-typed alone"))?;
        let (tk, ik) = (keyed(tree, range), keyed(iso, range));
        if tk.keys().ne(ik.keys()) {
            return Err(format!(
                "{src}: node {text:?} assumes {:?} in the tree, {:?} alone",
                tk.keys().collect::<Vec<_>>(),
                ik.keys().collect::<Vec<_>>()
            ));
        }
        let a: Vec<&Ty> = std::iter::once(&tree.ty).chain(tk.values()).collect();
        let b: Vec<&Ty> = std::iter::once(&iso.ty).chain(ik.values()).collect();
        let same = if linked {
            let (a, b): (Vec<Ty>, Vec<Ty>) = (a.iter().map(|&t| t.clone()).collect(), b.iter().map(|&t| t.clone()).collect());
            match_instance(&b, &a).is_some()
        } else {
            canonicalize(a.iter().copied()) == canonicalize(b.iter().copied())
        };
        if !same {
            return Err(format!(
                "{src}: node {text:?} typed {a:?} in the tree but {b:?} alone"
            ));
        }
    }
    Ok(m.nodes.len())
}

/// Outcome of one soundness check, for terms that are ill-typed.
pub struct Soundness {
    pub questions: usize,
    pub nodes: usize,
}

/// `Ok(None)` when the term turned out to be well-typed.
pub fn apd_soundness(src: &str) -> Result<Option<Soundness>, String> {
    let (m, root) = build(src)?;
    if !m.node(root).is_ill_typed() {
        return Ok(None);
    }
    let frontier = m
        .ill_typed_frontier(root)
        .ok_or_else(|| format!("{src}: no frontier"))?;
    let f = m.node(frontier);
    if !f.is_ill_typed() || f.children.iter().any(|&c| m.node(c).is_ill_typed()) {
        return Err(format!("{src}: frontier {:?} is not minimal", f.span.text(src)));
    }
    let mut all_intended = |_: &Mgtt, _: &typedebug::apd::Question| Some(Answer::Intended);
    let outcome = debug(&m, root, &mut all_intended as &mut dyn Oracle)
        .map_err(|e| format!("{src}: {e}"))?;
    let Outcome::Done {
        verdict,
        transcript,
    } = outcome
    else {
        return Err(format!("{src}: debugging did not finish"));
    };
    if verdict != Verdict::IllTypedSource(frontier) {
        return Err(format!(
            "{src}: blamed {:?}, frontier is {:?}",
            m.node(verdict.node()).span.text(src),
            f.span.text(src)
        ));
    }
    if transcript.len() > m.nodes.len() {
        return Err(format!(
            "{src}: {} questions for {} nodes",
            transcript.len(),
            m.nodes.len()
        ));
    }
    Ok(Some(Soundness {
        questions: transcript.len(),
        nodes: m.nodes.len(),
    }))
}
