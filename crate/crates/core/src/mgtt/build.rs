use std::collections::HashMap;

use super::{
    BinderId, Binding, ComposeError, Composer, IllTyped, Leaf, Mgtt, Node, NodeId, NodeRef, Origin,
    Scope, Status, TopScope, Typing,
};
use crate::lang::{Decls, Expr, ExprKind, Ty, UnifyError, VarSupply};
use crate::typeinf::{self, Inferencer, TypeError, TypeErrorKind};

pub(super) fn build_item(
    m: &mut Mgtt,
    item: usize,
    decls: &Decls,
    supply: &mut VarSupply,
) -> NodeId {
    let e = m.items[item].clone();
    let top = m.tops[item].clone();
    let mut b = Builder {
        m,
        item,
        decls,
        supply,
        top: &top,
    };
    b.node(&e, vec![], Scope::empty(), None)
}

struct Builder<'a> {
    m: &'a mut Mgtt,
    item: usize,
    decls: &'a Decls,
    supply: &'a mut VarSupply,
    top: &'a TopScope,
}

fn binder_at(ident: &crate::lang::Ident) -> BinderId {
    BinderId::at(ident.span.start_byte)
}

fn rule_error(e: TypeError) -> IllTyped {
    let err = match e.kind {
        TypeErrorKind::Mismatch { expected, found }
        | TypeErrorKind::Circular { expected, found } => UnifyError::Mismatch(expected, found),
        _ => UnifyError::Mismatch(Ty::Unit, Ty::Unit),
    };
    IllTyped::Compose(ComposeError::Rule(err))
}

impl Builder<'_> {
    fn node(&mut self, e: &Expr, path: Vec<usize>, scope: Scope, parent: Option<NodeId>) -> NodeId {
        let id = self.m.push(Node {
            id: self.m.nodes.len(),
            node_ref: NodeRef {
                item: self.item,
                path: path.clone(),
            },
            span: e.span,
            parent,
            children: vec![],
            status: Status::IllTyped(IllTyped::Child),
            scope: scope.clone(),
            leaf: None,
            origin: None,
        });

        if let ExprKind::Var(x) = &e.kind {
            let (typing, leaf, origin) = self.variable(x, &scope);
            let n = &mut self.m.nodes[id];
            n.status = Status::WellTyped(typing);
            n.leaf = Some(leaf);
            n.origin = origin;
            return id;
        }

        let kids = e.children();
        let mut child_ids: Vec<NodeId> = Vec::with_capacity(kids.len());
        for (i, k) in kids.iter().enumerate() {
            let child_scope = self.child_scope(e, k, &scope, &kids, &child_ids);
            let mut p = path.clone();
            p.push(i);
            let cid = self.node(k, p, child_scope, Some(id));
            child_ids.push(cid);
        }
        self.m.nodes[id].children = child_ids.clone();

        let status = if child_ids.iter().any(|&c| self.m.nodes[c].is_ill_typed()) {
            Status::IllTyped(IllTyped::Child)
        } else {
            let typings: HashMap<*const Expr, Typing> = kids
                .iter()
                .zip(&child_ids)
                .map(|(k, &c)| (*k as *const Expr, self.m.nodes[c].typing().unwrap().clone()))
                .collect();
            match self.compose(e, &kids, &typings) {
                Ok(t) => Status::WellTyped(t),
                Err(why) => Status::IllTyped(why),
            }
        };
        self.m.nodes[id].status = status;
        id
    }

    fn variable(&mut self, x: &str, scope: &Scope) -> (Typing, Leaf, Option<Origin>) {
        match scope.lookup(x) {
            Some(Binding::Mono { id, definition }) => {
                let a = self.supply.fresh();
                let typing = Typing {
                    env: vec![super::Demand {
                        id: id.clone(),
                        name: x.to_string(),
                        ty: a.clone(),
                    }],
                    ty: a,
                    carried: vec![],
                };
                (
                    typing,
                    Leaf::Demanded(id.clone()),
                    definition.map(Origin::Local),
                )
            }
            Some(Binding::Poly { definition, typing }) => {
                let typing = match typing {
                    None => Typing::leaf(self.supply.fresh()),
                    Some(t) => {
                        let copy = t.freshen(self.supply);
                        let mut carried = copy.env;
                        carried.extend(copy.carried);
                        let shared = carried
                            .iter()
                            .any(|d| d.ty.vars().iter().any(|v| copy.ty.occurs(*v)));
                        Typing {
                            env: vec![],
                            ty: copy.ty,
                            carried: if shared { carried } else { vec![] },
                        }
                    }
                };
                (typing, Leaf::PolyLocal, Some(Origin::Local(*definition)))
            }
            None => match self.top.env.get(x) {
                Some(s) => {
                    let ty = s.instantiate(self.supply);
                    match self.top.defined_by.get(x) {
                        Some(&item) => (
                            Typing::leaf(ty),
                            Leaf::TopLevel(item),
                            Some(Origin::TopLevel(item)),
                        ),
                        None => (Typing::leaf(ty), Leaf::Builtin, None),
                    }
                }
                None => {
                    let a = self.supply.fresh();
                    let id = BinderId::free(x);
                    let typing = Typing {
                        env: vec![super::Demand {
                            id: id.clone(),
                            name: x.to_string(),
                            ty: a.clone(),
                        }],
                        ty: a,
                        carried: vec![],
                    };
                    (typing, Leaf::Demanded(id), None)
                }
            },
        }
    }

    /// Scope in which child `k` of `e` is built. Earlier siblings are
    /// already built, so a `let` body can see its bound's typing.
    fn child_scope(
        &mut self,
        e: &Expr,
        k: &Expr,
        scope: &Scope,
        kids: &[&Expr],
        built: &[NodeId],
    ) -> Scope {
        let built_id = |target: &Expr| -> Option<NodeId> {
            kids.iter()
                .position(|c| std::ptr::eq(*c, target))
                .and_then(|i| built.get(i).copied())
        };
        match &e.kind {
            ExprKind::Fun(x, body) if std::ptr::eq(k, &**body) => scope.push(
                &x.name,
                Binding::Mono {
                    id: binder_at(x),
                    definition: None,
                },
            ),
            ExprKind::Let {
                name,
                bound,
                body: Some(body),
            } if std::ptr::eq(k, &**body) => {
                let bid = built_id(bound).expect("bound precedes body");
                if bound.is_syntactic_value() {
                    let typing = self.m.nodes[bid].typing().cloned();
                    scope.push(
                        &name.name,
                        Binding::Poly {
                            definition: bid,
                            typing,
                        },
                    )
                } else {
                    scope.push(
                        &name.name,
                        Binding::Mono {
                            id: binder_at(name),
                            definition: Some(bid),
                        },
                    )
                }
            }
            ExprKind::LetRec { name, bound, body } => {
                if std::ptr::eq(k, &**bound) {
                    // The bound is the next node to be allocated.
                    let next = self.m.nodes.len();
                    scope.push(
                        &name.name,
                        Binding::Mono {
                            id: binder_at(name),
                            definition: Some(next),
                        },
                    )
                } else if body.as_deref().is_some_and(|b| std::ptr::eq(k, b)) {
                    let bid = built_id(bound).expect("bound precedes body");
                    if bound.is_syntactic_value() {
                        let typing = self.m.nodes[bid]
                            .typing()
                            .and_then(|t| close_recursion(t, &binder_at(name)));
                        scope.push(
                            &name.name,
                            Binding::Poly {
                                definition: bid,
                                typing,
                            },
                        )
                    } else {
                        scope.push(
                            &name.name,
                            Binding::Mono {
                                id: binder_at(name),
                                definition: Some(bid),
                            },
                        )
                    }
                } else {
                    scope.clone()
                }
            }
            ExprKind::Match { arms, .. } => match arms.iter().find(|a| std::ptr::eq(k, &a.body)) {
                Some(arm) => arm
                    .pattern
                    .bound_vars()
                    .into_iter()
                    .fold(scope.clone(), |s, x| {
                        s.push(
                            &x.name,
                            Binding::Mono {
                                id: binder_at(x),
                                definition: None,
                            },
                        )
                    }),
                None => scope.clone(),
            },
            ExprKind::For { var, body, .. } if std::ptr::eq(k, &**body) => scope.push(
                &var.name,
                Binding::Mono {
                    id: binder_at(var),
                    definition: None,
                },
            ),
            _ => scope.clone(),
        }
    }

    fn compose(
        &mut self,
        e: &Expr,
        kids: &[&Expr],
        typings: &HashMap<*const Expr, Typing>,
    ) -> Result<Typing, IllTyped> {
        compose_node(e, kids, typings, self.decls, self.supply)
    }
}

/// Apply the typing rule of `e` to the given typings of its children.
pub(super) fn compose_node(
    e: &Expr,
    kids: &[&Expr],
    typings: &HashMap<*const Expr, Typing>,
    decls: &Decls,
    supply: &mut VarSupply,
) -> Result<Typing, IllTyped> {
    use ExprKind::*;
    let mut c = Composer::new();
    let mut tys: HashMap<*const Expr, Ty> = HashMap::new();
    for k in kids {
        let t = c
            .absorb(&typings[&(*k as *const Expr)])
            .map_err(IllTyped::Compose)?;
        tys.insert(*k as *const Expr, t);
    }
    let ty = |x: &Expr| tys[&(x as *const Expr)].clone();
    let r = IllTyped::Compose;
    let result = match &e.kind {
        Var(_) => unreachable!("variables are leaves"),
        Int(_) => Ty::Int,
        Float(_) => Ty::Float,
        Str(_) => Ty::Str,
        Char(_) => Ty::Char,
        Bool(_) => Ty::Bool,
        Unit => Ty::Unit,
        ConstrName(name) => match decls.constructor(name) {
            Some(info) => info.as_function_type(),
            None => supply.fresh(),
        },
        Constructor { head, args } => {
            let ExprKind::ConstrName(name) = &head.kind else {
                unreachable!("constructor head is a name")
            };
            let Some(info) = decls.constructor(name) else {
                return Ok(Typing::leaf(supply.fresh()));
            };
            let result = Ty::Named(info.type_name.to_string());
            let want = crate::typeinf::constructor_parameters(info.args, args.len());
            if !args.is_empty() && want.len() != args.len() {
                return Err(IllTyped::ConstructorArity {
                    expected: want.len(),
                    found: args.len(),
                });
            }
            if args.is_empty() && !want.is_empty() {
                return Err(IllTyped::ConstructorArity {
                    expected: want.len(),
                    found: 0,
                });
            }
            for (w, a) in want.iter().zip(args) {
                c.unify(w, &ty(a)).map_err(r)?;
            }
            result
        }
        Tuple(es) => Ty::Tuple(es.iter().map(ty).collect()),
        List(es) => {
            let elem = supply.fresh();
            for x in es {
                c.unify(&elem, &ty(x)).map_err(r)?;
            }
            Ty::list(elem)
        }
        Cons(h, t) => {
            c.unify(&Ty::list(ty(h)), &ty(t)).map_err(r)?;
            ty(t)
        }
        Fun(x, body) => {
            let a = c.take(&binder_at(x)).unwrap_or_else(|| supply.fresh());
            Ty::arrow(a, ty(body))
        }
        App { func, args, .. } => {
            let mut tf = ty(func);
            for a in args {
                let res = supply.fresh();
                c.unify(&tf, &Ty::arrow(ty(a), res.clone())).map_err(r)?;
                tf = res;
            }
            tf
        }
        If {
            cond,
            then_branch,
            else_branch,
        } => {
            c.unify(&Ty::Bool, &ty(cond)).map_err(r)?;
            match else_branch {
                Some(el) => c.unify(&ty(then_branch), &ty(el)).map_err(r)?,
                None => c.unify(&Ty::Unit, &ty(then_branch)).map_err(r)?,
            }
            ty(then_branch)
        }
        Match { scrutinee, arms } => {
            let ts = ty(scrutinee);
            let result = supply.fresh();
            for arm in arms {
                let (tp, binds) = {
                    let mut inf = Inferencer::new(decls, supply);
                    typeinf::infer_pattern(&mut inf, &arm.pattern).map_err(rule_error)?
                };
                c.unify(&ts, &tp).map_err(r)?;
                for (x, bt) in &binds {
                    if let Some(t) = c.take(&binder_at(x)) {
                        c.unify(&t, bt).map_err(r)?;
                    }
                }
                c.unify(&result, &ty(&arm.body)).map_err(r)?;
            }
            result
        }
        Let { name, bound, body } => match body {
            None => ty(bound),
            Some(body) => {
                if !bound.is_syntactic_value() {
                    if let Some(t) = c.take(&binder_at(name)) {
                        c.unify(&t, &ty(bound)).map_err(r)?;
                    }
                }
                ty(body)
            }
        },
        LetRec { name, bound, body } => {
            if let Some(use_ty) = c.take(&binder_at(name)) {
                let def_ty = ty(bound);
                if c.subst.try_unify(&use_ty, &def_ty).is_err() {
                    return Err(IllTyped::RecursiveUse {
                        def_ty: c.subst.apply(&def_ty),
                        use_ty: c.subst.apply(&use_ty),
                    });
                }
            }
            match body {
                None => ty(bound),
                Some(b) => ty(b),
            }
        }
        Record(fields) => {
            let (record, decl_fields) =
                typeinf::record_for_literal(decls, fields, e.span).map_err(rule_error)?;
            for (f, v) in fields {
                if let Some((_, want)) = decl_fields.iter().find(|(n, _)| *n == f.name) {
                    c.unify(want, &ty(v)).map_err(r)?;
                }
            }
            Ty::Named(record)
        }
        Field(rec, f) => match decls.field(&f.name) {
            Some(info) => {
                let (rt, ft) = (Ty::Named(info.record.to_string()), info.ty.clone());
                c.unify(&rt, &ty(rec)).map_err(r)?;
                ft
            }
            None => supply.fresh(),
        },
        Annot(inner, t) => {
            c.unify(t, &ty(inner)).map_err(r)?;
            ty(inner)
        }
        Seq(_, b) => ty(b),
        Assign(rf, v) => {
            c.unify(&Ty::Ref(Box::new(ty(v))), &ty(rf)).map_err(r)?;
            Ty::Unit
        }
        Deref(rf) => {
            let a = supply.fresh();
            c.unify(&Ty::Ref(Box::new(a.clone())), &ty(rf)).map_err(r)?;
            a
        }
        While(cond, _) => {
            c.unify(&Ty::Bool, &ty(cond)).map_err(r)?;
            Ty::Unit
        }
        For {
            var, start, end, ..
        } => {
            c.unify(&Ty::Int, &ty(start)).map_err(r)?;
            c.unify(&Ty::Int, &ty(end)).map_err(r)?;
            if let Some(t) = c.take(&binder_at(var)) {
                c.unify(&Ty::Int, &t).map_err(r)?;
            }
            Ty::Unit
        }
    };
    c.finish(result).map_err(IllTyped::Compose)
}

/// Typing of a recursive definition once its self-references are tied to
/// its own type; `None` if they cannot be.
pub(super) fn close_recursion(t: &Typing, self_id: &BinderId) -> Option<Typing> {
    let mut c = Composer::new();
    let ty = c.absorb(t).ok()?;
    if let Some(use_ty) = c.take(self_id) {
        c.unify(&use_ty, &ty).ok()?;
    }
    c.finish(ty).ok()
}

/// Re-run the typing rule of node `id` on substitute child typings, given
/// in child order.
pub(super) fn recompose(
    m: &Mgtt,
    id: NodeId,
    typings: &[Typing],
    decls: &Decls,
    supply: &mut VarSupply,
) -> Result<Typing, IllTyped> {
    let e = m.expr(id);
    let kids = e.children();
    let map: HashMap<*const Expr, Typing> = kids
        .iter()
        .zip(typings)
        .map(|(k, t)| (*k as *const Expr, t.clone()))
        .collect();
    compose_node(e, &kids, &map, decls, supply)
}
