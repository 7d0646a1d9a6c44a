//! The Most General Type Tree: every subexpression annotated with its
//! principal typing, computed bottom-up from the typings of its children.
//!
//! A typing is either well-typed, carrying the assumptions the expression
//! demands of its free variables, or ill-typed. Only the leftmost failure
//! matters to the debugger, but every node gets a status.

mod build;
mod dump;
mod scope;
mod typing;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lang::{Decls, Expr, Span, Ty, VarSupply};
use crate::typeinf::TypeEnv;
pub use dump::dump;
pub use scope::{Binding, Scope};
pub use typing::{BinderId, ComposeError, Composer, Demand, RenderedTyping, Site, Typing};

pub type NodeId = usize;

/// Stable reference to a node across rebuilds: the top-level item and the
/// child-index path from that item's root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub item: usize,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    WellTyped(Typing),
    IllTyped(IllTyped),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IllTyped {
    /// Some child is ill-typed.
    Child,
    /// The node's own rule or the merge of its children's assumptions failed.
    Compose(ComposeError),
    /// A recursive definition is used at a type incompatible with its body.
    RecursiveUse { def_ty: Ty, use_ty: Ty },
    ConstructorArity { expected: usize, found: usize },
}

/// What kind of leaf a variable occurrence is.
#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    /// A lambda-, pattern-, loop-, or monomorphic let-bound variable.
    Demanded(BinderId),
    /// A use of a let-polymorphic local definition.
    PolyLocal,
    TopLevel(usize),
    Builtin,
}

/// Where the definition of a variable occurrence lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// The bound expression of a local `let`.
    Local(NodeId),
    /// A top-level item.
    TopLevel(usize),
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub node_ref: NodeRef,
    pub span: Span,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub status: Status,
    pub scope: Scope,
    pub leaf: Option<Leaf>,
    pub origin: Option<Origin>,
}

impl Node {
    pub fn typing(&self) -> Option<&Typing> {
        match &self.status {
            Status::WellTyped(t) => Some(t),
            Status::IllTyped(_) => None,
        }
    }

    pub fn is_ill_typed(&self) -> bool {
        matches!(self.status, Status::IllTyped(_))
    }

    /// Variable leaves whose typing says nothing beyond "some type".
    pub fn is_demanded_leaf(&self) -> bool {
        matches!(self.leaf, Some(Leaf::Demanded(_)))
    }
}

/// Top-level context an item is checked in: accepted earlier items and the
/// builtins, with the item index that defines each top-level name.
#[derive(Debug, Clone)]
pub struct TopScope {
    pub env: TypeEnv,
    pub defined_by: HashMap<String, usize>,
}

impl TopScope {
    pub fn builtins() -> Self {
        TopScope {
            env: TypeEnv::with_builtins(),
            defined_by: HashMap::new(),
        }
    }
}

/// A forest with one tree per top-level item.
#[derive(Debug, Clone)]
pub struct Mgtt {
    pub items: Vec<Expr>,
    pub roots: Vec<NodeId>,
    pub nodes: Vec<Node>,
    /// Top-level context each item was built in.
    pub tops: Vec<TopScope>,
    by_ref: HashMap<NodeRef, NodeId>,
}

impl Mgtt {
    pub fn new() -> Self {
        Mgtt {
            items: vec![],
            roots: vec![],
            nodes: vec![],
            tops: vec![],
            by_ref: HashMap::new(),
        }
    }

    /// Build the tree for one more item in the given top-level context.
    pub fn add_item(
        &mut self,
        item: &Expr,
        top: TopScope,
        decls: &Decls,
        supply: &mut VarSupply,
    ) -> NodeId {
        let index = self.items.len();
        self.items.push(item.clone());
        self.tops.push(top);
        let root = build::build_item(self, index, decls, supply);
        self.roots.push(root);
        root
    }

    /// Convenience: the tree of a single expression under the builtins.
    pub fn of_expr(e: &Expr, decls: &Decls, supply: &mut VarSupply) -> (Mgtt, NodeId) {
        let mut m = Mgtt::new();
        let root = m.add_item(e, TopScope::builtins(), decls, supply);
        (m, root)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn find(&self, r: &NodeRef) -> Option<NodeId> {
        self.by_ref.get(r).copied()
    }

    /// The expression a node stands for.
    pub fn expr(&self, id: NodeId) -> &Expr {
        let r = &self.nodes[id].node_ref;
        let mut e = &self.items[r.item];
        for &i in &r.path {
            e = e.children()[i];
        }
        e
    }

    pub fn root_of_item(&self, item: usize) -> NodeId {
        self.roots[item]
    }

    /// The node a definition jump lands on.
    pub fn definition(&self, origin: Origin) -> NodeId {
        match origin {
            Origin::Local(bound) => bound,
            Origin::TopLevel(item) => {
                let root = self.roots[item];
                // A top-level `let` item: jump to its bound expression.
                match self.nodes[root].children.first() {
                    Some(&b) if self.expr(root).binder().is_some() => b,
                    _ => root,
                }
            }
        }
    }

    /// Leftmost ill-typed node all of whose children are well-typed,
    /// starting from `from`.
    pub fn ill_typed_frontier(&self, from: NodeId) -> Option<NodeId> {
        if !self.nodes[from].is_ill_typed() {
            return None;
        }
        let mut cur = from;
        loop {
            let next = self.nodes[cur]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c].is_ill_typed());
            match next {
                Some(c) => cur = c,
                None => return Some(cur),
            }
        }
    }

    /// Apply the typing rule of node `id` to substitute child typings,
    /// given in child order.
    pub fn recompose(
        &self,
        id: NodeId,
        typings: &[Typing],
        decls: &Decls,
        supply: &mut VarSupply,
    ) -> Result<Typing, IllTyped> {
        build::recompose(self, id, typings, decls, supply)
    }

    pub(crate) fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len();
        self.by_ref.insert(node.node_ref.clone(), id);
        self.nodes.push(node);
        id
    }
}

impl Default for Mgtt {
    fn default() -> Self {
        Self::new()
    }
}
