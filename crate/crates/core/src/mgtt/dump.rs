use std::fmt::Write as _;

use super::{IllTyped, Mgtt, NodeId, Status};
use crate::lang::Namer;

/// Indented text rendering of the whole forest, one node per line.
pub fn dump(m: &Mgtt, source: &str) -> String {
    let mut out = String::new();
    for &root in &m.roots {
        write_node(m, source, root, 0, &mut out);
    }
    out
}

fn write_node(m: &Mgtt, source: &str, id: NodeId, depth: usize, out: &mut String) {
    let n = m.node(id);
    let text: String = n
        .span
        .text(source)
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let text = if text.chars().count() > 48 {
        format!("{}...", text.chars().take(45).collect::<String>())
    } else {
        text
    };
    let status = match &n.status {
        Status::WellTyped(t) => t.render(&mut Namer::new()).to_string(),
        Status::IllTyped(IllTyped::Child) => "ill-typed".to_string(),
        Status::IllTyped(IllTyped::RecursiveUse { .. }) => {
            "ILL-TYPED (recursive use)".to_string()
        }
        Status::IllTyped(IllTyped::ConstructorArity { .. }) => {
            "ILL-TYPED (constructor arity)".to_string()
        }
        Status::IllTyped(IllTyped::Compose(_)) => "ILL-TYPED".to_string(),
    };
    let _ = writeln!(
        out,
        "{:indent$}[{}] {}:{} {}  ::  {}",
        "",
        id,
        n.span.start_line,
        n.span.start_col,
        text,
        status,
        indent = depth * 2
    );
    for &c in &n.children {
        write_node(m, source, c, depth + 1, out);
    }
}
