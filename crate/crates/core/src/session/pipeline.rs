use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::lang::{Decls, Namer, Program, VarSupply};
use crate::mgtt::{Mgtt, NodeId, TopScope};
use crate::parser::{parse_program, LanguageLevel};
use crate::typeinf::{builtin_schemes, check_scopes, infer_item};

/// The inferred type of one accepted top-level item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopType {
    /// `None` for a bare expression.
    pub name: Option<String>,
    pub ty: String,
}

impl TopType {
    /// The toplevel's `val x : t` line.
    pub fn line(&self) -> String {
        match &self.name {
            Some(n) => format!("val {n} : {}", self.ty),
            None => format!("- : {}", self.ty),
        }
    }
}

/// A parsed and type-checked program, with type trees built for every item
/// up to and including the first ill-typed one.
#[derive(Debug)]
pub struct Analysis {
    pub program: Program,
    pub decls: Decls,
    pub mgtt: Mgtt,
    pub supply: VarSupply,
    /// Types of the items accepted before the first failure.
    pub types: Vec<TopType>,
    /// Tree root of the first ill-typed item.
    pub failing: Option<NodeId>,
}

pub fn analyze(source: &str, level: LanguageLevel) -> Result<Analysis, SessionError> {
    let program = parse_program(source, level).map_err(SessionError::Parse)?;
    let decls = Decls::new(program.decls.clone()).map_err(SessionError::Declarations)?;
    let builtins = builtin_schemes();
    check_scopes(&program, &decls, builtins.iter().map(|(n, _)| *n))
        .map_err(SessionError::Unbound)?;

    let mut supply = VarSupply::new();
    let mut top = TopScope::builtins();
    let mut mgtt = Mgtt::new();
    let mut types = Vec::new();
    let mut failing = None;
    for (i, item) in program.items.iter().enumerate() {
        let root = mgtt.add_item(item, top.clone(), &decls, &mut supply);
        match infer_item(&top.env, item, &decls, &mut supply) {
            Ok(it) => {
                types.push(TopType {
                    name: it.name.clone(),
                    ty: Namer::new().render(&it.scheme.body),
                });
                if let Some(name) = it.name {
                    top.env.insert(name.clone(), it.scheme);
                    top.defined_by.insert(name, i);
                }
            }
            Err(_) => {
                failing = Some(root);
                break;
            }
        }
    }
    Ok(Analysis {
        program,
        decls,
        mgtt,
        supply,
        types,
        failing,
    })
}
