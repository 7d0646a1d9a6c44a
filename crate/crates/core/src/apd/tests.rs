use super::*;
use crate::lang::{Decls, VarSupply};
use crate::mgtt::TopScope;
use crate::parser::{parse_program, LanguageLevel};
use crate::typeinf::infer_item;

/// Build the forest for a program whose last item is ill-typed.
fn forest(src: &str) -> (Mgtt, NodeId) {
    let p = parse_program(src, LanguageLevel::FULL).unwrap();
    let decls = Decls::new(p.decls.clone()).unwrap();
    let mut supply = VarSupply::new();
    let mut top = TopScope::builtins();
    let mut m = Mgtt::new();
    let mut last = 0;
    for (i, item) in p.items.iter().enumerate() {
        last = m.add_item(item, top.clone(), &decls, &mut supply);
        if let Ok(it) = infer_item(&top.env, item, &decls, &mut supply) {
            if let Some(name) = it.name {
                top.env.insert(name.clone(), it.scheme);
                top.defined_by.insert(name, i);
            }
        }
    }
    (m, last)
}

fn text<'s>(m: &Mgtt, src: &'s str, id: NodeId) -> &'s str {
    m.node(id).span.text(src)
}

#[test]
fn tuple_in_branch_is_blamed_after_its_parts_are_confirmed() {
    let src = "let price flag = if flag then 1, 2 else 3.5";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![
        Answer::UnintendedType,
        Answer::Intended,
        Answer::Intended,
    ]);
    let Outcome::Done {
        verdict,
        transcript,
    } = debug(&m, root, &mut oracle).unwrap()
    else {
        panic!("pending")
    };
    let asked: Vec<&str> = transcript.iter().map(|(q, _)| q.span.text(src)).collect();
    assert_eq!(asked, vec!["1, 2", "1", "2"]);
    assert_eq!(transcript[0].0.rendered.ty, "int * int");
    assert!(matches!(verdict, Verdict::WellTypedUnintended(_)));
    assert_eq!(text(&m, src, verdict.node()), "1, 2");
}

#[test]
fn all_intended_children_blame_the_ill_typed_node() {
    let src = "let f x = (x + 1) ^ \"a\"";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![Answer::Intended; 3]);
    let Outcome::Done {
        verdict,
        transcript,
    } = debug(&m, root, &mut oracle).unwrap()
    else {
        panic!("pending")
    };
    let asked: Vec<&str> = transcript.iter().map(|(q, _)| q.span.text(src)).collect();
    assert_eq!(asked, vec!["(x + 1)", "^", "\"a\""]);
    assert!(matches!(verdict, Verdict::IllTypedSource(_)));
    assert_eq!(text(&m, src, verdict.node()), "(x + 1) ^ \"a\"");
}

#[test]
fn pending_when_answers_run_out() {
    let src = "let price flag = if flag then 1, 2 else 3.5";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![Answer::UnintendedType]);
    match debug(&m, root, &mut oracle).unwrap() {
        Outcome::Pending {
            question,
            transcript,
        } => {
            assert_eq!(transcript.len(), 1);
            assert_eq!(question.seq, 1);
            assert_eq!(question.span.text(src), "1");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unintended_top_level_reference_jumps_to_its_definition() {
    let src = "let double x = x ^ x\nlet y = double 2 + 1";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![
        Answer::UnintendedType, // double : string -> string
        Answer::Intended,       // x ^ x
    ]);
    let outcome = debug(&m, root, &mut oracle).unwrap();
    let Outcome::Done {
        verdict,
        transcript,
    } = outcome
    else {
        panic!("pending")
    };
    let asked: Vec<&str> = transcript.iter().map(|(q, _)| q.span.text(src)).collect();
    assert_eq!(asked, vec!["double", "x ^ x"]);
    assert!(matches!(verdict, Verdict::WellTypedUnintended(_)));
    assert_eq!(text(&m, src, verdict.node()), "x = x ^ x");
}

#[test]
fn unintended_binding_finds_where_it_is_forced() {
    let src = "let f p q = p && (q = 1) && (p = 1)";
    let (m, root) = forest(src);
    let mut answers = vec![];
    // Answer every question with "p is wrong" once p appears.
    let mut oracle = |_: &Mgtt, q: &Question| {
        let a = if q.typing.lookup_name("p").is_some() {
            Answer::UnintendedBinding("p".into())
        } else {
            Answer::Intended
        };
        answers.push(a.clone());
        Some(a)
    };
    let Outcome::Done { verdict, .. } = debug(&m, root, &mut oracle).unwrap() else {
        panic!("pending")
    };
    let Verdict::ForcedBinding { node, name } = verdict else {
        panic!("{verdict:?}")
    };
    assert_eq!(name, "p");
    let t = m.node(node).typing().unwrap();
    assert!(!t.lookup_name("p").unwrap().ty.is_var());
}

#[test]
fn unknown_binding_is_rejected() {
    let src = "let price flag = if flag then 1, 2 else 3.5";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![Answer::UnintendedBinding("zzz".into())]);
    assert_eq!(
        debug(&m, root, &mut oracle),
        Err(ApdError::UnknownBinding("zzz".into()))
    );
}

#[test]
fn well_typed_root_is_an_error() {
    let (m, root) = forest("let x = 1");
    let mut oracle = ReplayOracle::default();
    assert_eq!(debug(&m, root, &mut oracle), Err(ApdError::WellTyped));
}

#[test]
fn rejected_constructor_is_blamed_itself() {
    let src = "type t = A of int | B\nlet f = A (1, 2)";
    let (m, root) = forest(src);
    let mut oracle = ReplayOracle::new(vec![Answer::UnintendedType]);
    let Outcome::Done { verdict, .. } = debug(&m, root, &mut oracle).unwrap() else {
        panic!("pending")
    };
    assert!(matches!(verdict, Verdict::WellTypedUnintended(_)));
    assert_eq!(text(&m, src, verdict.node()), "A");
}
