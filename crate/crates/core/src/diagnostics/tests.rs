use super::*;
use crate::apd::{debug, Answer, Outcome as ApdOutcome, ReplayOracle};
use crate::mgtt::TopScope;
use crate::parser::parse_program;
use crate::typeinf::infer_item;

struct Run {
    src: String,
    diagnosis: Diagnosis,
    probe: Option<Probe>,
    decls: Decls,
    supply: VarSupply,
}

impl Run {
    fn highlighted(&self) -> Vec<&str> {
        self.diagnosis
            .highlights
            .iter()
            .map(|s| s.text(&self.src))
            .collect()
    }
}

fn run_at(src: &str, level: u8, answers: &[Answer]) -> Run {
    let level = LanguageLevel::new(level).unwrap();
    let p = parse_program(src, level).unwrap();
    let decls = Decls::new(p.decls.clone()).unwrap();
    let mut supply = VarSupply::new();
    let mut top = TopScope::builtins();
    let mut m = Mgtt::new();
    let mut failing = None;
    for (i, item) in p.items.iter().enumerate() {
        let root = m.add_item(item, top.clone(), &decls, &mut supply);
        match infer_item(&top.env, item, &decls, &mut supply) {
            Ok(it) => {
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
    let root = failing.expect("program is ill-typed");
    let mut oracle = ReplayOracle::new(answers.to_vec());
    let ApdOutcome::Done { verdict, .. } = debug(&m, root, &mut oracle).unwrap() else {
        panic!("ran out of answers")
    };
    let (diagnosis, probe) = diagnose_with_probe(&m, &verdict, &decls, level, &mut supply);
    Run {
        src: src.to_string(),
        diagnosis,
        probe,
        decls,
        supply,
    }
}

fn run(src: &str, answers: &[Answer]) -> Run {
    run_at(src, 4, answers)
}

fn yes(n: usize) -> Vec<Answer> {
    vec![Answer::Intended; n]
}

fn assert_justified(r: &mut Run) {
    let p = r.probe.as_ref().expect("a probe");
    assert!(p.fails(&r.decls, &mut r.supply), "probe unexpectedly succeeds");
}

#[test]
fn application_names_the_first_bad_argument() {
    let mut r = run("let f = fun x -> (x + 1) ^ x", &yes(3));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::AppArgConflict);
    assert_eq!(
        r.diagnosis.message,
        "The first argument of this application causes a type error.\n\
         The types of the function, its arguments, and the required type for the first \
         argument are:\n\
         Function (^): string -> string -> string\n\
         First argument: int\n\
         Second argument: 'a\n\
         Required for the first argument: string"
    );
    assert_eq!(r.highlighted(), vec!["(x + 1) ^ x"]);
    assert_justified(&mut r);
}

#[test]
fn predicate_of_wrong_type() {
    let mut r = run(
        "let kekka_kyori = 10.5\nlet f c = if kekka_kyori then c else 0",
        &yes(3),
    );
    assert_eq!(
        r.diagnosis.message,
        "The type of predicate statement is float, but it should be bool."
    );
    assert_eq!(r.highlighted(), vec!["kekka_kyori"]);
    assert_justified(&mut r);
}

#[test]
fn then_without_else_must_be_unit() {
    let mut r = run("let f a c = if (a + 1) < c then a + 1", &yes(2));
    assert_eq!(
        r.diagnosis.message,
        "The type of then statement is int but it should be unit."
    );
    assert_eq!(r.highlighted(), vec!["a + 1"]);
    assert_justified(&mut r);
}

#[test]
fn branches_must_agree() {
    let mut r = run(
        "let f a c = if (a + 1) < c then a + 1 else print_int c",
        &yes(3),
    );
    assert_eq!(
        r.diagnosis.message,
        "The type of then statement is int and else statement is unit, but these should be \
         the same type."
    );
    assert_eq!(
        r.highlighted(),
        vec!["if (a + 1) < c then a + 1 else print_int c"]
    );
    assert_justified(&mut r);
}

#[test]
fn conflicting_variable_in_conditional() {
    let mut r = run("let f = fun p -> fun q -> if p && (q = 1) then p else q", &yes(1));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::ConflictingVariable);
    assert_eq!(
        r.diagnosis.message,
        "The variable p is used at two different types: bool and int."
    );
    assert_eq!(r.highlighted(), vec!["p && (q = 1)", "p"]);
    assert_justified(&mut r);
}

#[test]
fn lambda_bound_function_used_twice() {
    let r = run("let g f = (f 1, f \"a\")", &yes(2));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::ConflictingVariable);
    assert_eq!(
        r.diagnosis.message,
        "The variable f is used at two different types: int -> 'a and string -> 'b."
    );
    assert_eq!(r.highlighted(), vec!["f 1", "f \"a\""]);
}

#[test]
fn recursive_call_with_missing_argument() {
    let mut r = run("let rec gcd m n = if n = 0 then m else gcd n", &yes(1));
    assert_eq!(
        r.diagnosis.message,
        "While this expression has 'a -> int -> 'a, you tried to use it as type int -> 'a \
         for recursive call."
    );
    assert_eq!(r.highlighted(), vec!["m n = if n = 0 then m else gcd n"]);
    assert_justified(&mut r);
}

#[test]
fn match_branch_conflict() {
    let src = "let f l t = match l with [] -> [] | x :: r -> (match t with 0 -> 1 | _ -> x)";
    let mut r = run(src, &yes(2));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::MatchBranchMismatch);
    assert_eq!(
        r.diagnosis.message,
        "The highlighted expression has type int and the previous expression has type \
         'a list, but these should be the same type."
    );
    assert_eq!(r.highlighted(), vec!["(match t with 0 -> 1 | _ -> x)"]);
    assert_justified(&mut r);
}

#[test]
fn match_pattern_against_scrutinee() {
    let mut r = run("let v = match 1 with true -> 0", &yes(2));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::MatchPatternVsScrutinee);
    assert_eq!(r.highlighted(), vec!["true"]);
    assert_justified(&mut r);
}

#[test]
fn match_pattern_against_earlier_patterns() {
    let mut r = run("let v x = match x with 0 -> 0 | \"a\" -> 1", &yes(2));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::MatchPatternVsPattern);
    assert_eq!(
        r.diagnosis.message,
        "The highlighted pattern has type string and the previous patterns have type int, \
         but these should be the same type."
    );
    assert_eq!(r.highlighted(), vec!["\"a\""]);
    assert_justified(&mut r);
}

#[test]
fn non_function_in_function_position() {
    for (src, ty) in [
        ("let l = [2; 1; 4 5]", "int"),
        ("let s = \"hello\" \"world\"", "string"),
    ] {
        let mut r = run(src, &yes(2));
        assert_eq!(r.diagnosis.kind(), DiagnosisKind::AppNonFunction, "{src}");
        assert!(r
            .diagnosis
            .message
            .starts_with("This expression is parsed as an application but a function is missing."));
        assert!(r.diagnosis.message.contains(&format!("has type {ty},")));
        assert_justified(&mut r);
    }
}

#[test]
fn self_application_reports_only_type_variables() {
    let src = "type tree_t = Empty | Node of tree_t * string * int * tree_t\n\
               let rec search tree name = match tree with\n\
               Empty -> 0\n\
               | Node (t1, st, n, t2) -> if st = name then n else search search t2 name";
    let mut r = run(src, &[]);
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::AllTypeVariables);
    assert_eq!(
        r.diagnosis.message,
        "The first argument of this application causes a type error.\n\
         The types of the function, its arguments, and the required type for the first \
         argument are:\n\
         Function: 'a\n\
         First argument: 'b\n\
         Second argument: 'c\n\
         Third argument: 'd\n\
         Required for the first argument: 'e"
    );
    assert_eq!(r.highlighted(), vec!["search search t2 name"]);
    assert_justified(&mut r);
}

#[test]
fn level_one_points_at_function_typed_arguments() {
    let src = "let f l x = x :: l\nlet g l = 1 :: l\nlet test lst = f (g lst) = [1; 2; 3]";
    let r = run_at(src, 1, &yes(3));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::AppPartialLevel1);
    assert_eq!(
        r.diagnosis.message,
        "The second argument of this application causes a type error.\n\
         Function (=): 'a -> 'a -> bool\n\
         First argument: int -> int list\n\
         Second argument: int list\n\
         The following arguments have the function type.\n\
         First argument: int -> int list\n\
         (some argument might be missing.)"
    );
    let r4 = run_at(src, 4, &yes(3));
    assert_eq!(r4.diagnosis.kind(), DiagnosisKind::AppArgConflict);
}

#[test]
fn constructor_arity() {
    let src = "type tree_t = Empty | Node of tree_t * char * int * tree_t\n\
               let mk left n right = Node (left, n, right)";
    let mut r = run(src, &yes(4));
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::ConstructorMismatch);
    assert_eq!(
        r.diagnosis.message,
        "The constructor Node expects 4 arguments, but it is applied to 3 arguments here.\n\
         Declared argument types: tree_t * char * int * tree_t\n\
         Given argument types: 'a * 'b * 'c"
    );
    assert_eq!(
        r.highlighted(),
        vec![
            "Node (left, n, right)",
            "type tree_t = Empty | Node of tree_t * char * int * tree_t"
        ]
    );
    assert_justified(&mut r);
}

#[test]
fn constructor_argument_type() {
    let src = "type tree_t = Empty | Node of tree_t * char * int * tree_t\n\
               let t = Node (Empty, 'a', \"x\", Empty)";
    let mut r = run(src, &yes(5));
    assert_eq!(
        r.diagnosis.message,
        "The third argument of the constructor Node has type string but it should be int.\n\
         Declared argument types: tree_t * char * int * tree_t"
    );
    assert_justified(&mut r);
}

#[test]
fn unintended_tuple_shows_its_type() {
    let r = run(
        "let price flag = if flag then 1, 2 else 3.5",
        &[Answer::UnintendedType, Answer::Intended, Answer::Intended],
    );
    assert_eq!(r.diagnosis.kind(), DiagnosisKind::WellTypedUnintendedInfo);
    assert_eq!(r.diagnosis.message, "This expression has type int * int.");
    assert_eq!(r.highlighted(), vec!["1, 2"]);
}

#[test]
fn rejected_constructor_points_at_its_declaration() {
    let src = "type t = A of int | B\nlet f = A (1, 2)";
    let r = run(src, &[Answer::UnintendedType]);
    assert_eq!(
        r.diagnosis.message,
        "This expression has type int -> t.\nThe constructor A is declared here."
    );
    assert_eq!(r.highlighted(), vec!["A", "type t = A of int | B"]);
}

#[test]
fn rejected_binding_is_traced_to_where_it_is_forced() {
    let r = run(
        "let f = fun x -> (x + 1) ^ x",
        &[Answer::UnintendedBinding("x".into())],
    );
    assert_eq!(
        r.diagnosis.message,
        "The type of x is first forced to int here."
    );
    assert_eq!(r.highlighted(), vec!["(x + 1)"]);
}

#[test]
fn serialized_form_carries_code_kind_and_payload() {
    let r = run("let rec gcd m n = if n = 0 then m else gcd n", &yes(1));
    let v = serde_json::to_value(&r.diagnosis).unwrap();
    assert_eq!(v["code"], 11);
    assert_eq!(v["kind"], "RecursiveUseMismatch");
    assert_eq!(v["payload"]["use_type"], "int -> 'a");
    let back: Diagnosis = serde_json::from_value(v).unwrap();
    assert_eq!(back, r.diagnosis);
}

#[test]
fn missing_else_diagnosis() {
    let src = "let f x = if x then 1";
    let err = parse_program(src, LanguageLevel::BEGINNER).unwrap_err();
    let d = Diagnosis::missing_else(err.span);
    assert_eq!(d.message, "The else statement is missing.");
    assert_eq!(d.code, 4);
}
