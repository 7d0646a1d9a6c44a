use crate::lang::{Ty, TyScheme, TyVar};

fn a() -> Ty {
    Ty::Var(TyVar(0))
}

fn b() -> Ty {
    Ty::Var(TyVar(1))
}

fn f2(x: Ty, y: Ty, r: Ty) -> Ty {
    Ty::curried([x, y], r)
}

/// Every predefined name with its closed type scheme.
pub fn builtin_schemes() -> Vec<(&'static str, TyScheme)> {
    let int_op = f2(Ty::Int, Ty::Int, Ty::Int);
    let float_op = f2(Ty::Float, Ty::Float, Ty::Float);
    let bool_op = f2(Ty::Bool, Ty::Bool, Ty::Bool);
    let cmp = f2(a(), a(), Ty::Bool);
    let mut out: Vec<(&'static str, Ty)> = Vec::new();
    for op in ["+", "-", "*", "/", "mod"] {
        out.push((op, int_op.clone()));
    }
    for op in ["+.", "-.", "*.", "/."] {
        out.push((op, float_op.clone()));
    }
    for op in ["=", "<>", "<", ">", "<=", ">=", "==", "!="] {
        out.push((op, cmp.clone()));
    }
    for op in ["&&", "||", "&", "or"] {
        out.push((op, bool_op.clone()));
    }
    out.extend([
        ("~-", Ty::arrow(Ty::Int, Ty::Int)),
        ("~-.", Ty::arrow(Ty::Float, Ty::Float)),
        ("^", f2(Ty::Str, Ty::Str, Ty::Str)),
        (
            "@",
            f2(Ty::list(a()), Ty::list(a()), Ty::list(a())),
        ),
        ("not", Ty::arrow(Ty::Bool, Ty::Bool)),
        ("fst", Ty::arrow(Ty::Tuple(vec![a(), b()]), a())),
        ("snd", Ty::arrow(Ty::Tuple(vec![a(), b()]), b())),
        ("print_int", Ty::arrow(Ty::Int, Ty::Unit)),
        ("print_string", Ty::arrow(Ty::Str, Ty::Unit)),
        ("print_float", Ty::arrow(Ty::Float, Ty::Unit)),
        ("print_newline", Ty::arrow(Ty::Unit, Ty::Unit)),
        ("string_of_int", Ty::arrow(Ty::Int, Ty::Str)),
        ("int_of_string", Ty::arrow(Ty::Str, Ty::Int)),
        ("string_of_float", Ty::arrow(Ty::Float, Ty::Str)),
        ("float_of_int", Ty::arrow(Ty::Int, Ty::Float)),
        ("int_of_float", Ty::arrow(Ty::Float, Ty::Int)),
        ("sqrt", Ty::arrow(Ty::Float, Ty::Float)),
        ("infinity", Ty::Float),
        ("failwith", Ty::arrow(Ty::Str, a())),
        ("ignore", Ty::arrow(a(), Ty::Unit)),
        ("ref", Ty::arrow(a(), Ty::Ref(Box::new(a())))),
        ("max", f2(a(), a(), a())),
        ("min", f2(a(), a(), a())),
        ("abs", Ty::arrow(Ty::Int, Ty::Int)),
    ]);
    out.into_iter()
        .map(|(n, t)| (n, TyScheme::closed(t)))
        .collect()
}

pub fn is_builtin(name: &str) -> bool {
    builtin_schemes().iter().any(|(n, _)| *n == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::render_type;

    #[test]
    fn schemes_are_closed() {
        for (name, s) in builtin_schemes() {
            assert!(s.ftv().is_empty(), "{name}");
        }
    }

    #[test]
    fn concat_type_renders_as_expected() {
        let s = builtin_schemes()
            .into_iter()
            .find(|(n, _)| *n == "^")
            .unwrap()
            .1;
        assert_eq!(render_type(&s.body), "string -> string -> string");
    }
}
