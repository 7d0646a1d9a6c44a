//! The feature table for language levels.

use typedebug::parser::{parse_program, LanguageLevel};

/// One row per gated feature: a program using it and the first level that
/// accepts it.
pub const TABLE: &[(&str, &str, u8)] = &[
    ("if without else", "let f x = if x then print_int 1", 3),
    ("unit literal", "let u = ()", 3),
    ("sequencing", "let f x = print_int x; x", 3),
    ("reference creation", "let r = ref 0", 3),
    ("dereference", "let f r = !r + 1", 3),
    ("assignment", "let f r = r := 1", 3),
    ("while loop", "let f b = while b do print_int 1 done", 3),
    ("for loop", "let f n = for i = 1 to n do print_int i done", 3),
    ("physical equality", "let f a b = a == b", 4),
    ("physical inequality", "let f a b = a != b", 4),
    ("word disjunction", "let f a b = a or b", 4),
    ("single ampersand", "let f a b = a & b", 4),
    ("structural equality", "let f a b = a = b", 1),
    ("boolean operators", "let f a b = a && b || not a", 1),
    ("higher-order functions", "let twice f x = f (f x)", 1),
    ("lists and matching", "let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t", 1),
    ("partial application", "let add x y = x + y\nlet inc = add 1", 1),
];

/// Cells of the table where acceptance disagrees with the level.
pub fn table_mismatches() -> Vec<String> {
    let mut out = Vec::new();
    for &(feature, src, first) in TABLE {
        for level in LanguageLevel::all() {
            let accepted = parse_program(src, level).is_ok();
            if accepted != (level.get() >= first) {
                out.push(format!("{feature} at level {level}: accepted = {accepted}"));
            }
        }
    }
    out
}

/// A program accepted at one level is accepted with the same tree at every
/// higher level.
pub fn monotone(src: &str) -> Result<(), String> {
    let parses: Vec<_> = LanguageLevel::all().map(|l| parse_program(src, l)).collect();
    for w in parses.windows(2) {
        if let Ok(lower) = &w[0] {
            match &w[1] {
                Ok(higher) if higher == lower => {}
                Ok(_) => return Err(format!("{src}: tree changes between levels")),
                Err(e) => return Err(format!("{src}: accepted, then rejected ({e})")),
            }
        }
    }
    Ok(())
}

