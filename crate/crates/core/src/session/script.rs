//! Scripted answers: one per line, `y`, `n`, or `n:<variable>`.
//! Blank lines and lines starting with `#` are skipped.

use crate::apd::Answer;

pub fn parse_answer(line: &str) -> Result<Answer, String> {
    let line = line.trim();
    match line {
        "y" | "yes" => Ok(Answer::Intended),
        "n" | "no" => Ok(Answer::UnintendedType),
        _ => match line.split_once(':') {
            Some(("n" | "no", var)) if is_ident(var.trim()) => {
                Ok(Answer::UnintendedBinding(var.trim().to_string()))
            }
            _ => Err(format!("expected y, n, or n:<variable>, got {line:?}")),
        },
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn parse_script(text: &str) -> Result<Vec<Answer>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_answer(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

pub fn format_answer(a: &Answer) -> String {
    match a {
        Answer::Intended => "y".into(),
        Answer::UnintendedType => "n".into(),
        Answer::UnintendedBinding(x) => format!("n:{x}"),
    }
}

pub fn format_script(answers: &[Answer]) -> String {
    answers.iter().map(|a| format_answer(a) + "\n").collect()
}
