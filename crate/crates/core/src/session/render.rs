//! Plain-text rendering of highlights, questions, and diagnoses for the
//! human-facing CLI.

use std::fmt::Write;

use super::QuestionView;
use crate::diagnostics::Diagnosis;
use crate::lang::Span;

/// Source lines covered by `span`, each followed by a row of carets under
/// the highlighted characters.
pub fn excerpt(source: &str, span: &Span) -> String {
    let lines: Vec<&str> = source.split('\n').collect();
    let last = if span.end_line > span.start_line && span.end_col == 1 {
        span.end_line - 1
    } else {
        span.end_line.max(span.start_line)
    };
    let width = last.to_string().len();
    let mut out = String::new();
    for line_no in span.start_line..=last {
        let Some(text) = lines.get(line_no.saturating_sub(1)) else {
            break;
        };
        let text = text.trim_end_matches('\r');
        let len = text.chars().count();
        let from = if line_no == span.start_line { span.start_col } else { 1 };
        let to = if line_no == span.end_line && line_no == last {
            span.end_col
        } else {
            len + 1
        };
        let _ = writeln!(out, "{line_no:>width$} | {text}");
        let marks = to.saturating_sub(from).max(1);
        let pad: String = text
            .chars()
            .take(from.saturating_sub(1))
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        let _ = writeln!(out, "{:width$} | {pad}{}", "", "^".repeat(marks));
    }
    out
}

pub fn render_question(source: &str, q: &QuestionView) -> String {
    format!("{}{}", excerpt(source, &q.span), q.text)
}

/// Highlights in order, then the message. This is the form compared
/// byte for byte by golden and replay tests.
pub fn render_diagnosis(source: &str, d: &Diagnosis) -> String {
    let mut out = String::new();
    for h in &d.highlights {
        out.push_str(&excerpt(source, h));
    }
    out.push_str(&d.message);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(start_byte: usize, end_byte: usize, src: &str) -> Span {
        let idx = crate::lang::LineIndex::new(src);
        idx.span(start_byte, end_byte)
    }

    #[test]
    fn single_line_carets() {
        let src = "let x = 1\nlet y = x + true\n";
        let at = src.find("true").unwrap();
        let s = span(at, at + 4, src);
        assert_eq!(excerpt(src, &s), "2 | let y = x + true\n  |             ^^^^\n");
    }

    #[test]
    fn multi_line_spans_mark_every_line() {
        let src = "if a\nthen b\nelse c";
        let s = span(0, src.len(), src);
        assert_eq!(
            excerpt(src, &s),
            "1 | if a\n  | ^^^^\n2 | then b\n  | ^^^^^^\n3 | else c\n  | ^^^^^^\n"
        );
    }

    #[test]
    fn empty_spans_get_one_caret() {
        let src = "if a then b";
        let s = span(11, 11, src);
        assert_eq!(excerpt(src, &s), "1 | if a then b\n  |            ^\n");
    }
}
