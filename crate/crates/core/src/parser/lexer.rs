use super::ParseErrorKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Int(i64),
    Float(f64),
    Str(String),
    Char(char),
    Lident(String),
    Uident(String),
    // keywords
    Let,
    Rec,
    In,
    Fun,
    If,
    Then,
    Else,
    Match,
    With,
    Type,
    Of,
    And,
    True,
    False,
    Begin,
    End,
    While,
    Do,
    Done,
    For,
    To,
    Downto,
    Mod,
    Or,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    SemiSemi,
    Comma,
    Arrow,
    Bar,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    BangEq,
    Plus,
    Minus,
    Star,
    Slash,
    PlusDot,
    MinusDot,
    StarDot,
    SlashDot,
    Caret,
    At,
    ColonColon,
    ColonEq,
    Bang,
    AmpAmp,
    Amp,
    BarBar,
    Dot,
    Colon,
    Underscore,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

impl Tok {
    /// Name of the operator variable a binary operator token stands for.
    pub fn operator_name(&self) -> Option<&'static str> {
        Some(match self {
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Mod => "mod",
            Tok::PlusDot => "+.",
            Tok::MinusDot => "-.",
            Tok::StarDot => "*.",
            Tok::SlashDot => "/.",
            Tok::Caret => "^",
            Tok::At => "@",
            Tok::Eq => "=",
            Tok::Ne => "<>",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::BangEq => "!=",
            Tok::AmpAmp => "&&",
            Tok::Amp => "&",
            Tok::BarBar => "||",
            Tok::Or => "or",
            _ => return None,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Float(f) => f.to_string(),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Char(c) => format!("'{c}'"),
            Tok::Lident(s) | Tok::Uident(s) => s.clone(),
            Tok::Eof => "end of input".to_string(),
            other => {
                if let Some(op) = other.operator_name() {
                    return op.to_string();
                }
                let s = match other {
                    Tok::Let => "let",
                    Tok::Rec => "rec",
                    Tok::In => "in",
                    Tok::Fun => "fun",
                    Tok::If => "if",
                    Tok::Then => "then",
                    Tok::Else => "else",
                    Tok::Match => "match",
                    Tok::With => "with",
                    Tok::Type => "type",
                    Tok::Of => "of",
                    Tok::And => "and",
                    Tok::True => "true",
                    Tok::False => "false",
                    Tok::Begin => "begin",
                    Tok::End => "end",
                    Tok::While => "while",
                    Tok::Do => "do",
                    Tok::Done => "done",
                    Tok::For => "for",
                    Tok::To => "to",
                    Tok::Downto => "downto",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Semi => ";",
                    Tok::SemiSemi => ";;",
                    Tok::Comma => ",",
                    Tok::Arrow => "->",
                    Tok::Bar => "|",
                    Tok::ColonColon => "::",
                    Tok::ColonEq => ":=",
                    Tok::Bang => "!",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::Underscore => "_",
                    _ => "?",
                };
                s.to_string()
            }
        }
    }
}

pub type LexError = (usize, usize, ParseErrorKind);

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == b'(' && bytes.get(i + 1) == Some(&b'*') {
            i = skip_comment(src, i)?;
            continue;
        }
        if c.is_ascii_digit() {
            let (tok, end) = lex_number(src, i)?;
            out.push(Token { tok, start, end });
            i = end;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i + 1;
            while j < bytes.len()
                && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
            {
                j += 1;
            }
            let word = &src[i..j];
            let tok = keyword(word).unwrap_or_else(|| {
                if word == "_" {
                    Tok::Underscore
                } else if c.is_ascii_uppercase() {
                    Tok::Uident(word.to_string())
                } else {
                    Tok::Lident(word.to_string())
                }
            });
            out.push(Token { tok, start, end: j });
            i = j;
            continue;
        }
        if c == b'"' {
            let (s, end) = lex_string(src, i)?;
            out.push(Token {
                tok: Tok::Str(s),
                start,
                end,
            });
            i = end;
            continue;
        }
        if c == b'\'' {
            let (ch, end) = lex_char(src, i)?;
            out.push(Token {
                tok: Tok::Char(ch),
                start,
                end,
            });
            i = end;
            continue;
        }
        let rest = &src[i..];
        let symbols: &[(&str, Tok)] = &[
            (";;", Tok::SemiSemi),
            ("->", Tok::Arrow),
            ("::", Tok::ColonColon),
            (":=", Tok::ColonEq),
            ("<>", Tok::Ne),
            ("<=", Tok::Le),
            (">=", Tok::Ge),
            ("==", Tok::EqEq),
            ("!=", Tok::BangEq),
            ("&&", Tok::AmpAmp),
            ("||", Tok::BarBar),
            ("+.", Tok::PlusDot),
            ("-.", Tok::MinusDot),
            ("*.", Tok::StarDot),
            ("/.", Tok::SlashDot),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("[", Tok::LBracket),
            ("]", Tok::RBracket),
            ("{", Tok::LBrace),
            ("}", Tok::RBrace),
            (";", Tok::Semi),
            (",", Tok::Comma),
            ("|", Tok::Bar),
            ("=", Tok::Eq),
            ("<", Tok::Lt),
            (">", Tok::Gt),
            ("+", Tok::Plus),
            ("-", Tok::Minus),
            ("*", Tok::Star),
            ("/", Tok::Slash),
            ("^", Tok::Caret),
            ("@", Tok::At),
            ("!", Tok::Bang),
            ("&", Tok::Amp),
            (".", Tok::Dot),
            (":", Tok::Colon),
        ];
        match symbols.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((s, tok)) => {
                out.push(Token {
                    tok: tok.clone(),
                    start,
                    end: i + s.len(),
                });
                i += s.len();
            }
            None => {
                let ch = rest.chars().next().unwrap();
                return Err((
                    i,
                    i + ch.len_utf8(),
                    ParseErrorKind::Syntax(format!("unexpected character {ch:?}")),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        start: src.len(),
        end: src.len(),
    });
    Ok(out)
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "let" => Tok::Let,
        "rec" => Tok::Rec,
        "in" => Tok::In,
        "fun" => Tok::Fun,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "match" => Tok::Match,
        "with" => Tok::With,
        "type" => Tok::Type,
        "of" => Tok::Of,
        "and" => Tok::And,
        "true" => Tok::True,
        "false" => Tok::False,
        "begin" => Tok::Begin,
        "end" => Tok::End,
        "while" => Tok::While,
        "do" => Tok::Do,
        "done" => Tok::Done,
        "for" => Tok::For,
        "to" => Tok::To,
        "downto" => Tok::Downto,
        "mod" => Tok::Mod,
        "or" => Tok::Or,
        _ => return None,
    })
}

fn skip_comment(src: &str, start: usize) -> Result<usize, LexError> {
    let bytes = src.as_bytes();
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        if bytes[i] == b'(' && bytes.get(i + 1) == Some(&b'*') {
            depth += 1;
            i += 2;
        } else if bytes[i] == b'*' && bytes.get(i + 1) == Some(&b')') {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Ok(i);
            }
        } else {
            i += 1;
        }
    }
    Err((
        start,
        src.len(),
        ParseErrorKind::Syntax("this comment is not terminated".into()),
    ))
}

fn lex_number(src: &str, start: usize) -> Result<(Tok, usize), LexError> {
    let bytes = src.as_bytes();
    let mut j = start;
    while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'_') {
        j += 1;
    }
    let mut is_float = false;
    if j < bytes.len() && bytes[j] == b'.' {
        is_float = true;
        j += 1;
        while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'_') {
            j += 1;
        }
    }
    if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
        let mut k = j + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        if k < bytes.len() && bytes[k].is_ascii_digit() {
            is_float = true;
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            j = k;
        }
    }
    let text: String = src[start..j].chars().filter(|&c| c != '_').collect();
    let bad = || {
        (
            start,
            j,
            ParseErrorKind::Syntax(format!("invalid number literal {}", &src[start..j])),
        )
    };
    let tok = if is_float {
        Tok::Float(text.parse().map_err(|_| bad())?)
    } else {
        Tok::Int(text.parse().map_err(|_| bad())?)
    };
    Ok((tok, j))
}

fn escape(c: char) -> Option<char> {
    Some(match c {
        'n' => '\n',
        't' => '\t',
        'r' => '\r',
        'b' => '\u{8}',
        '\\' => '\\',
        '"' => '"',
        '\'' => '\'',
        ' ' => ' ',
        _ => return None,
    })
}

fn lex_string(src: &str, start: usize) -> Result<(String, usize), LexError> {
    let mut out = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((off, c)) = chars.next() {
        match c {
            '"' => return Ok((out, start + 1 + off + 1)),
            '\\' => {
                let (eoff, e) = chars.next().ok_or((
                    start,
                    src.len(),
                    ParseErrorKind::Syntax("this string is not terminated".into()),
                ))?;
                out.push(escape(e).ok_or((
                    start + 1 + off,
                    start + 1 + eoff + e.len_utf8(),
                    ParseErrorKind::Syntax(format!("illegal escape \\{e}")),
                ))?);
            }
            c => out.push(c),
        }
    }
    Err((
        start,
        src.len(),
        ParseErrorKind::Syntax("this string is not terminated".into()),
    ))
}

fn lex_char(src: &str, start: usize) -> Result<(char, usize), LexError> {
    let rest = &src[start + 1..];
    let mut it = rest.chars();
    let bad = || {
        (
            start,
            start + 1,
            ParseErrorKind::Syntax("malformed character literal".into()),
        )
    };
    let c = it.next().ok_or_else(bad)?;
    let (ch, used) = if c == '\\' {
        let e = it.next().ok_or_else(bad)?;
        (escape(e).ok_or_else(bad)?, 1 + e.len_utf8())
    } else {
        (c, c.len_utf8())
    };
    if it.next() != Some('\'') {
        return Err(bad());
    }
    Ok((ch, start + 1 + used + 1))
}
