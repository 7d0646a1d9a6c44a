//! Command-line front end.
//!
//! Exit codes: 0 well-typed, 1 diagnosis produced, 2 parse, level, or
//! scope error, 3 internal failure or exhausted answer script.

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::PathBuf;

use clap::Parser;

use super::protocol::{self, ServeConfig};
use super::render::{excerpt, render_diagnosis, render_question};
use super::script::{parse_answer, parse_script};
use super::{analyze, EventLog, Session, SessionError, Step};
use crate::apd::Answer;
use crate::parser::LanguageLevel;

pub const EXIT_WELL_TYPED: i32 = 0;
pub const EXIT_DIAGNOSIS: i32 = 1;
pub const EXIT_PROGRAM_ERROR: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "typedebug", version, about = "Interactive type debugger for a teaching subset of ML")]
pub struct Cli {
    /// Program file, or `-` for standard input.
    #[arg(value_name = "FILE")]
    pub file: Option<String>,

    /// Language level, 1 (beginner) to 4 (full).
    #[arg(long, default_value = "4", value_parser = parse_level)]
    pub level: LanguageLevel,

    /// Speak the JSON-lines protocol on standard input and output.
    #[arg(long)]
    pub json: bool,

    /// Answer questions from FILE: one `y`, `n`, or `n:<variable>` per line.
    #[arg(long, value_name = "FILE")]
    pub answers: Option<PathBuf>,

    /// Append JSONL event records to FILE.
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,

    /// Print the type tree of the program and exit.
    #[arg(long)]
    pub dump_mgtt: bool,

    /// Serve the JSON-lines protocol on a TCP address, one session per
    /// connection.
    #[arg(long, value_name = "ADDR", conflicts_with_all = ["json", "answers", "dump_mgtt"])]
    pub listen: Option<String>,
}

fn parse_level(s: &str) -> Result<LanguageLevel, String> {
    let n: u8 = s.parse().map_err(|_| format!("not a level: {s}"))?;
    LanguageLevel::new(n)
}

/// Standard streams, abstracted for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { 0 };
        }
    };
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout();
    let mut stderr = io::stderr();
    run_cli(
        &cli,
        Io {
            stdin: &mut stdin,
            stdout: &mut stdout,
            stderr: &mut stderr,
        },
    )
}

pub fn run_cli(cli: &Cli, io: Io<'_>) -> i32 {
    match run(cli, io.stdin, io.stdout, io.stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "typedebug: {e}");
            EXIT_FAILURE
        }
    }
}

fn run(
    cli: &Cli,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, String> {
    let log = match &cli.log {
        Some(path) => match EventLog::append_to(path) {
            Ok(l) => Some(l),
            Err(e) => {
                let _ = writeln!(stderr, "typedebug: cannot open log {}: {e}", path.display());
                None
            }
        },
        None => None,
    };

    if let Some(addr) = &cli.listen {
        let config = ServeConfig {
            level: cli.level,
            log,
        };
        protocol::listen(addr.as_str(), config).map_err(|e| e.to_string())?;
        return Ok(EXIT_WELL_TYPED);
    }

    if cli.json {
        let config = ServeConfig {
            level: cli.level,
            log,
        };
        let outcome = match &cli.file {
            Some(_) => {
                let source = read_source(cli, stdin)?;
                let prelude = serde_json::to_string(&protocol::Message::Program {
                    source,
                    level: Some(cli.level),
                })
                .map_err(|e| e.to_string())?;
                let input = io::Cursor::new(prelude + "\n").chain(stdin);
                protocol::serve(input, stdout, &config)
            }
            None => protocol::serve(stdin, stdout, &config),
        };
        return outcome.map(|o| o.exit_code()).map_err(|e| e.to_string());
    }

    let source = read_source(cli, stdin)?;

    if cli.dump_mgtt {
        return match analyze(&source, cli.level) {
            Ok(a) => {
                write_out(stdout, &crate::mgtt::dump(&a.mgtt, &source))?;
                Ok(EXIT_WELL_TYPED)
            }
            Err(e) => Ok(report_program_error(&source, &e, stderr)),
        };
    }

    let mut script = match &cli.answers {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Some(parse_script(&text)?.into_iter())
        }
        None => None,
    };
    let stdin_is_program = cli.file.as_deref() == Some("-");

    let mut session = Session::new(cli.level);
    if let Some(log) = log {
        session = session.with_log(log);
    }
    let mut step = session.submit(&source);
    loop {
        let q = match step {
            Ok(Step::WellTyped(types)) => {
                for t in types {
                    write_out(stdout, &(t.line() + "\n"))?;
                }
                return Ok(EXIT_WELL_TYPED);
            }
            Ok(Step::Diagnosis(d)) => {
                write_out(stdout, &render_diagnosis(&source, &d))?;
                return Ok(EXIT_DIAGNOSIS);
            }
            Ok(Step::Question(q)) => q,
            Err(e) if e.is_program_error() => {
                return Ok(report_program_error(&source, &e, stderr));
            }
            Err(e) => return Err(e.to_string()),
        };
        write_out(stdout, &(render_question(&source, &q) + "\n"))?;
        let answer = match &mut script {
            Some(answers) => match answers.next() {
                Some(a) => {
                    write_out(stdout, &format!("> {}\n", super::script::format_answer(&a)))?;
                    a
                }
                None => return Err("the answer script ran out of answers".into()),
            },
            None if stdin_is_program => {
                return Err("cannot ask questions when the program is read from standard input; use --answers".into())
            }
            None => prompt(&q, stdin, stdout)?,
        };
        step = session.answer(q.id, answer);
        if let Err(SessionError::UnknownBinding(x)) = &step {
            if script.is_some() {
                return Err(format!("{x} is not a variable of the expression in question"));
            }
        }
    }
}

/// Ask until a valid answer arrives; unknown variable names are rejected
/// here so the session never sees them.
fn prompt(
    q: &super::QuestionView,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
) -> Result<Answer, String> {
    loop {
        write_out(stdout, "[y / n / n:<variable>] ")?;
        let mut line = String::new();
        let n = stdin.read_line(&mut line).map_err(|e| e.to_string())?;
        if n == 0 {
            return Err("no answer: end of input".into());
        }
        match parse_answer(&line) {
            Ok(Answer::UnintendedBinding(x)) if !q.has_binding(&x) => {
                write_out(stdout, &format!("{x} is not a variable of this expression.\n"))?;
            }
            Ok(a) => return Ok(a),
            Err(e) => write_out(stdout, &format!("{e}\n"))?,
        }
    }
}

fn read_source(cli: &Cli, stdin: &mut dyn BufRead) -> Result<String, String> {
    match cli.file.as_deref() {
        None => Err("no program given; pass a file or - for standard input".into()),
        Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| e.to_string())?;
            Ok(s)
        }
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
    }
}

fn report_program_error(source: &str, e: &SessionError, stderr: &mut dyn Write) -> i32 {
    let mut text = String::new();
    if let Some(span) = e.span() {
        text.push_str(&excerpt(source, &span));
    }
    text.push_str(&e.to_string());
    let _ = writeln!(stderr, "{text}");
    if e.is_program_error() {
        EXIT_PROGRAM_ERROR
    } else {
        EXIT_FAILURE
    }
}

fn write_out(w: &mut dyn Write, s: &str) -> Result<(), String> {
    w.write_all(s.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| e.to_string())
}
