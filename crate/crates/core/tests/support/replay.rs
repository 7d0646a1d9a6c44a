//! Record debugging sessions to a JSONL log, then replay them through the
//! command-line tool.

use std::fs;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use typedebug::apd::Answer;
use typedebug::corpus::{fixtures_root, load_fixtures};
use typedebug::parser::LanguageLevel;
use typedebug::session::log::{read_log, sessions};
use typedebug::session::render::render_diagnosis;
use typedebug::session::script::format_script;
use typedebug::session::{EventLog, Session, Step};

/// Run `count` sessions that end in a diagnosis, answering at random, and
/// append them to the log at `path`. Sources are the fixture programs
/// followed by random ill-typed terms.
pub fn record_sessions(path: &Path, count: usize) -> Result<(), String> {
    let log = EventLog::append_to(path).map_err(|e| e.to_string())?;
    let fixtures = load_fixtures(&fixtures_root()).map_err(|e| e.to_string())?;
    let programs = fixtures
        .into_iter()
        .map(|f| (f.source, f.level))
        .chain(super::ill_typed_candidates(99).map(|s| (s, LanguageLevel::FULL)));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut recorded = 0;
    for (source, level) in programs {
        if recorded == count {
            break;
        }
        let mut session = Session::new(level).with_log(log.clone());
        let mut step = session.submit(&source);
        loop {
            match step {
                Ok(Step::Question(q)) => {
                    let a = if rng.gen_bool(0.7) {
                        Answer::Intended
                    } else {
                        Answer::UnintendedType
                    };
                    step = session.answer(q.id, a);
                }
                Ok(Step::Diagnosis(_)) => {
                    recorded += 1;
                    break;
                }
                _ => break,
            }
        }
    }
    if recorded < count {
        return Err(format!("only {recorded} sessions ended in a diagnosis"));
    }
    Ok(())
}

/// Replay every logged session that ended in a diagnosis with
/// `typedebug FILE --level L --answers A`, twice, and check that the
/// printed diagnosis is byte-identical to the logged one both times.
/// Returns the number of sessions replayed.
pub fn replay_sessions(log: &Path, bin: &str, work: &Path) -> Result<usize, String> {
    let text = fs::read(log).map_err(|e| e.to_string())?;
    let records = read_log(&text[..]).map_err(|e| e.to_string())?;
    let mut replayed = 0;
    for (i, s) in sessions(&records).iter().enumerate() {
        let Some(logged) = &s.diagnosis else {
            continue;
        };
        let program = work.join(format!("session-{i}.ml"));
        let answers = work.join(format!("session-{i}.answers"));
        fs::write(&program, &s.source).map_err(|e| e.to_string())?;
        fs::write(&answers, format_script(&s.answers)).map_err(|e| e.to_string())?;
        let expected = render_diagnosis(&s.source, logged);
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin)
                .arg(&program)
                .args(["--level", &s.level.to_string(), "--answers"])
                .arg(&answers)
                .output()
                .map_err(|e| e.to_string())?;
            if out.status.code() != Some(1) {
                return Err(format!(
                    "session {}: exit {:?}: {}",
                    s.session_id,
                    out.status.code(),
                    String::from_utf8_lossy(&out.stderr)
                ));
            }
            let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
            if !stdout.ends_with(&expected) {
                return Err(format!(
                    "session {}: logged diagnosis\n{expected}\nreplay printed\n{stdout}",
                    s.session_id
                ));
            }
            outputs.push(stdout);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("session {}: two replays differ", s.session_id));
        }
        replayed += 1;
    }
    Ok(replayed)
}
