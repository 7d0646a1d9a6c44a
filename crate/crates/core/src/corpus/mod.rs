//! Golden fixtures and the mutation corpus.
//!
//! A fixture directory holds `program.ml`, an optional `level` file (a
//! single digit, default 4), an `answers` script, and the goldens
//! `expected.json` (the diagnosis) and `expected.txt` (its rendering).
//!
//! A mutant directory holds `original.ml`, a well-typed program, and
//! `mutated.ml`, the same program with one type-breaking edit. The edit's
//! extent is recovered by diffing the two texts.

mod mutation;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::apd::Answer;
use crate::diagnostics::Diagnosis;
use crate::parser::LanguageLevel;
use crate::session::render::render_diagnosis;
use crate::session::script::parse_script;
use crate::session::{run_step, Step};

pub use mutation::{automatic_oracle, edit_span, Alignment, load_mutants, localize, Localization, Mutant};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_optional(path: &Path) -> Result<Option<String>, CorpusError> {
    if path.exists() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

fn invalid(path: &Path, message: impl ToString) -> CorpusError {
    CorpusError::Invalid {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

pub(crate) fn read_level(dir: &Path) -> Result<LanguageLevel, CorpusError> {
    let path = dir.join("level");
    match read_optional(&path)? {
        None => Ok(LanguageLevel::FULL),
        Some(text) => text
            .trim()
            .parse::<u8>()
            .map_err(|e| invalid(&path, e))
            .and_then(|n| LanguageLevel::new(n).map_err(|e| invalid(&path, e))),
    }
}

/// Subdirectories of `root` in name order.
pub(crate) fn subdirs(root: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let entries = fs::read_dir(root).map_err(|source| CorpusError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    Ok(dirs)
}

/// The fixture directory shipped with this crate.
pub fn fixtures_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// The mutation corpus shipped with this crate.
pub fn mutants_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("mutations")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub dir: PathBuf,
    pub source: String,
    pub level: LanguageLevel,
    pub answers: Vec<Answer>,
    pub expected: Option<Diagnosis>,
    pub expected_text: Option<String>,
}

impl Fixture {
    pub fn load(dir: &Path) -> Result<Fixture, CorpusError> {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let source = read(&dir.join("program.ml"))?;
        let level = read_level(dir)?;
        let answers_path = dir.join("answers");
        let answers = match read_optional(&answers_path)? {
            Some(text) => parse_script(&text).map_err(|e| invalid(&answers_path, e))?,
            None => Vec::new(),
        };
        let json_path = dir.join("expected.json");
        let expected = read_optional(&json_path)?
            .map(|text| serde_json::from_str(&text).map_err(|e| invalid(&json_path, e)))
            .transpose()?;
        let expected_text = read_optional(&dir.join("expected.txt"))?;
        Ok(Fixture {
            name,
            dir: dir.to_path_buf(),
            source,
            level,
            answers,
            expected,
            expected_text,
        })
    }
}

pub fn load_fixtures(root: &Path) -> Result<Vec<Fixture>, CorpusError> {
    subdirs(root)?
        .iter()
        .filter(|d| d.join("program.ml").exists())
        .map(|d| Fixture::load(d))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureReport {
    pub name: String,
    pub actual: Option<Diagnosis>,
    pub actual_text: String,
    /// One line per mismatch; empty when the fixture passes.
    pub diff: Vec<String>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.diff.is_empty()
    }
}

/// Run the whole pipeline with the fixture's scripted answers and compare
/// kind, highlights, and message with the goldens.
pub fn run_fixture(f: &Fixture) -> FixtureReport {
    let mut diff = Vec::new();
    let actual = match run_step(&f.source, f.level, &f.answers) {
        Ok(Step::Diagnosis(d)) => Some(d),
        Ok(Step::Question(q)) => {
            diff.push(format!("answers ran out; pending question: {}", q.text));
            None
        }
        Ok(Step::WellTyped(_)) => {
            diff.push("program is well-typed".into());
            None
        }
        Err(e) => {
            diff.push(format!("session failed: {e}"));
            None
        }
    };
    let actual_text = actual
        .as_ref()
        .map(|d| render_diagnosis(&f.source, d))
        .unwrap_or_default();
    if let Some(d) = &actual {
        match &f.expected {
            None => diff.push("missing expected.json".into()),
            Some(e) => {
                if e.kind() != d.kind() {
                    diff.push(format!("kind: expected {:?}, got {:?}", e.kind(), d.kind()));
                }
                if e.code != d.code {
                    diff.push(format!("code: expected {}, got {}", e.code, d.code));
                }
                if e.highlights != d.highlights {
                    let show = |d: &Diagnosis| -> Vec<String> {
                        d.highlights
                            .iter()
                            .map(|s| format!("{:?}", s.text(&f.source)))
                            .collect()
                    };
                    diff.push(format!(
                        "highlights: expected {:?}, got {:?}",
                        show(e),
                        show(d)
                    ));
                }
                if e.message != d.message {
                    diff.push(format!(
                        "message: expected {:?}, got {:?}",
                        e.message, d.message
                    ));
                }
                if e.payload != d.payload {
                    diff.push(format!(
                        "payload: expected {:?}, got {:?}",
                        e.payload, d.payload
                    ));
                }
            }
        }
        match &f.expected_text {
            None => diff.push("missing expected.txt".into()),
            Some(t) if *t != actual_text => {
                diff.push(format!("rendering: expected {t:?}, got {actual_text:?}"))
            }
            Some(_) => {}
        }
    }
    FixtureReport {
        name: f.name.clone(),
        actual,
        actual_text,
        diff,
    }
}

/// Overwrite a fixture's goldens with the current output.
pub fn bless(f: &Fixture) -> Result<(), CorpusError> {
    let report = run_fixture(f);
    let d = report
        .actual
        .ok_or_else(|| invalid(&f.dir, report.diff.join("; ")))?;
    let json = serde_json::to_string_pretty(&d).map_err(|e| invalid(&f.dir, e))?;
    let write = |name: &str, text: &str| {
        let path = f.dir.join(name);
        fs::write(&path, text).map_err(|source| CorpusError::Io { path, source })
    };
    write("expected.json", &(json + "\n"))?;
    write("expected.txt", &report.actual_text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let fx = dir.path().join("then-unit");
        fs::create_dir(&fx).unwrap();
        fs::write(fx.join("program.ml"), "let f a = if a > 0 then a + 1").unwrap();
        fs::write(fx.join("level"), "3\n").unwrap();
        fs::write(fx.join("answers"), "y\ny\n").unwrap();

        let f = Fixture::load(&fx).unwrap();
        assert_eq!(f.level, LanguageLevel::SIDE_EFFECTS);
        let report = run_fixture(&f);
        assert!(!report.passed());
        assert!(report.diff.iter().any(|l| l.contains("expected.json")));

        bless(&f).unwrap();
        let f = Fixture::load(&fx).unwrap();
        let report = run_fixture(&f);
        assert!(report.passed(), "{:?}", report.diff);
        assert_eq!(
            report.actual.unwrap().message,
            "The type of then statement is int but it should be unit."
        );
    }

    #[test]
    fn mismatches_are_reported_per_field() {
        let dir = tempfile::tempdir().unwrap();
        let fx = dir.path().join("x");
        fs::create_dir(&fx).unwrap();
        fs::write(fx.join("program.ml"), "let p b = if b then 1, 2 else 3.5").unwrap();
        fs::write(fx.join("answers"), "n\ny\ny\n").unwrap();
        bless(&Fixture::load(&fx).unwrap()).unwrap();
        fs::write(fx.join("program.ml"), "let p b = if b then 1, 3 else 3.5").unwrap();
        let report = run_fixture(&Fixture::load(&fx).unwrap());
        assert_eq!(report.diff.len(), 1, "{:?}", report.diff);
        assert!(report.diff[0].starts_with("rendering"));
    }
}
