use std::fmt;

use serde::{Deserialize, Serialize};

/// Pedagogic language level, 1 (beginner) to 4 (full language). Feature
/// sets are cumulative:
///
/// | feature                                   | 1 | 2 | 3 | 4 |
/// |-------------------------------------------|---|---|---|---|
/// | partial application                       |   | x | x | x |
/// | `if` without `else`, `unit`, side effects |   |   | x | x |
/// | `==`, `!=`, `or`, `&`                     |   |   |   | x |
///
/// Partial application is a diagnostics concern only; the parser accepts it
/// at every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct LanguageLevel(u8);

impl LanguageLevel {
    pub const BEGINNER: LanguageLevel = LanguageLevel(1);
    pub const FIRST_CLASS: LanguageLevel = LanguageLevel(2);
    pub const SIDE_EFFECTS: LanguageLevel = LanguageLevel(3);
    pub const FULL: LanguageLevel = LanguageLevel(4);

    pub fn new(level: u8) -> Result<Self, String> {
        if (1..=4).contains(&level) {
            Ok(LanguageLevel(level))
        } else {
            Err(format!("language level must be between 1 and 4, got {level}"))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = LanguageLevel> {
        (1..=4).map(LanguageLevel)
    }

    pub fn allows_partial_application(self) -> bool {
        self.0 >= 2
    }

    pub fn allows_side_effects(self) -> bool {
        self.0 >= 3
    }

    pub fn allows_confusing_operators(self) -> bool {
        self.0 >= 4
    }
}

impl Default for LanguageLevel {
    fn default() -> Self {
        LanguageLevel::FULL
    }
}

impl TryFrom<u8> for LanguageLevel {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        LanguageLevel::new(v)
    }
}

impl From<LanguageLevel> for u8 {
    fn from(l: LanguageLevel) -> u8 {
        l.0
    }
}

impl fmt::Display for LanguageLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
