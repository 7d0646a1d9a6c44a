use serde::{Deserialize, Serialize};

/// Stable numbering of every error message the debugger can produce. The
/// numbers are part of the log and protocol format; never reuse one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosisKind {
    PredicateNotBool,
    ThenNotUnit,
    ThenElseMismatch,
    MissingElse,
    MatchPatternVsScrutinee,
    MatchPatternVsPattern,
    MatchBranchMismatch,
    AppArgConflict,
    AppPartialLevel1,
    AppNonFunction,
    RecursiveUseMismatch,
    ConstructorMismatch,
    WellTypedUnintendedInfo,
    ConflictingVariable,
    AllTypeVariables,
    GenericExpressionError,
}

impl DiagnosisKind {
    pub const ALL: [DiagnosisKind; 16] = [
        DiagnosisKind::PredicateNotBool,
        DiagnosisKind::ThenNotUnit,
        DiagnosisKind::ThenElseMismatch,
        DiagnosisKind::MissingElse,
        DiagnosisKind::MatchPatternVsScrutinee,
        DiagnosisKind::MatchPatternVsPattern,
        DiagnosisKind::MatchBranchMismatch,
        DiagnosisKind::AppArgConflict,
        DiagnosisKind::AppPartialLevel1,
        DiagnosisKind::AppNonFunction,
        DiagnosisKind::RecursiveUseMismatch,
        DiagnosisKind::ConstructorMismatch,
        DiagnosisKind::WellTypedUnintendedInfo,
        DiagnosisKind::ConflictingVariable,
        DiagnosisKind::AllTypeVariables,
        DiagnosisKind::GenericExpressionError,
    ];

    pub fn code(self) -> u8 {
        Self::ALL.iter().position(|&k| k == self).unwrap() as u8 + 1
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            DiagnosisKind::PredicateNotBool => "PredicateNotBool",
            DiagnosisKind::ThenNotUnit => "ThenNotUnit",
            DiagnosisKind::ThenElseMismatch => "ThenElseMismatch",
            DiagnosisKind::MissingElse => "MissingElse",
            DiagnosisKind::MatchPatternVsScrutinee => "MatchPatternVsScrutinee",
            DiagnosisKind::MatchPatternVsPattern => "MatchPatternVsPattern",
            DiagnosisKind::MatchBranchMismatch => "MatchBranchMismatch",
            DiagnosisKind::AppArgConflict => "AppArgConflict",
            DiagnosisKind::AppPartialLevel1 => "AppPartialLevel1",
            DiagnosisKind::AppNonFunction => "AppNonFunction",
            DiagnosisKind::RecursiveUseMismatch => "RecursiveUseMismatch",
            DiagnosisKind::ConstructorMismatch => "ConstructorMismatch",
            DiagnosisKind::WellTypedUnintendedInfo => "WellTypedUnintendedInfo",
            DiagnosisKind::ConflictingVariable => "ConflictingVariable",
            DiagnosisKind::AllTypeVariables => "AllTypeVariables",
            DiagnosisKind::GenericExpressionError => "GenericExpressionError",
        }
    }
}

/// The types shown for an application: the function, every argument, and
/// the parameter type the offending argument should have had.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppTypes {
    /// Operator name for infix applications, shown as `Function (^)`.
    pub operator: Option<String>,
    pub function_type: String,
    pub argument_types: Vec<String>,
    /// 1-based index of the first argument that causes the error.
    pub argument: usize,
    /// `None` when the function takes fewer arguments than it is given.
    pub required_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberedType {
    /// 1-based argument position.
    pub index: usize,
    pub ty: String,
}

/// Structured content of a diagnosis. Types are already rendered, with one
/// variable naming shared by the whole diagnosis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum Payload {
    PredicateNotBool {
        predicate_type: String,
    },
    ThenNotUnit {
        then_type: String,
    },
    ThenElseMismatch {
        then_type: String,
        else_type: String,
    },
    MissingElse {},
    MatchPatternVsScrutinee {
        /// 1-based arm number.
        arm: usize,
        pattern_type: String,
        scrutinee_type: String,
    },
    MatchPatternVsPattern {
        arm: usize,
        pattern_type: String,
        previous_type: String,
    },
    MatchBranchMismatch {
        arm: usize,
        branch_type: String,
        previous_type: String,
    },
    AppArgConflict(AppTypes),
    AppPartialLevel1 {
        app: AppTypes,
        function_arguments: Vec<NumberedType>,
    },
    AppNonFunction {
        function_type: String,
        arguments: usize,
    },
    RecursiveUseMismatch {
        name: String,
        definition_type: String,
        use_type: String,
    },
    ConstructorMismatch {
        constructor: String,
        expected: Vec<String>,
        found: Vec<String>,
        /// The first mismatching argument when the arity is right.
        argument: Option<usize>,
    },
    WellTypedUnintendedInfo {
        ty: String,
        /// Set when the user rejected the type of this variable.
        binding: Option<String>,
        /// Set when the expression is a constructor.
        constructor: Option<String>,
    },
    ConflictingVariable {
        variable: String,
        first_type: String,
        second_type: String,
    },
    AllTypeVariables(AppTypes),
    GenericExpressionError {
        detail: String,
    },
}

impl Payload {
    pub fn kind(&self) -> DiagnosisKind {
        match self {
            Payload::PredicateNotBool { .. } => DiagnosisKind::PredicateNotBool,
            Payload::ThenNotUnit { .. } => DiagnosisKind::ThenNotUnit,
            Payload::ThenElseMismatch { .. } => DiagnosisKind::ThenElseMismatch,
            Payload::MissingElse {} => DiagnosisKind::MissingElse,
            Payload::MatchPatternVsScrutinee { .. } => DiagnosisKind::MatchPatternVsScrutinee,
            Payload::MatchPatternVsPattern { .. } => DiagnosisKind::MatchPatternVsPattern,
            Payload::MatchBranchMismatch { .. } => DiagnosisKind::MatchBranchMismatch,
            Payload::AppArgConflict(_) => DiagnosisKind::AppArgConflict,
            Payload::AppPartialLevel1 { .. } => DiagnosisKind::AppPartialLevel1,
            Payload::AppNonFunction { .. } => DiagnosisKind::AppNonFunction,
            Payload::RecursiveUseMismatch { .. } => DiagnosisKind::RecursiveUseMismatch,
            Payload::ConstructorMismatch { .. } => DiagnosisKind::ConstructorMismatch,
            Payload::WellTypedUnintendedInfo { .. } => DiagnosisKind::WellTypedUnintendedInfo,
            Payload::ConflictingVariable { .. } => DiagnosisKind::ConflictingVariable,
            Payload::AllTypeVariables(_) => DiagnosisKind::AllTypeVariables,
            Payload::GenericExpressionError { .. } => DiagnosisKind::GenericExpressionError,
        }
    }

    /// The user-facing text. Depends only on the payload, so clients can
    /// re-render it.
    pub fn message(&self) -> String {
        match self {
            Payload::PredicateNotBool { predicate_type } => format!(
                "The type of predicate statement is {predicate_type}, but it should be bool."
            ),
            Payload::ThenNotUnit { then_type } => {
                format!("The type of then statement is {then_type} but it should be unit.")
            }
            Payload::ThenElseMismatch {
                then_type,
                else_type,
            } => format!(
                "The type of then statement is {then_type} and else statement is {else_type}, \
                 but these should be the same type."
            ),
            Payload::MissingElse {} => "The else statement is missing.".to_string(),
            Payload::MatchPatternVsScrutinee {
                pattern_type,
                scrutinee_type,
                ..
            } => format!(
                "The highlighted pattern has type {pattern_type} and the matched expression \
                 has type {scrutinee_type}, but these should be the same type."
            ),
            Payload::MatchPatternVsPattern {
                pattern_type,
                previous_type,
                ..
            } => format!(
                "The highlighted pattern has type {pattern_type} and the previous patterns \
                 have type {previous_type}, but these should be the same type."
            ),
            Payload::MatchBranchMismatch {
                branch_type,
                previous_type,
                ..
            } => format!(
                "The highlighted expression has type {branch_type} and the previous expression \
                 has type {previous_type}, but these should be the same type."
            ),
            Payload::AppArgConflict(app) | Payload::AllTypeVariables(app) => {
                let ord = ordinal(app.argument);
                let mut out = format!(
                    "The {ord} argument of this application causes a type error.\n\
                     The types of the function, its arguments, and the required type for the \
                     {ord} argument are:\n"
                );
                write_app_types(app, &mut out);
                match &app.required_type {
                    Some(t) => out.push_str(&format!("Required for the {ord} argument: {t}")),
                    None => out.push_str(&format!("The function does not take a {ord} argument.")),
                }
                out
            }
            Payload::AppPartialLevel1 {
                app,
                function_arguments,
            } => {
                let mut out = format!(
                    "The {} argument of this application causes a type error.\n",
                    ordinal(app.argument)
                );
                write_app_types(app, &mut out);
                out.push_str("The following arguments have the function type.\n");
                for a in function_arguments {
                    out.push_str(&format!("{} argument: {}\n", capitalized(a.index), a.ty));
                }
                out.push_str("(some argument might be missing.)");
                out
            }
            Payload::AppNonFunction { function_type, .. } => format!(
                "This expression is parsed as an application but a function is missing.\n\
                 The expression in function position has type {function_type}, which is not \
                 a function type."
            ),
            Payload::RecursiveUseMismatch {
                definition_type,
                use_type,
                ..
            } => format!(
                "While this expression has {definition_type}, you tried to use it as type \
                 {use_type} for recursive call."
            ),
            Payload::ConstructorMismatch {
                constructor,
                expected,
                found,
                argument,
            } => match argument {
                None => format!(
                    "The constructor {constructor} expects {}, but it is applied to {} here.\n\
                     Declared argument types: {}\n\
                     Given argument types: {}",
                    count(expected.len(), "argument"),
                    count(found.len(), "argument"),
                    list_or_none(expected),
                    list_or_none(found),
                ),
                Some(k) => format!(
                    "The {} argument of the constructor {constructor} has type {} but it \
                     should be {}.\n\
                     Declared argument types: {}",
                    ordinal(*k),
                    found[k - 1],
                    expected[k - 1],
                    list_or_none(expected),
                ),
            },
            Payload::WellTypedUnintendedInfo {
                ty,
                binding,
                constructor,
            } => match (binding, constructor) {
                (Some(x), _) => format!("The type of {x} is first forced to {ty} here."),
                (None, Some(c)) => format!(
                    "This expression has type {ty}.\nThe constructor {c} is declared here."
                ),
                (None, None) => format!("This expression has type {ty}."),
            },
            Payload::ConflictingVariable {
                variable,
                first_type,
                second_type,
            } => format!(
                "The variable {variable} is used at two different types: {first_type} and \
                 {second_type}."
            ),
            Payload::GenericExpressionError { detail } => {
                format!("This expression causes a type error.\n{detail}")
            }
        }
    }
}

fn write_app_types(app: &AppTypes, out: &mut String) {
    match &app.operator {
        Some(op) => out.push_str(&format!("Function ({op}): {}\n", app.function_type)),
        None => out.push_str(&format!("Function: {}\n", app.function_type)),
    }
    for (i, t) in app.argument_types.iter().enumerate() {
        out.push_str(&format!("{} argument: {t}\n", capitalized(i + 1)));
    }
}

fn count(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn list_or_none(tys: &[String]) -> String {
    if tys.is_empty() {
        "none".to_string()
    } else {
        tys.join(" * ")
    }
}

/// `1` → `first`, and so on; numeric suffixes past ten.
pub fn ordinal(n: usize) -> String {
    const WORDS: [&str; 10] = [
        "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth",
        "tenth",
    ];
    match n {
        1..=10 => WORDS[n - 1].to_string(),
        _ => {
            let suffix = match (n % 10, n % 100) {
                (_, 11..=13) => "th",
                (1, _) => "st",
                (2, _) => "nd",
                (3, _) => "rd",
                _ => "th",
            };
            format!("{n}{suffix}")
        }
    }
}

fn capitalized(n: usize) -> String {
    let o = ordinal(n);
    let mut cs = o.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => o,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_dense_and_stable() {
        assert_eq!(DiagnosisKind::PredicateNotBool.code(), 1);
        assert_eq!(DiagnosisKind::MissingElse.code(), 4);
        assert_eq!(DiagnosisKind::AppArgConflict.code(), 8);
        assert_eq!(DiagnosisKind::GenericExpressionError.code(), 16);
        for k in DiagnosisKind::ALL {
            assert_eq!(DiagnosisKind::from_code(k.code()), Some(k));
        }
        assert_eq!(DiagnosisKind::from_code(0), None);
        assert_eq!(DiagnosisKind::from_code(17), None);
    }

    #[test]
    fn ordinals() {
        assert_eq!(ordinal(1), "first");
        assert_eq!(ordinal(3), "third");
        assert_eq!(ordinal(11), "11th");
        assert_eq!(ordinal(22), "22nd");
        assert_eq!(capitalized(2), "Second");
    }

    #[test]
    fn application_message_layout() {
        let p = Payload::AppArgConflict(AppTypes {
            operator: Some("^".into()),
            function_type: "string -> string -> string".into(),
            argument_types: vec!["int".into(), "'a".into()],
            argument: 1,
            required_type: Some("string".into()),
        });
        assert_eq!(
            p.message(),
            "The first argument of this application causes a type error.\n\
             The types of the function, its arguments, and the required type for the first \
             argument are:\n\
             Function (^): string -> string -> string\n\
             First argument: int\n\
             Second argument: 'a\n\
             Required for the first argument: string"
        );
    }

    #[test]
    fn nullary_constructor_arity_message() {
        let p = Payload::ConstructorMismatch {
            constructor: "Empty".into(),
            expected: vec![],
            found: vec!["int".into()],
            argument: None,
        };
        assert_eq!(
            p.message(),
            "The constructor Empty expects 0 arguments, but it is applied to 1 argument here.\n\
             Declared argument types: none\n\
             Given argument types: int"
        );
    }
}
