//! The `.cdaimo` scenario format: one directive per line, `#` comments.
//!
//! ```text
//! scenario <id>
//! class <Name> [< <Parent>...]
//! alias <Alias> <Class>
//! enum <Name> <member> [< <member>...]
//! property data <name> <string|int|double|bool|Enum> [domain <Class>...]
//! property object <name> [domain <Class>...] [range <Class>...]
//! individual <name> <Class>...
//! data <subject> <property> <value>
//! object <subject> <property> <object>
//! axiom <id> <class expression> SubClassOf <head>
//! config likelihood_bands <low> <medium> <high> <very_high>
//! config disable_rule <R1|R2|R3>
//! ```

mod dump;
mod format;
mod load;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use dump::{axiom_line, dump_kb};
pub use format::{
    apply_overrides, format_directive, format_doc, parse_directive, parse_literal, parse_scenario, ConfigDirective,
    Directive, Override, Positioned, ScenarioDoc,
};
pub use load::{load_doc, load_scenario, LoadResult, LoadWarning, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    UnknownName,
    KindMismatch,
    Duplicate,
    InvalidName,
    Cycle,
    OutOfRange,
    Config,
    Validation,
}

impl ErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax_error",
            ErrorKind::UnknownName => "unknown_name",
            ErrorKind::KindMismatch => "kind_mismatch",
            ErrorKind::Duplicate => "duplicate_name",
            ErrorKind::InvalidName => "invalid_name",
            ErrorKind::Cycle => "cycle_detected",
            ErrorKind::OutOfRange => "out_of_range",
            ErrorKind::Config => "invalid_config",
            ErrorKind::Validation => "validation_error",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A load failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ScenarioError {
    pub kind: ErrorKind,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ScenarioError {
    pub fn new(kind: ErrorKind, line: u32, column: u32, message: impl Into<String>) -> Self {
        ScenarioError { kind, line, column, message: message.into() }
    }
}
