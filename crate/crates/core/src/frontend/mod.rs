//! Java source frontend: lexing, parsing, rendering, normalization and
//! binding of calls to known security APIs.

pub mod ast;
pub mod binding;
pub mod lexer;
pub mod normalize;
pub mod parser;
pub mod rename;
pub mod render;

pub use ast::{AstNode, NodeKind, Span};
pub use binding::{resolve_binding, ApiBinding, ApiTable};
pub use normalize::{normalize, NormalizedStmt};
pub use parser::{parse_statement, parse_unit};

/// A syntax error with its location.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{file}:{line}: {message}")]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(file: &str, line: u32, msg: &str) -> Self {
        ParseError {
            file: file.to_string(),
            line,
            message: msg.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PlaceholderKind {
    ByteArray,
    CharArray,
}

impl PlaceholderKind {
    pub fn array_type(self) -> &'static str {
        match self {
            PlaceholderKind::ByteArray => "byte[]",
            PlaceholderKind::CharArray => "char[]",
        }
    }
}

/// Stub classes that examples use to mark constants and option sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubCatalog {
    pub byte_array_placeholder: String,
    pub char_array_placeholder: String,
    pub string_options_ctor: String,
    pub string_options_getter: String,
}

const STUB_PACKAGE: &str = "stubs";

impl Default for StubCatalog {
    fn default() -> Self {
        StubCatalog {
            byte_array_placeholder: "ByteLiterals.CONSTANT_ARRAY".into(),
            char_array_placeholder: "CharLiterals.CONSTANT_ARRAY".into(),
            string_options_ctor: "StringLiterals".into(),
            string_options_getter: "getAString".into(),
        }
    }
}

impl StubCatalog {
    fn same(name: &str, entry: &str) -> bool {
        name == entry || name.strip_prefix(STUB_PACKAGE).and_then(|r| r.strip_prefix('.')) == Some(entry)
    }

    /// Placeholder named by an exact (optionally package-qualified) name.
    pub fn placeholder_kind(&self, dotted: &str) -> Option<PlaceholderKind> {
        if Self::same(dotted, &self.byte_array_placeholder) {
            Some(PlaceholderKind::ByteArray)
        } else if Self::same(dotted, &self.char_array_placeholder) {
            Some(PlaceholderKind::CharArray)
        } else {
            None
        }
    }

    pub fn is_string_options_type(&self, ty: &str) -> bool {
        Self::same(ty, &self.string_options_ctor)
    }

    pub fn is_options_getter(&self, method: &str) -> bool {
        method == self.string_options_getter
    }
}
