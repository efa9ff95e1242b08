//! Pattern packs on disk: canonical JSON with sorted keys.

use std::fmt;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::pattern::{Constraint, Pattern};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub tool_version: String,
    pub created: String,
}

impl Provenance {
    /// Timestamp from `SOURCE_DATE_EPOCH`, or the epoch when unset, so that
    /// packs built from the same inputs are byte-identical.
    pub fn current() -> Provenance {
        let secs = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse::<i64>().ok()).unwrap_or(0);
        let created = DateTime::<Utc>::from_timestamp(secs, 0)
            .unwrap_or_default()
            .to_rfc3339_opts(SecondsFormat::Secs, true);
        Provenance { tool_version: TOOL_VERSION.to_string(), created }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternPack {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub patterns: Vec<Pattern>,
}

impl PatternPack {
    pub fn new(patterns: Vec<Pattern>) -> PatternPack {
        PatternPack { schema_version: SCHEMA_VERSION, provenance: Provenance::current(), patterns }
    }

    pub fn validate(&self) -> Result<(), Vec<SchemaError>> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(SchemaError::new("schemaVersion", "unsupported"));
        }
        for (i, p) in self.patterns.iter().enumerate() {
            validate_pattern(i, p, &self.patterns[..i], &mut errs);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Canonical text: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("pack serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub field: String,
    pub reason: String,
}

impl SchemaError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> SchemaError {
        SchemaError { field: field.into(), reason: reason.into() }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid pattern pack: {}", join(.0))]
    Schema(Vec<SchemaError>),
}

fn join(errs: &[SchemaError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

fn validate_pattern(i: usize, p: &Pattern, earlier: &[Pattern], errs: &mut Vec<SchemaError>) {
    let at = |f: &str| format!("patterns[{i}].{f}");
    if p.id.is_empty() {
        errs.push(SchemaError::new(at("id"), "empty"));
    } else if earlier.iter().any(|q| q.id == p.id) {
        errs.push(SchemaError::new(at("id"), "duplicate"));
    }
    let arity = p.critical_api.binding.param_types.len();
    for (j, c) in p.constraints.iter().enumerate() {
        let field = at(&format!("constraints[{j}]"));
        if c.param_index() >= arity {
            errs.push(SchemaError::new(field.clone(), "paramIndex out of range"));
        }
        if let Constraint::OptionSet { insecure_options, secure_options, .. } = c {
            if insecure_options.is_empty() || secure_options.is_empty() {
                errs.push(SchemaError::new(field.clone(), "empty option set"));
            }
            if insecure_options.iter().any(|o| secure_options.contains(o)) {
                errs.push(SchemaError::new(field, "insecure and secure options overlap"));
            }
        }
    }
    for (j, f) in p.fixed_args.iter().enumerate() {
        if f.param_index >= arity {
            errs.push(SchemaError::new(at(&format!("fixedArgs[{j}]")), "paramIndex out of range"));
        }
    }
    let n = p.template.stmts.len();
    for (j, (a, b)) in p.template.deps.iter().enumerate() {
        if *a >= n || *b >= n {
            errs.push(SchemaError::new(at(&format!("template.deps[{j}]")), "statement index out of range"));
        }
    }
}

pub fn save(pack: &PatternPack, path: &Path) -> Result<(), StoreError> {
    pack.validate().map_err(StoreError::Schema)?;
    std::fs::write(path, pack.to_canonical_json())
        .map_err(|source| StoreError::Io { path: path.display().to_string(), source })
}

pub fn load(path: &Path) -> Result<PatternPack, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|source| StoreError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

/// Parse and validate pack text, reporting every violation found.
pub fn parse(text: &str) -> Result<PatternPack, StoreError> {
    let value: Value = serde_json::from_str(text).map_err(|e| StoreError::Schema(vec![SchemaError::new("$", e.to_string())]))?;
    let mut errs = Vec::new();
    match value.get("schemaVersion").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(_) => errs.push(SchemaError::new("schemaVersion", "unsupported")),
        None => errs.push(SchemaError::new("schemaVersion", "missing")),
    }
    let provenance = match value.get("provenance").cloned().map(serde_json::from_value::<Provenance>) {
        Some(Ok(p)) => Some(p),
        Some(Err(e)) => {
            errs.push(SchemaError::new("provenance", e.to_string()));
            None
        }
        None => {
            errs.push(SchemaError::new("provenance", "missing"));
            None
        }
    };
    let mut patterns = Vec::new();
    match value.get("patterns").and_then(Value::as_array) {
        Some(items) => {
            for (i, item) in items.iter().enumerate() {
                match serde_json::from_value::<Pattern>(item.clone()) {
                    Ok(p) => {
                        validate_pattern(i, &p, &patterns, &mut errs);
                        patterns.push(p);
                    }
                    Err(e) => errs.push(SchemaError::new(format!("patterns[{i}]"), e.to_string())),
                }
            }
        }
        None => errs.push(SchemaError::new("patterns", "missing or not a list")),
    }
    match (errs.is_empty(), provenance) {
        (true, Some(provenance)) => Ok(PatternPack { schema_version: SCHEMA_VERSION, provenance, patterns }),
        _ => Err(StoreError::Schema(errs)),
    }
}
