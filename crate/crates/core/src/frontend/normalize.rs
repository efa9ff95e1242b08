use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::AstNode;
use super::render::{item_tokens, stmt_tokens, RTok, Role};
use super::StubCatalog;

/// A statement with variables and constants abstracted away.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedStmt {
    pub tokens: Vec<String>,
    /// original variable name -> `$v_i`
    pub var_map: BTreeMap<String, String>,
    /// original literal text -> `$c_i`
    pub const_map: BTreeMap<String, String>,
}

impl NormalizedStmt {
    /// Space-separated text, which the parser reads back.
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Normalize a full statement.
pub fn normalize(stmt: &AstNode) -> NormalizedStmt {
    normalize_tokens(&stmt_tokens(stmt))
}

/// Normalize the differencing view of a node (headers only for compound
/// statements and declarations).
pub fn normalize_item(node: &AstNode) -> NormalizedStmt {
    normalize_tokens(&item_tokens(node))
}

/// Collapse the argument list of option-set stub constructors into one
/// literal token, so option lists of different lengths compare equal in
/// shape.
pub fn collapse_options(toks: &[RTok]) -> Vec<RTok> {
    let catalog = StubCatalog::default();
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        let is_ctor = toks[i].role == Role::Type
            && catalog.is_string_options_type(&toks[i].text)
            && i > 0
            && toks[i - 1].text == "new"
            && toks.get(i + 1).is_some_and(|t| t.text == "(");
        if !is_ctor {
            out.push(toks[i].clone());
            i += 1;
            continue;
        }
        out.push(toks[i].clone());
        out.push(toks[i + 1].clone());
        let mut depth = 1;
        let mut j = i + 2;
        let mut inner = Vec::new();
        while j < toks.len() {
            if toks[j].role == Role::Punct && toks[j].text == "(" {
                depth += 1;
            } else if toks[j].role == Role::Punct && toks[j].text == ")" {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            inner.push(toks[j].text.clone());
            j += 1;
        }
        if !inner.is_empty() {
            out.push(RTok { text: inner.join(" "), role: Role::Lit });
        }
        i = j;
    }
    out
}

pub fn normalize_tokens(toks: &[RTok]) -> NormalizedStmt {
    let toks = collapse_options(toks);
    let mut var_map = BTreeMap::new();
    let mut const_map = BTreeMap::new();
    let mut tokens = Vec::with_capacity(toks.len());
    for t in &toks {
        match t.role {
            Role::Var => {
                let n = var_map.len();
                let v = var_map.entry(t.text.clone()).or_insert_with(|| format!("$v_{n}"));
                tokens.push(v.clone());
            }
            Role::Lit => {
                let n = const_map.len();
                let c = const_map.entry(t.text.clone()).or_insert_with(|| format!("$c_{n}"));
                tokens.push(c.clone());
            }
            _ => tokens.push(t.text.clone()),
        }
    }
    NormalizedStmt { tokens, var_map, const_map }
}
