//! Approximate binding of calls and overriding methods to known APIs.
//!
//! Resolution is by simple name, imports and declared variable types; no
//! classpath is consulted. Callees missing from the signature table get a
//! binding whose class is `?`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::ast::{erase_generics, simple_type_name, AstNode, NodeKind};
use super::render::{dotted, is_type_like};
use super::StubCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiBinding {
    #[serde(rename = "class")]
    pub qualified_class: String,
    #[serde(rename = "method")]
    pub method_name: String,
    #[serde(rename = "params")]
    pub param_types: Vec<String>,
    #[serde(rename = "ctor")]
    pub is_constructor: bool,
    #[serde(rename = "override")]
    pub is_override: bool,
}

impl ApiBinding {
    pub fn unknown(method: &str, arity: usize, ctor: bool) -> Self {
        ApiBinding {
            qualified_class: "?".into(),
            method_name: method.into(),
            param_types: vec!["?".into(); arity],
            is_constructor: ctor,
            is_override: false,
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.qualified_class == "?"
    }

    pub fn class_simple_name(&self) -> &str {
        self.qualified_class.rsplit('.').next().unwrap_or(&self.qualified_class)
    }
}

impl fmt::Display for ApiBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}({})", self.qualified_class, self.method_name, self.param_types.join(", "))
    }
}

/// One record of the signature table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiEntry {
    pub qualified_class: String,
    pub method_name: String,
    pub param_types: Vec<String>,
    pub is_constructor: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub return_type: Option<String>,
    #[serde(default)]
    pub stub: bool,
}

impl ApiEntry {
    fn simple_class(&self) -> &str {
        self.qualified_class.rsplit('.').next().unwrap_or(&self.qualified_class)
    }

    fn accepts_arity(&self, n: usize) -> bool {
        match self.param_types.last() {
            Some(last) if last.ends_with("...") => n + 1 >= self.param_types.len(),
            _ => n == self.param_types.len(),
        }
    }

    fn binding(&self, is_override: bool) -> ApiBinding {
        ApiBinding {
            qualified_class: self.qualified_class.clone(),
            method_name: self.method_name.clone(),
            param_types: self.param_types.clone(),
            is_constructor: self.is_constructor,
            is_override,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApiTable {
    pub entries: Vec<ApiEntry>,
}

const BUILTIN_TABLE: &str = include_str!("../../data/security_apis.json");

impl ApiTable {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(ApiTable { entries: serde_json::from_str(text)? })
    }

    /// The shipped table covering the JCA/JSSE classes and the stubs.
    pub fn builtin() -> &'static ApiTable {
        static TABLE: OnceLock<ApiTable> = OnceLock::new();
        TABLE.get_or_init(|| ApiTable::from_json(BUILTIN_TABLE).expect("shipped API table is valid JSON"))
    }

    fn entry(&self, b: &ApiBinding) -> Option<&ApiEntry> {
        self.entries.iter().find(|e| {
            e.qualified_class == b.qualified_class
                && e.method_name == b.method_name
                && e.param_types == b.param_types
                && e.is_constructor == b.is_constructor
        })
    }

    /// Known, non-stub API.
    pub fn is_security_api(&self, b: &ApiBinding) -> bool {
        self.entry(b).is_some_and(|e| !e.stub)
    }

    pub fn is_stub(&self, b: &ApiBinding) -> bool {
        self.entry(b).is_some_and(|e| e.stub)
    }

    pub fn return_type(&self, b: &ApiBinding) -> Option<&str> {
        self.entry(b).and_then(|e| e.return_type.as_deref())
    }
}

/// Resolve against the shipped table.
pub fn resolve_binding(node: &AstNode, unit: &AstNode) -> ApiBinding {
    resolve_binding_with(ApiTable::builtin(), node, unit)
}

pub fn resolve_binding_with(table: &ApiTable, node: &AstNode, unit: &AstNode) -> ApiBinding {
    let chain = unit.path_to(node).unwrap_or_else(|| vec![node]);
    Resolver { table, unit, chain: &chain }.resolve(node)
}

enum StaticType {
    Value(String),
    Class(String),
}

struct Resolver<'a, 'b> {
    table: &'a ApiTable,
    unit: &'a AstNode,
    chain: &'b [&'a AstNode],
}

impl<'a> Resolver<'a, '_> {
    fn resolve(&self, node: &AstNode) -> ApiBinding {
        match node.kind {
            NodeKind::ObjectCreation => {
                let simple = simple_type_name(&node.text).to_string();
                let args = node.args();
                let cands = self.table.entries.iter().filter(|e| {
                    e.is_constructor && e.simple_class() == simple && e.accepts_arity(args.len())
                });
                self.pick(cands, args, &node.text, false)
                    .unwrap_or_else(|| ApiBinding::unknown(&simple, args.len(), true))
            }
            NodeKind::MethodCall => {
                let args = node.args();
                let unknown = || ApiBinding::unknown(&node.text, args.len(), false);
                let Some(recv) = node.receiver() else { return unknown() };
                let ty = match self.static_type(recv) {
                    Some(StaticType::Value(t)) | Some(StaticType::Class(t)) => t,
                    None => return unknown(),
                };
                let simple = simple_type_name(&ty).to_string();
                let cands = self.table.entries.iter().filter(|e| {
                    !e.is_constructor
                        && e.simple_class() == simple
                        && e.method_name == node.text
                        && e.accepts_arity(args.len())
                });
                self.pick(cands, args, &ty, false).unwrap_or_else(unknown)
            }
            NodeKind::MethodDecl => self.resolve_override(node),
            _ => ApiBinding::unknown(&node.text, 0, false),
        }
    }

    fn resolve_override(&self, decl: &AstNode) -> ApiBinding {
        let arity = decl.params().count();
        let unknown = ApiBinding::unknown(&decl.text, arity, false);
        // nearest enclosing type: the chain ends with `decl` itself
        let owner = self.chain.iter().rev().skip(1).find(|n| {
            matches!(n.kind, NodeKind::ClassDecl | NodeKind::InterfaceDecl | NodeKind::ClassBody)
        });
        let supers: Vec<String> = match owner {
            Some(n) if n.kind == NodeKind::ClassBody => vec![simple_type_name(&n.text).to_string()],
            Some(n) => n.supertypes(),
            None => return unknown,
        };
        let declared: Vec<String> = decl.params().map(|p| erase_generics(p.decl_type().unwrap_or(""))).collect();
        let mut best: Option<(&ApiEntry, usize)> = None;
        for e in &self.table.entries {
            if e.is_constructor || e.stub || e.method_name != decl.text || e.param_types.len() != arity {
                continue;
            }
            if !supers.iter().any(|s| s == e.simple_class()) || !self.class_visible(&e.qualified_class) {
                continue;
            }
            let score = e
                .param_types
                .iter()
                .zip(&declared)
                .map(|(p, d)| type_score(Some(d), p))
                .sum::<usize>();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((e, score));
            }
        }
        best.map(|(e, _)| e.binding(true)).unwrap_or(unknown)
    }

    fn pick<'e>(
        &self,
        cands: impl Iterator<Item = &'e ApiEntry>,
        args: &[AstNode],
        written_type: &str,
        is_override: bool,
    ) -> Option<ApiBinding> {
        let arg_types: Vec<Option<String>> = args
            .iter()
            .map(|a| match self.static_type(a) {
                Some(StaticType::Value(t)) => Some(erase_generics(&t)),
                _ => None,
            })
            .collect();
        let mut best: Option<(&ApiEntry, usize)> = None;
        for e in cands {
            if !self.class_visible(&e.qualified_class) || !qualified_matches(written_type, &e.qualified_class) {
                continue;
            }
            let score = arg_types
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let p = e.param_types.get(i).or(e.param_types.last()).map(|s| s.as_str()).unwrap_or("?");
                    type_score(t.as_deref(), p.trim_end_matches("..."))
                })
                .sum::<usize>();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((e, score));
            }
        }
        best.map(|(e, _)| e.binding(is_override))
    }

    /// A table class is visible unless the unit declares a class of the same
    /// simple name or imports a different class under that name.
    fn class_visible(&self, qualified: &str) -> bool {
        let simple = qualified.rsplit('.').next().unwrap_or(qualified);
        for n in self.unit.walk() {
            match n.kind {
                NodeKind::ClassDecl | NodeKind::InterfaceDecl if n.text == simple => return false,
                NodeKind::Import => {
                    let imp = n.text.trim_start_matches("static ");
                    if imp.rsplit('.').next() == Some(simple) && imp != qualified {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn var_type(&self, name: &str) -> Option<String> {
        for anc in self.chain.iter().rev() {
            if anc.kind.is_method_like() {
                if let Some(p) = anc.params().find(|p| p.text == name) {
                    return p.decl_type().map(str::to_string);
                }
                if let Some(body) = anc.body() {
                    for n in body.walk() {
                        if matches!(n.kind, NodeKind::LocalVarDecl | NodeKind::CatchClause) && n.text == name {
                            return n.decl_type().map(str::to_string);
                        }
                    }
                }
            }
            if matches!(
                anc.kind,
                NodeKind::ClassDecl | NodeKind::InterfaceDecl | NodeKind::ClassBody | NodeKind::CompilationUnit
            ) {
                if let Some(f) = anc.children_of(NodeKind::FieldDecl).find(|f| f.text == name) {
                    return f.decl_type().map(str::to_string);
                }
                if anc.kind == NodeKind::CompilationUnit {
                    // top-level statements declare variables too
                    if let Some(d) = anc.children_of(NodeKind::LocalVarDecl).find(|f| f.text == name) {
                        return d.decl_type().map(str::to_string);
                    }
                }
            }
        }
        None
    }

    fn enclosing_class_name(&self) -> Option<String> {
        self.chain.iter().rev().find_map(|n| match n.kind {
            NodeKind::ClassDecl | NodeKind::InterfaceDecl | NodeKind::ClassBody => Some(n.text.clone()),
            _ => None,
        })
    }

    fn static_type(&self, e: &AstNode) -> Option<StaticType> {
        use StaticType::*;
        match e.kind {
            NodeKind::Name => match self.var_type(&e.text) {
                Some(t) => Some(Value(t)),
                None if is_type_like(e) => Some(Class(e.text.clone())),
                None => None,
            },
            NodeKind::This => self.enclosing_class_name().map(Value),
            NodeKind::StringLiteral => Some(Value("String".into())),
            NodeKind::CharLiteral => Some(Value("char".into())),
            NodeKind::BoolLiteral => Some(Value("boolean".into())),
            NodeKind::IntLiteral => {
                let t = if e.text.ends_with(['L', 'l']) {
                    "long"
                } else if e.text.contains('.') || e.text.ends_with(['f', 'F', 'd', 'D']) && !e.text.starts_with("0x") {
                    "double"
                } else {
                    "int"
                };
                Some(Value(t.into()))
            }
            NodeKind::ObjectCreation | NodeKind::ArrayCreation | NodeKind::Cast => Some(Value(e.text.clone())),
            NodeKind::Paren => self.static_type(&e.children[0]),
            NodeKind::FieldAccess => {
                let catalog = StubCatalog::default();
                let d = dotted(e);
                if let Some(kind) = d.as_deref().and_then(|d| catalog.placeholder_kind(d)) {
                    return Some(Value(kind.array_type().into()));
                }
                if is_type_like(e) {
                    return d.map(Class);
                }
                if e.children[0].kind == NodeKind::This {
                    return self.var_type(&e.text).map(Value);
                }
                if e.text == "length" {
                    return Some(Value("int".into()));
                }
                None
            }
            NodeKind::MethodCall => {
                let b = self.resolve(e);
                if let Some(r) = self.table.return_type(&b) {
                    return Some(Value(r.to_string()));
                }
                match e.text.as_str() {
                    "getBytes" | "getEncoded" => Some(Value("byte[]".into())),
                    "toCharArray" => Some(Value("char[]".into())),
                    "toString" | "trim" | "substring" => Some(Value("String".into())),
                    _ => None,
                }
            }
            NodeKind::Binary if e.text == "+" => {
                let l = self.static_type(&e.children[0]);
                let r = self.static_type(&e.children[1]);
                let is_str = |t: &Option<StaticType>| matches!(t, Some(Value(s)) if s == "String");
                if is_str(&l) || is_str(&r) {
                    Some(Value("String".into()))
                } else {
                    l
                }
            }
            _ => None,
        }
    }
}

/// When a call names its class with a package prefix, the prefix must match.
fn qualified_matches(written: &str, qualified: &str) -> bool {
    let erased = written.split('<').next().unwrap_or(written).trim();
    !erased.contains('.') || erased == qualified
}

fn type_score(actual: Option<&str>, param: &str) -> usize {
    match actual {
        None => 1,
        Some(a) => {
            let a = erase_generics(a);
            let p = erase_generics(param);
            if a == p {
                3
            } else if is_int_family(&a) && is_int_family(&p) {
                2
            } else {
                0
            }
        }
    }
}

fn is_int_family(t: &str) -> bool {
    matches!(t, "int" | "long" | "short" | "byte")
}
