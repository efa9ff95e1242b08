//! Inter-procedural backward slicing and constant-origin classification.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::frontend::render::{dotted, expr_str, is_type_like};
use crate::frontend::{NodeKind, PlaceholderKind, StubCatalog};

use super::{Ctx, LocalDef, NodeRef, ProgramModel};

/// Receiver-transparent wrappers: the result carries the receiver's value.
const WRAPPERS: &[&str] = &["getBytes", "toCharArray", "trim", "getEncoded", "clone", "intern"];

/// Static JDK calls whose result carries their arguments' value.
const ARG_PROPAGATORS: &[(&str, &str)] = &[
    ("Paths", "get"),
    ("Path", "of"),
    ("Files", "readAllBytes"),
    ("Files", "readString"),
    ("String", "valueOf"),
];

/// Calls whose result is fresh randomness.
pub const RANDOM_SOURCES: &[&str] = &["nextBytes", "nextInt", "nextLong", "generateSeed", "generateKey", "generateKeyPair"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EndpointKind {
    Literal,
    Placeholder(PlaceholderKind),
    /// An option listed in a `StringLiterals` stub.
    OptionLiteral,
    /// `new T[n]` without initializer: a zero-filled constant array.
    ArrayAlloc,
    Random,
    Computed,
    Unknown,
}

impl EndpointKind {
    pub fn is_literal_like(self) -> bool {
        matches!(
            self,
            EndpointKind::Literal | EndpointKind::Placeholder(_) | EndpointKind::OptionLiteral | EndpointKind::ArrayAlloc
        )
    }
}

/// Where a dataflow path ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Endpoint {
    pub kind: EndpointKind,
    /// Source text of the value, when it is a constant.
    pub value: Option<String>,
    pub node: Option<NodeRef>,
    /// Reached through the size expression of an array allocation.
    pub in_size: bool,
}

impl Endpoint {
    /// String content of a string literal value, else the raw text.
    pub fn string_value(&self) -> Option<String> {
        self.value.as_deref().map(unquote)
    }

    pub fn int_value(&self) -> Option<i64> {
        self.value.as_deref().and_then(parse_int)
    }
}

pub fn unquote(s: &str) -> String {
    match s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        Some(inner) => inner.replace("\\\"", "\"").replace("\\\\", "\\"),
        None => s.to_string(),
    }
}

pub fn parse_int(s: &str) -> Option<i64> {
    let t = s.trim_end_matches(['L', 'l']).replace('_', "");
    let (neg, t) = match t.strip_prefix('-') {
        Some(r) => (true, r.to_string()),
        None => (false, t),
    };
    let v = if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        i64::from_str_radix(h, 16).ok()?
    } else {
        t.parse::<i64>().ok()?
    };
    Some(if neg { -v } else { v })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    pub seeds: Vec<NodeRef>,
    /// Defining statements the seeds depend on, across methods and fields.
    pub statements: BTreeSet<NodeRef>,
    /// Data-dependency edges `(definition, use)` between statements.
    pub edges: BTreeSet<(NodeRef, NodeRef)>,
    pub endpoints: BTreeSet<Endpoint>,
    /// Every expression evaluated while slicing.
    pub visited: BTreeSet<NodeRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OriginKind {
    Literal,
    LiteralSet,
    Computed,
    RandomSource,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstOrigin {
    pub kind: OriginKind,
    pub values: Vec<String>,
}

/// Classify where a slice's values come from. Randomness dominates; then
/// any constant endpoint makes the origin literal.
pub fn const_origin(slice: &Slice) -> ConstOrigin {
    let eps: Vec<&Endpoint> = slice.endpoints.iter().filter(|e| !e.in_size).collect();
    if eps.iter().any(|e| e.kind == EndpointKind::Random) {
        return ConstOrigin { kind: OriginKind::RandomSource, values: vec![] };
    }
    let mut values: Vec<String> = Vec::new();
    for e in eps.iter().filter(|e| e.kind.is_literal_like()) {
        let v = e.value.clone().unwrap_or_default();
        if !values.contains(&v) {
            values.push(v);
        }
    }
    if !values.is_empty() {
        let others = eps.iter().any(|e| !e.kind.is_literal_like());
        let kind = if values.len() == 1 && !others { OriginKind::Literal } else { OriginKind::LiteralSet };
        values.sort();
        return ConstOrigin { kind, values };
    }
    if eps.iter().any(|e| e.kind == EndpointKind::Computed) {
        return ConstOrigin { kind: OriginKind::Computed, values: vec![] };
    }
    ConstOrigin { kind: OriginKind::Unknown, values: vec![] }
}

pub fn backward_slice(model: &ProgramModel, seed: &NodeRef) -> Slice {
    backward_slice_many(model, std::slice::from_ref(seed))
}

pub fn backward_slice_many(model: &ProgramModel, seeds: &[NodeRef]) -> Slice {
    let mut s = Slicer { m: model, out: Slice { seeds: seeds.to_vec(), ..Default::default() }, seen: HashSet::new(), size_only: false };
    for seed in seeds {
        s.eval(seed, false, false);
    }
    s.out
}

struct Slicer<'m> {
    m: &'m ProgramModel,
    out: Slice,
    seen: HashSet<(NodeRef, bool, bool, bool)>,
    /// Only length information is collected, contents are ignored.
    size_only: bool,
}

impl Slicer<'_> {
    fn endpoint(&mut self, kind: EndpointKind, value: Option<String>, node: &NodeRef, opaque: bool, in_size: bool) {
        if self.size_only && !in_size {
            return;
        }
        let kind = if opaque && kind.is_literal_like() { EndpointKind::Computed } else { kind };
        self.out.endpoints.insert(Endpoint { kind, value, node: Some(node.clone()), in_size });
    }

    fn dep(&mut self, def_stmt: &NodeRef, use_at: &NodeRef) {
        self.out.statements.insert(def_stmt.clone());
        if let Some(u) = self.m.locate(use_at).stmt {
            if &u != def_stmt {
                self.out.edges.insert((def_stmt.clone(), u));
            }
        }
    }

    fn eval(&mut self, r: &NodeRef, opaque: bool, in_size: bool) {
        if !self.seen.insert((r.clone(), opaque, in_size, self.size_only)) {
            return;
        }
        self.out.visited.insert(r.clone());
        let node = self.m.node(r);
        let catalog = StubCatalog::default();
        match node.kind {
            NodeKind::NullLiteral => self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size),
            k if k.is_literal() => {
                self.endpoint(EndpointKind::Literal, Some(node.text.clone()), r, opaque, in_size);
            }
            NodeKind::Name => self.eval_name(r, opaque, in_size),
            NodeKind::This => self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size),
            NodeKind::Paren | NodeKind::Cast => self.eval(&r.child(0), opaque, in_size),
            NodeKind::Assign => self.eval(&r.child(1), opaque, in_size),
            NodeKind::ArrayAccess => self.eval(&r.child(0), opaque, in_size),
            NodeKind::Conditional => {
                self.eval(&r.child(1), opaque, in_size);
                self.eval(&r.child(2), opaque, in_size);
            }
            NodeKind::Unary if node.text == "-" && node.children[0].kind == NodeKind::IntLiteral => {
                self.endpoint(EndpointKind::Literal, Some(format!("-{}", node.children[0].text)), r, opaque, in_size);
            }
            NodeKind::Binary => {
                if let Some(v) = fold_string_concat(node) {
                    self.endpoint(EndpointKind::Literal, Some(v), r, opaque, in_size);
                } else {
                    self.eval(&r.child(0), true, in_size);
                    self.eval(&r.child(1), true, in_size);
                }
            }
            NodeKind::FieldAccess => {
                let d = dotted(node);
                if let Some(kind) = d.as_deref().and_then(|d| catalog.placeholder_kind(d)) {
                    self.endpoint(EndpointKind::Placeholder(kind), d, r, opaque, in_size);
                    return;
                }
                let ctx = self.m.locate(r).ctx;
                let owner = ctx.and_then(|c| self.m.target_class(c, &node.children[0]));
                match owner.and_then(|o| self.m.find_field(o, &node.text)) {
                    Some(c) => self.eval_field(c, &node.text, r, opaque, in_size),
                    None => {
                        if !is_type_like(&node.children[0]) {
                            self.eval(&r.child(0), true, in_size);
                        }
                        self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
                    }
                }
            }
            NodeKind::MethodCall => self.eval_call(r, opaque, in_size),
            NodeKind::ObjectCreation => {
                let args_at = node.children.iter().position(|c| c.kind == NodeKind::Args).map(|i| r.child(i));
                let n_args = node.args().len();
                if catalog.is_string_options_type(&node.text) {
                    for (i, a) in node.args().iter().enumerate() {
                        let ar = args_at.as_ref().expect("args").child(i);
                        if a.kind == NodeKind::StringLiteral {
                            self.out.visited.insert(ar.clone());
                            self.endpoint(EndpointKind::OptionLiteral, Some(a.text.clone()), &ar, opaque, in_size);
                        } else {
                            self.eval(&ar, opaque, in_size);
                        }
                    }
                    return;
                }
                if node.text == "String" && n_args == 1 {
                    self.eval(&args_at.expect("args").child(0), opaque, in_size);
                    return;
                }
                if let Some(a) = &args_at {
                    for i in 0..n_args {
                        self.eval(&a.child(i), true, in_size);
                    }
                }
                self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
            }
            NodeKind::ArrayCreation | NodeKind::ArrayInit => {
                let init_at = if node.kind == NodeKind::ArrayInit {
                    Some(r.clone())
                } else {
                    node.children.iter().position(|c| c.kind == NodeKind::ArrayInit).map(|i| r.child(i))
                };
                match init_at {
                    Some(ir) => {
                        let init = self.m.node(&ir);
                        if init.children.iter().all(|c| is_constant_expr(c)) {
                            self.endpoint(EndpointKind::Literal, Some(expr_str(init)), r, opaque, in_size);
                        } else {
                            for i in 0..init.children.len() {
                                self.eval(&ir.child(i), opaque, in_size);
                            }
                        }
                    }
                    None => {
                        self.endpoint(EndpointKind::ArrayAlloc, Some(expr_str(node)), r, opaque, in_size);
                        for i in 0..node.children.len() {
                            self.eval(&r.child(i), opaque, true);
                        }
                    }
                }
            }
            NodeKind::Unary | NodeKind::Postfix => self.eval(&r.child(0), true, in_size),
            _ => self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size),
        }
    }

    fn eval_name(&mut self, r: &NodeRef, opaque: bool, in_size: bool) {
        let node = self.m.node(r);
        if node.text.starts_with("$c_") {
            self.endpoint(EndpointKind::Literal, Some(node.text.clone()), r, opaque, in_size);
            return;
        }
        let loc = self.m.locate(r);
        let Some(ctx) = loc.ctx else {
            self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
            return;
        };
        if let Ctx::Method(mid) = ctx {
            if let Some(defs) = self.m.methods[mid].uses.get(&r.path).cloned() {
                for d in defs {
                    self.eval_def(mid, d, r, opaque, in_size);
                }
                return;
            }
        }
        let class = self.m.ctx_class(ctx);
        match self.m.find_field(class, &node.text) {
            Some(c) => self.eval_field(c, &node.text, r, opaque, in_size),
            None => self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size),
        }
    }

    fn eval_def(&mut self, mid: usize, d: LocalDef, r: &NodeRef, opaque: bool, in_size: bool) {
        match d {
            LocalDef::Expr { stmt, expr } => {
                self.dep(&stmt, r);
                self.eval(&expr, opaque, in_size);
            }
            LocalDef::Param(i) => {
                let actuals = self.m.actuals(mid, i);
                if actuals.is_empty() {
                    self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
                }
                for a in actuals {
                    if let Some(s) = self.m.locate(&a).stmt {
                        self.dep(&s, r);
                    }
                    self.eval(&a, opaque, in_size);
                }
            }
            LocalDef::Random { stmt, prior } => {
                self.dep(&stmt, r);
                self.endpoint(EndpointKind::Random, None, &stmt, opaque, in_size);
                let was = self.size_only;
                self.size_only = true;
                for p in prior {
                    self.eval_def(mid, p, r, opaque, in_size);
                }
                self.size_only = was;
            }
            LocalDef::Uninit { stmt } | LocalDef::Opaque { stmt } => {
                self.dep(&stmt, r);
                self.endpoint(EndpointKind::Unknown, None, &stmt, opaque, in_size);
            }
        }
    }

    fn eval_field(&mut self, class: usize, name: &str, r: &NodeRef, opaque: bool, in_size: bool) {
        let defs = self.m.classes[class].fields[name].defs.clone();
        if defs.is_empty() {
            self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
        }
        for d in defs {
            self.dep(&d.stmt, r);
            self.eval(&d.value, opaque, in_size);
        }
    }

    fn eval_call(&mut self, r: &NodeRef, opaque: bool, in_size: bool) {
        let node = self.m.node(r);
        let catalog = StubCatalog::default();
        let has_recv = node.receiver().is_some();
        let args_at = node.children.iter().position(|c| c.kind == NodeKind::Args).map(|i| r.child(i));
        let n_args = node.args().len();
        if has_recv && (catalog.is_options_getter(&node.text) || WRAPPERS.contains(&node.text.as_str())) {
            self.eval(&r.child(0), opaque, in_size);
            return;
        }
        if has_recv && RANDOM_SOURCES.contains(&node.text.as_str()) {
            self.endpoint(EndpointKind::Random, None, r, opaque, in_size);
            return;
        }
        let recv_name = node.receiver().and_then(dotted);
        if let Some(rn) = &recv_name {
            if ARG_PROPAGATORS.iter().any(|(c, m)| c == rn && *m == node.text) {
                if let Some(a) = &args_at {
                    for i in 0..n_args {
                        self.eval(&a.child(i), opaque, in_size);
                    }
                }
                return;
            }
        }
        let callees = self.m.calls.get(r).map(|s| s.callees.clone()).unwrap_or_default();
        if !callees.is_empty() {
            for c in callees {
                for (ret_stmt, expr) in self.m.return_exprs(c) {
                    self.dep(&ret_stmt, r);
                    self.eval(&expr, opaque, in_size);
                }
            }
            return;
        }
        // external call: its result is unknown, its inputs are explored
        if has_recv && !node.receiver().is_some_and(is_type_like) {
            self.eval(&r.child(0), true, in_size);
        }
        if let Some(a) = &args_at {
            for i in 0..n_args {
                self.eval(&a.child(i), true, in_size);
            }
        }
        self.endpoint(EndpointKind::Unknown, None, r, opaque, in_size);
    }
}

fn is_constant_expr(e: &crate::frontend::AstNode) -> bool {
    match e.kind {
        k if k.is_literal() => true,
        NodeKind::Unary => e.children.first().is_some_and(|c| c.kind.is_literal()),
        NodeKind::Cast | NodeKind::Paren => e.children.first().is_some_and(is_constant_expr),
        _ => false,
    }
}

/// Concatenation made only of string literals, as a single literal.
fn fold_string_concat(e: &crate::frontend::AstNode) -> Option<String> {
    fn parts(e: &crate::frontend::AstNode, out: &mut String) -> bool {
        match e.kind {
            NodeKind::StringLiteral => {
                out.push_str(&unquote(&e.text));
                true
            }
            NodeKind::Paren => parts(&e.children[0], out),
            NodeKind::Binary if e.text == "+" => parts(&e.children[0], out) && parts(&e.children[1], out),
            _ => false,
        }
    }
    if e.text != "+" {
        return None;
    }
    let mut s = String::new();
    parts(e, &mut s).then(|| format!("\"{s}\""))
}
