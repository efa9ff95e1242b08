//! Pattern inference from an insecure/secure example pair.

mod abstractor;
mod constraints;
mod critical;
mod fix;
mod merge;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::diff::{diff_with, EditScript, DEFAULT_THRESHOLD};
use crate::frontend::render::render;
use crate::frontend::{ApiTable, AstNode, NodeKind, ParseError};
use crate::model::{backward_slice_many, Ctx, NodeRef, ProgramModel};
use crate::pattern::{Anchor, BindingRole, FixedArg, Pattern, StmtRole, Template, TemplateStmt};

pub use abstractor::Abstractor;
pub use constraints::detect_constraints;
pub use critical::{identify_critical, ports, security_calls, CriticalSite, Port};
pub use fix::extract_fix;
pub use merge::merge;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InferError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("no critical API: {0}")]
    NoCriticalApi(String),
    #[error("stub misuse: {0}")]
    StubMisuse(String),
    #[error("invalid option set: {0}")]
    InvalidOptionSet(String),
}

/// Both examples parsed, modelled and differenced.
pub struct PairAnalysis {
    pub model_i: ProgramModel,
    pub model_s: ProgramModel,
    pub script: EditScript,
}

pub const INSECURE_FILE: &str = "insecure.java";
pub const SECURE_FILE: &str = "secure.java";

impl PairAnalysis {
    pub fn new(insecure: &str, secure: &str, threshold: f64) -> Result<PairAnalysis, InferError> {
        let build = |file: &str, src: &str| {
            ProgramModel::build(&[(file.to_string(), src.to_string())]).map_err(|mut errs| InferError::Parse(errs.remove(0)))
        };
        let model_i = build(INSECURE_FILE, insecure)?;
        let model_s = build(SECURE_FILE, secure)?;
        let script = diff_with(&model_i.units[0].ast, &model_s.units[0].ast, threshold);
        Ok(PairAnalysis { model_i, model_s, script })
    }

    pub fn i_ast(&self) -> &AstNode {
        &self.model_i.units[0].ast
    }

    pub fn s_ast(&self) -> &AstNode {
        &self.model_s.units[0].ast
    }
}

/// Result of inferring one pair.
#[derive(Debug, Clone)]
pub struct Inferred {
    pub pattern: Pattern,
    pub diagnostics: Vec<String>,
}

pub fn infer(name: &str, insecure: &str, secure: &str) -> Result<Inferred, InferError> {
    infer_with(name, insecure, secure, DEFAULT_THRESHOLD)
}

pub fn infer_with(name: &str, insecure: &str, secure: &str, threshold: f64) -> Result<Inferred, InferError> {
    let a = PairAnalysis::new(insecure, secure, threshold)?;
    let site = identify_critical(&a)?;
    let (context, deps) = extract_context(&a, &site);
    let mut diagnostics = Vec::new();
    let mut abs = Abstractor::new(&a);
    let template = build_template(&a, &site, &context, &deps, &mut abs);
    let anchors = collect_anchors(&a, &site, &context);
    let (constraints, fixed_args, notes) = detect_constraints(&a, &site)?;
    diagnostics.extend(notes);
    let (fix, fix_notes) = extract_fix(&a, &site, &mut abs);
    diagnostics.extend(fix_notes);
    let mut pattern = Pattern {
        id: String::new(),
        critical_api: site.api.clone(),
        template,
        anchors,
        fixed_args,
        constraints,
        fix,
        var_map: abs.into_var_map(),
        source_example_ids: vec![name.to_string()],
    };
    pattern.id = pattern.compute_id();
    Ok(Inferred { pattern, diagnostics })
}

/// Statement enclosing a call in I.
pub fn stmt_of(model: &ProgramModel, r: &NodeRef) -> NodeRef {
    model.locate(r).stmt.unwrap_or_else(|| r.clone())
}

/// Edit-relevant context: the critical statement and the statements of the
/// same method it depends on, or the overriding method's body. Returns
/// statements in source order and dependency edges between their indices.
pub fn extract_context(a: &PairAnalysis, site: &CriticalSite) -> (Vec<NodeRef>, Vec<(usize, usize)>) {
    let m = &a.model_i;
    if let Some(mid) = site.method {
        let mref = &m.methods[mid].node;
        let node = m.node(mref);
        let Some(bi) = node.children.iter().position(|c| c.kind == NodeKind::Block) else {
            return (vec![], vec![]);
        };
        let body = mref.child(bi);
        let stmts = m.node(&body)
            .children
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind.is_statement())
            .map(|(i, _)| body.child(i))
            .collect();
        return (stmts, vec![]);
    }
    let call = site.call.as_ref().expect("invocation site");
    let cstmt = stmt_of(m, call);
    let ctx = m.locate(call).ctx;
    let seeds: Vec<NodeRef> = ports(m, call).into_iter().map(|(_, p)| p).collect();
    let slice = backward_slice_many(m, &seeds);
    let mut set: BTreeSet<NodeRef> = slice
        .statements
        .iter()
        .filter(|s| same_ctx(m.locate(s).ctx, ctx))
        .cloned()
        .collect();
    set.insert(cstmt);
    let stmts: Vec<NodeRef> = set.into_iter().collect();
    let mut deps = Vec::new();
    for (d, u) in &slice.edges {
        if let (Some(i), Some(j)) = (stmts.iter().position(|s| s == d), stmts.iter().position(|s| s == u)) {
            if i != j && !deps.contains(&(i, j)) {
                deps.push((i, j));
            }
        }
    }
    deps.sort();
    (stmts, deps)
}

fn same_ctx(a: Option<Ctx>, b: Option<Ctx>) -> bool {
    match (a, b) {
        (Some(Ctx::Method(x)), Some(Ctx::Method(y))) => x == y,
        (Some(Ctx::Class(x)), Some(Ctx::Class(y))) => x == y,
        _ => false,
    }
}

fn build_template(
    a: &PairAnalysis,
    site: &CriticalSite,
    context: &[NodeRef],
    deps: &[(usize, usize)],
    abs: &mut Abstractor,
) -> Template {
    let m = &a.model_i;
    assign_roles(a, site, abs);
    let table = ApiTable::builtin();
    let crit_stmt = site.call.as_ref().map(|c| stmt_of(m, c));
    let mut stmts = Vec::new();
    for s in context {
        let node = m.node(s);
        let abstracted = abs.abstract_node(node);
        let role = if Some(s) == crit_stmt.as_ref() {
            StmtRole::Critical
        } else if site.method.is_none()
            && m.calls.values().any(|c| c.node.is_within(s) && table.is_security_api(&c.binding) && c.binding != site.api.binding)
        {
            StmtRole::Anchor
        } else {
            StmtRole::Context
        };
        stmts.push(TemplateStmt {
            text: render(&abstracted),
            tokens: crate::pattern::shape_tokens(&abstracted),
            role,
            line: m.line(s),
        });
    }
    Template { stmts, deps: deps.to_vec() }
}

/// Record which example variables are bound at a match site.
fn assign_roles(a: &PairAnalysis, site: &CriticalSite, abs: &mut Abstractor) {
    let m = &a.model_i;
    if let Some(mid) = site.method {
        for (i, (name, _)) in m.methods[mid].params.iter().enumerate() {
            abs.bind(name, BindingRole::Param(i));
        }
        return;
    }
    let Some(call) = &site.call else { return };
    let stmt = m.node(&stmt_of(m, call));
    match stmt.kind {
        NodeKind::LocalVarDecl => abs.bind(&stmt.text, BindingRole::DeclaredTarget),
        NodeKind::ExprStmt => {
            if let Some(e) = stmt.children.first().filter(|e| e.kind == NodeKind::Assign) {
                if e.children[0].kind == NodeKind::Name {
                    abs.bind(&e.children[0].text, BindingRole::DeclaredTarget);
                }
            }
        }
        _ => {}
    }
    for (port, p) in ports(m, call) {
        let n = m.node(&p);
        if n.kind == NodeKind::Name {
            let role = match port {
                Port::Receiver => BindingRole::Receiver,
                Port::Arg(i) => BindingRole::Arg(i),
            };
            abs.bind(&n.text, role);
        }
    }
}

fn collect_anchors(a: &PairAnalysis, site: &CriticalSite, context: &[NodeRef]) -> Vec<Anchor> {
    if site.method.is_some() {
        return vec![];
    }
    let table = ApiTable::builtin();
    let mut out: Vec<Anchor> = Vec::new();
    for c in a.model_i.calls.values() {
        if !table.is_security_api(&c.binding) || c.binding == site.api.binding {
            continue;
        }
        if !context.iter().any(|s| c.node.is_within(s)) {
            continue;
        }
        let node = a.model_i.node(&c.node);
        let fixed_args = node
            .args()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.kind == NodeKind::StringLiteral)
            .map(|(i, x)| FixedArg { param_index: i, value: crate::model::slice::unquote(&x.text) })
            .collect();
        let anchor = Anchor { binding: c.binding.clone(), fixed_args };
        if !out.contains(&anchor) {
            out.push(anchor);
        }
    }
    out
}

/// An example pair on disk: `<dir>/<name>/insecure.java` and `secure.java`.
#[derive(Debug, Clone)]
pub struct ExamplePair {
    pub name: String,
    pub insecure: String,
    pub secure: String,
}

/// Pair directories directly under `dir`, sorted by name. Subdirectories
/// missing either file are skipped.
pub fn load_pairs(dir: &std::path::Path) -> std::io::Result<Vec<ExamplePair>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let (i, s) = (path.join(INSECURE_FILE), path.join(SECURE_FILE));
        if !path.is_dir() || !i.is_file() || !s.is_file() {
            continue;
        }
        out.push(ExamplePair {
            name: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            insecure: std::fs::read_to_string(i)?,
            secure: std::fs::read_to_string(s)?,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
