//! Template matching: locate critical-API sites and check each against a
//! pattern's anchors, dependencies and constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff::{token_similarity, DEFAULT_THRESHOLD};
use crate::frontend::render::expr_str;
use crate::frontend::{ApiBinding, NodeKind};
use crate::infer::{ports, stmt_of, Port};
use crate::model::slice::unquote;
use crate::model::{backward_slice, backward_slice_many, const_origin, NodeRef, OriginKind, ProgramModel, Slice};
use crate::pattern::{shape_tokens, BindingRole, Constraint, FixedArg, Pattern, RangeTarget};
use crate::store::PatternPack;

/// Binding equality ignoring the override flag.
pub fn same_api(a: &ApiBinding, b: &ApiBinding) -> bool {
    a.qualified_class == b.qualified_class
        && a.method_name == b.method_name
        && a.param_types == b.param_types
        && a.is_constructor == b.is_constructor
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Site {
    Call(NodeRef),
    Override(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub kind: String,
    pub param_index: usize,
    pub origin: String,
    pub values: Vec<String>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchEvidence {
    pub anchors: Vec<String>,
    pub constraints: Vec<Verdict>,
    pub fixed_args: Vec<Verdict>,
    pub slice_lines: Vec<u32>,
    pub matched_lines: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MisuseReport {
    pub pattern_id: String,
    pub class: String,
    pub api: String,
    pub file: String,
    pub line: u32,
    pub bindings: BTreeMap<String, String>,
    pub evidence: MatchEvidence,
    #[serde(skip)]
    pub site: Option<Site>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { threshold: DEFAULT_THRESHOLD }
    }
}

pub fn find_sites(model: &ProgramModel, pattern: &Pattern) -> Vec<Site> {
    let api = &pattern.critical_api.binding;
    if api.is_override {
        let mut out: Vec<Site> = (0..model.methods.len())
            .filter(|&m| model.methods[m].override_binding.as_ref().is_some_and(|b| same_api(b, api)))
            .map(Site::Override)
            .collect();
        out.sort();
        return out;
    }
    model.calls.values().filter(|c| same_api(&c.binding, api)).map(|c| Site::Call(c.node.clone())).collect()
}

pub fn match_site(model: &ProgramModel, site: &Site, pattern: &Pattern, opts: &ScanOptions) -> Option<MisuseReport> {
    match site {
        Site::Call(call) => match_call(model, call, pattern),
        Site::Override(m) => match_override(model, *m, pattern, opts),
    }
}

fn report(model: &ProgramModel, pattern: &Pattern, at: &NodeRef, line: u32, site: Site) -> MisuseReport {
    MisuseReport {
        pattern_id: pattern.id.clone(),
        class: pattern.critical_api.binding.class_simple_name().to_string(),
        api: pattern.critical_api.binding.to_string(),
        file: model.file(at).to_string(),
        line,
        bindings: BTreeMap::new(),
        evidence: MatchEvidence::default(),
        site: Some(site),
    }
}

fn origin_name(k: OriginKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_else(|| format!("{k:?}"))
}

/// Whether the constraint holds on the argument slice; the values that
/// made it hold are returned for evidence.
pub fn check_constraint(c: &Constraint, slice: &Slice) -> (bool, Vec<String>) {
    let eps = slice.endpoints.iter();
    match c {
        Constraint::ConstantPlaceholder { .. } => {
            let o = const_origin(slice);
            (matches!(o.kind, OriginKind::Literal | OriginKind::LiteralSet), o.values)
        }
        Constraint::OptionSet { insecure_options, .. } => {
            let hits: Vec<String> = eps
                .filter(|e| !e.in_size && e.kind.is_literal_like())
                .filter_map(|e| e.string_value())
                .filter(|v| insecure_options.contains(v))
                .collect();
            (!hits.is_empty(), hits)
        }
        Constraint::IntRange { threshold, target, .. } => {
            let size = *target == RangeTarget::ArraySize;
            let hits: Vec<String> = eps
                .filter(|e| e.in_size == size && e.kind.is_literal_like())
                .filter_map(|e| e.int_value())
                .filter(|v| v < threshold)
                .map(|v| v.to_string())
                .collect();
            (!hits.is_empty(), hits)
        }
    }
}

pub fn check_fixed(f: &FixedArg, slice: &Slice) -> bool {
    let o = const_origin(slice);
    o.kind == OriginKind::Literal && o.values.len() == 1 && unquote(&o.values[0]) == f.value
}

fn arg_node(model: &ProgramModel, call: &NodeRef, i: usize) -> Option<NodeRef> {
    ports(model, call).into_iter().find(|(p, _)| *p == Port::Arg(i)).map(|(_, r)| r)
}

/// Statements reaching `target` through slice dependency edges.
fn reaching(slice: &Slice, target: &NodeRef) -> BTreeSet<NodeRef> {
    let mut seen = BTreeSet::from([target.clone()]);
    let mut work = vec![target.clone()];
    while let Some(u) = work.pop() {
        for (d, x) in &slice.edges {
            if *x == u && seen.insert(d.clone()) {
                work.push(d.clone());
            }
        }
    }
    seen
}

fn match_call(model: &ProgramModel, call: &NodeRef, pattern: &Pattern) -> Option<MisuseReport> {
    let seeds: Vec<NodeRef> = ports(model, call).into_iter().map(|(_, r)| r).collect();
    let slice = backward_slice_many(model, &seeds);
    let site_stmt = stmt_of(model, call);
    let reach = reaching(&slice, &site_stmt);
    let mut ev = MatchEvidence::default();

    for anchor in &pattern.anchors {
        let found = model.calls.values().find(|c| {
            if !same_api(&c.binding, &anchor.binding) {
                return false;
            }
            let cstmt = stmt_of(model, &c.node);
            let in_slice = slice.visited.contains(&c.node) || slice.statements.contains(&cstmt);
            in_slice
                && (cstmt == site_stmt || reach.contains(&cstmt))
                && anchor.fixed_args.iter().all(|f| {
                    arg_node(model, &c.node, f.param_index).is_some_and(|a| check_fixed(f, &backward_slice(model, &a)))
                })
        })?;
        ev.anchors.push(format!("{} at line {}", anchor.binding, model.line(&found.node)));
    }

    for c in &pattern.constraints {
        let arg = arg_node(model, call, c.param_index())?;
        let s = backward_slice(model, &arg);
        let (ok, values) = check_constraint(c, &s);
        ev.constraints.push(Verdict {
            kind: c.kind_name().to_string(),
            param_index: c.param_index(),
            origin: origin_name(const_origin(&s).kind),
            values,
            satisfied: ok,
        });
        if !ok {
            return None;
        }
    }
    for f in &pattern.fixed_args {
        let arg = arg_node(model, call, f.param_index)?;
        let s = backward_slice(model, &arg);
        if !check_fixed(f, &s) {
            return None;
        }
        let o = const_origin(&s);
        ev.fixed_args.push(Verdict {
            kind: "fixedArg".into(),
            param_index: f.param_index,
            origin: origin_name(o.kind),
            values: o.values,
            satisfied: true,
        });
    }

    let mut lines: BTreeSet<u32> = slice.statements.iter().filter(|s| model.file(s) == model.file(call)).map(|s| model.line(s)).collect();
    lines.insert(model.line(&site_stmt));
    ev.slice_lines = lines.into_iter().collect();
    ev.matched_lines = vec![model.line(call)];

    let mut r = report(model, pattern, call, model.line(call), Site::Call(call.clone()));
    r.bindings = call_bindings(model, call, pattern);
    r.evidence = ev;
    Some(r)
}

fn call_bindings(model: &ProgramModel, call: &NodeRef, pattern: &Pattern) -> BTreeMap<String, String> {
    let stmt = model.node(&stmt_of(model, call));
    let port_map: BTreeMap<Port, NodeRef> = ports(model, call).into_iter().collect();
    let mut out = BTreeMap::new();
    for (abs, info) in &pattern.var_map {
        let concrete = match info.role {
            Some(BindingRole::DeclaredTarget) => match stmt.kind {
                NodeKind::LocalVarDecl | NodeKind::FieldDecl => Some(stmt.text.clone()),
                NodeKind::ExprStmt => stmt.children.first().filter(|e| e.kind == NodeKind::Assign).map(|e| expr_str(&e.children[0])),
                _ => None,
            },
            Some(BindingRole::Receiver) => port_map.get(&Port::Receiver).map(|r| expr_str(model.node(r))),
            Some(BindingRole::Arg(i)) => port_map.get(&Port::Arg(i)).map(|r| expr_str(model.node(r))),
            _ => None,
        };
        if let Some(c) = concrete {
            out.insert(abs.clone(), c);
        }
    }
    out
}

fn match_override(model: &ProgramModel, mid: usize, pattern: &Pattern, opts: &ScanOptions) -> Option<MisuseReport> {
    let m = &model.methods[mid];
    let node = model.node(&m.node);
    let body: Vec<&crate::frontend::AstNode> = node.body().map(|b| b.statements().collect()).unwrap_or_default();
    let tpl = &pattern.template.stmts;
    let mut matched = Vec::new();
    if tpl.is_empty() {
        if !body.is_empty() {
            return None;
        }
    } else {
        let mut k = 0;
        for t in tpl {
            let pos = body[k..].iter().position(|s| token_similarity(&shape_tokens(s), &t.tokens) >= opts.threshold)?;
            matched.push(body[k + pos].line());
            k += pos + 1;
        }
    }
    let mut r = report(model, pattern, &m.node, node.decl_line(), Site::Override(mid));
    for (abs, info) in &pattern.var_map {
        if let Some(BindingRole::Param(i)) = info.role {
            if let Some((name, _)) = m.params.get(i) {
                r.bindings.insert(abs.clone(), name.clone());
            }
        }
    }
    r.evidence.matched_lines = matched;
    Some(r)
}

pub fn scan(model: &ProgramModel, pack: &PatternPack, opts: &ScanOptions) -> Vec<MisuseReport> {
    let work: Vec<(&Pattern, Site)> =
        pack.patterns.iter().flat_map(|p| find_sites(model, p).into_iter().map(move |s| (p, s))).collect();
    let mut out: Vec<MisuseReport> = work.par_iter().filter_map(|(p, s)| match_site(model, s, p, opts)).collect();
    out.sort_by(|a, b| (&a.file, a.line, &a.pattern_id).cmp(&(&b.file, b.line, &b.pattern_id)));
    out
}

/// One JSON object per line.
pub fn to_json_lines(reports: &[MisuseReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let v = serde_json::to_value(r).expect("report serializes");
        s.push_str(&serde_json::to_string(&v).expect("value serializes"));
        s.push('\n');
    }
    s
}

pub fn to_text(reports: &[MisuseReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "{}:{}: {} misuse of {} [{}]", r.file, r.line, r.class, r.api, r.pattern_id);
        for (k, v) in &r.bindings {
            let _ = writeln!(s, "    {k} -> {v}");
        }
        for v in &r.evidence.constraints {
            let _ = writeln!(s, "    {} on argument {}: origin {} {:?}", v.kind, v.param_index, v.origin, v.values);
        }
        for a in &r.evidence.anchors {
            let _ = writeln!(s, "    anchor {a}");
        }
    }
    s
}
