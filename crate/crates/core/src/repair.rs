//! Concretize a pattern's abstract fix against a report. Suggestions are
//! text; the scanned sources are never modified.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::detect::{check_constraint, MisuseReport, Site};
use crate::frontend::parser::{parse_statement, parse_unit};
use crate::frontend::render::{expr_str, render};
use crate::frontend::rename::rename;
use crate::frontend::{AstNode, NodeKind};
use crate::infer::{ports, stmt_of, Port};
use crate::model::{backward_slice, Ctx, NodeRef, ProgramModel};
use crate::pattern::{Constraint, FixKind, FixTarget, InsertionAnchor, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RepairKind {
    ExpressionReplacement,
    CodeBlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExprTarget {
    pub file: String,
    pub line: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcreteBlock {
    pub insertion_anchor: InsertionAnchor,
    pub anchor_text: String,
    pub code: String,
}

#[derive(Debug, Clone)]
enum Edit {
    ReplaceExpr(NodeRef, AstNode),
    ReplaceStmt(NodeRef, AstNode),
    Remove(NodeRef),
    InsertBefore(NodeRef, Vec<AstNode>),
    InsertAfter(NodeRef, Vec<AstNode>),
    ReplaceBody(NodeRef, Vec<AstNode>),
}

impl Edit {
    fn at(&self) -> &NodeRef {
        match self {
            Edit::ReplaceExpr(r, _)
            | Edit::ReplaceStmt(r, _)
            | Edit::Remove(r)
            | Edit::InsertBefore(r, _)
            | Edit::InsertAfter(r, _)
            | Edit::ReplaceBody(r, _) => r,
        }
    }

    /// Among edits at one node, replacements go first so that insertions
    /// see the final node.
    fn rank(&self) -> u8 {
        match self {
            Edit::ReplaceExpr(..) | Edit::ReplaceStmt(..) | Edit::ReplaceBody(..) => 0,
            Edit::InsertAfter(..) => 1,
            Edit::InsertBefore(..) => 2,
            Edit::Remove(..) => 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepairSuggestion {
    pub pattern_id: String,
    pub file: String,
    pub line: u32,
    pub kind: RepairKind,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub targets: Vec<ExprTarget>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub alternatives: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matched_statement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replacement: Option<String>,
    pub remove_matched: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub blocks: Vec<ConcreteBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip)]
    edits: Vec<Edit>,
}

fn is_abstract(name: &str) -> bool {
    name.starts_with("$v_") || name.starts_with("$m_")
}

/// Maps abstract identifiers to concrete ones: report bindings first, then
/// fresh names derived from the example's identifier.
struct Namer<'a> {
    bindings: &'a BTreeMap<String, String>,
    pattern: &'a Pattern,
    taken: BTreeSet<String>,
    fresh: BTreeMap<String, String>,
}

impl Namer<'_> {
    fn name(&mut self, abs: &str) -> String {
        if let Some(c) = self.bindings.get(abs) {
            return c.clone();
        }
        if let Some(c) = self.fresh.get(abs) {
            return c.clone();
        }
        let base = self
            .pattern
            .var_map
            .get(abs)
            .map(|v| v.concrete.clone())
            .unwrap_or_else(|| if abs.starts_with("$m_") { "helper".into() } else { "value".into() });
        let mut candidate = base.clone();
        let mut k = 1;
        while self.taken.contains(&candidate) {
            candidate = format!("{base}{k}");
            k += 1;
        }
        self.taken.insert(candidate.clone());
        self.fresh.insert(abs.to_string(), candidate.clone());
        candidate
    }

    fn concretize(this: &RefCell<Self>, node: &mut AstNode) {
        let f = |n: &str| is_abstract(n).then(|| this.borrow_mut().name(n));
        rename(node, &f, &f);
    }
}

fn parse_expr(text: &str) -> Option<AstNode> {
    let stmt = parse_statement(&format!("__fix__ = {text};"), "<fix>").ok()?;
    let assign = stmt.children.first()?;
    (assign.kind == NodeKind::Assign).then(|| assign.children.get(1).cloned()).flatten()
}

fn parse_stmts(text: &str) -> Vec<AstNode> {
    parse_unit(&format!("void __fix__() {{\n{text}\n}}"), "<fix>")
        .ok()
        .and_then(|u| u.children.into_iter().find(|c| c.kind == NodeKind::MethodDecl))
        .and_then(|m| m.children.into_iter().find(|c| c.kind == NodeKind::Block))
        .map(|b| b.children)
        .unwrap_or_default()
}

fn parse_members(text: &str) -> Vec<AstNode> {
    parse_unit(text, "<fix>").map(|u| u.children).unwrap_or_default()
}

fn join_rendered(nodes: &[AstNode]) -> String {
    nodes.iter().map(render).collect::<Vec<_>>().join("\n")
}

/// `name(Type a, Type b)` of a method or constructor declaration.
fn signature(node: &AstNode) -> String {
    let params: Vec<String> = node.params().map(|p| format!("{} {}", p.decl_type().unwrap_or(""), p.text)).collect();
    format!("{}({})", node.text, params.join(", "))
}

pub fn suggest(report: &MisuseReport, pattern: &Pattern, model: &ProgramModel) -> RepairSuggestion {
    let site = report.site.clone().expect("report from a scan");
    let class = match &site {
        Site::Call(c) => model.locate(c).class,
        Site::Override(m) => Some(model.methods[*m].class),
    };
    let taken = class.map(|c| model.identifiers_in_class(c)).unwrap_or_default();
    let namer = RefCell::new(Namer { bindings: &report.bindings, pattern, taken, fresh: BTreeMap::new() });
    let mut s = RepairSuggestion {
        pattern_id: pattern.id.clone(),
        file: report.file.clone(),
        line: report.line,
        kind: match pattern.fix.kind {
            FixKind::Expr => RepairKind::ExpressionReplacement,
            FixKind::Block => RepairKind::CodeBlock,
        },
        targets: vec![],
        alternatives: vec![],
        matched_statement: None,
        replacement: None,
        remove_matched: pattern.fix.remove_matched,
        blocks: vec![],
        notes: pattern.fix.notes.clone(),
        edits: vec![],
    };
    match (&site, pattern.fix.kind) {
        (Site::Call(call), FixKind::Expr) => expr_repair(&mut s, model, call, pattern, &namer),
        (Site::Call(call), FixKind::Block) => block_repair(&mut s, model, call, pattern, &namer),
        (Site::Override(m), _) => body_repair(&mut s, model, *m, pattern, &namer),
    }
    s
}

fn expr_repair(s: &mut RepairSuggestion, model: &ProgramModel, call: &NodeRef, pattern: &Pattern, namer: &RefCell<Namer>) {
    let port_nodes: BTreeMap<Port, NodeRef> = ports(model, call).into_iter().collect();
    let (port, constraint) = match pattern.fix.target {
        Some(FixTarget::ArgOrigin(i)) => (Some(Port::Arg(i)), pattern.constraints.iter().find(|c| c.param_index() == i)),
        Some(FixTarget::ReceiverOrigin) => (Some(Port::Receiver), None),
        _ => (None, None),
    };
    let targets: Vec<NodeRef> = match port.and_then(|p| port_nodes.get(&p)) {
        None => vec![call.clone()],
        Some(arg) => {
            let slice = backward_slice(model, arg);
            let violating: Vec<NodeRef> = slice
                .endpoints
                .iter()
                .filter(|e| e.kind.is_literal_like())
                .filter(|e| match constraint {
                    Some(c) => {
                        let single = crate::model::Slice { endpoints: [(*e).clone()].into(), ..Default::default() };
                        check_constraint(c, &single).0
                    }
                    None => !e.in_size,
                })
                .filter_map(|e| e.node.clone())
                .collect();
            if violating.is_empty() {
                vec![arg.clone()]
            } else {
                violating
            }
        }
    };
    s.alternatives = match constraint {
        Some(Constraint::OptionSet { secure_options, .. }) => secure_options.iter().map(|o| format!("{o:?}")).collect(),
        Some(Constraint::IntRange { threshold, .. }) => vec![threshold.to_string()],
        _ => pattern
            .fix
            .replacement
            .as_deref()
            .and_then(parse_expr)
            .map(|mut e| {
                Namer::concretize(namer, &mut e);
                vec![expr_str(&e)]
            })
            .unwrap_or_default(),
    };
    let first = s.alternatives.first().and_then(|a| parse_expr(a));
    for t in targets {
        s.targets.push(ExprTarget { file: model.file(&t).to_string(), line: model.line(&t), text: expr_str(model.node(&t)) });
        if let Some(e) = &first {
            s.edits.push(Edit::ReplaceExpr(t, e.clone()));
        }
    }
}

fn block_repair(s: &mut RepairSuggestion, model: &ProgramModel, call: &NodeRef, pattern: &Pattern, namer: &RefCell<Namer>) {
    let stmt = stmt_of(model, call);
    s.matched_statement = Some(render(model.node(&stmt)));
    let replacement = pattern.fix.replacement.as_deref().and_then(|t| parse_stmts(t).into_iter().next());
    match replacement {
        Some(mut r) => {
            Namer::concretize(namer, &mut r);
            s.replacement = Some(render(&r));
            s.edits.push(Edit::ReplaceStmt(stmt.clone(), r));
        }
        None if pattern.fix.remove_matched => s.edits.push(Edit::Remove(stmt.clone())),
        None => {}
    }
    let container = match model.locate(call).ctx {
        Some(Ctx::Method(m)) => model.methods[m].node.clone(),
        _ => stmt.clone(),
    };
    for b in &pattern.fix.blocks {
        let (mut nodes, at, text) = match b.insertion_anchor {
            InsertionAnchor::BeforeContainerMethod => {
                let cn = model.node(&container);
                let what = if cn.kind.is_method_like() { format!("the method {}", signature(cn)) } else { "the field".to_string() };
                (parse_members(&b.body), container.clone(), format!("before {what}"))
            }
            InsertionAnchor::BeforeMatchedStatement => {
                (parse_stmts(&b.body), stmt.clone(), format!("before the matched statement at line {}", model.line(&stmt)))
            }
            InsertionAnchor::AfterMatchedStatement => {
                (parse_stmts(&b.body), stmt.clone(), format!("after the matched statement at line {}", model.line(&stmt)))
            }
            InsertionAnchor::ReplaceMethodBody => continue,
        };
        for n in nodes.iter_mut() {
            Namer::concretize(namer, n);
        }
        s.blocks.push(ConcreteBlock { insertion_anchor: b.insertion_anchor, anchor_text: text, code: join_rendered(&nodes) });
        s.edits.push(match b.insertion_anchor {
            InsertionAnchor::AfterMatchedStatement => Edit::InsertAfter(at, nodes),
            _ => Edit::InsertBefore(at, nodes),
        });
    }
}

fn body_repair(s: &mut RepairSuggestion, model: &ProgramModel, mid: usize, pattern: &Pattern, namer: &RefCell<Namer>) {
    let m = &model.methods[mid];
    let node = model.node(&m.node);
    if let Some(body) = node.body() {
        s.matched_statement = Some(render(body));
    }
    for b in &pattern.fix.blocks {
        let mut nodes = parse_stmts(&b.body);
        for n in nodes.iter_mut() {
            Namer::concretize(namer, n);
        }
        s.blocks.push(ConcreteBlock {
            insertion_anchor: b.insertion_anchor,
            anchor_text: format!("as the body of the method {}", signature(node)),
            code: join_rendered(&nodes),
        });
        s.edits.push(Edit::ReplaceBody(m.node.clone(), nodes));
    }
}

fn indent(text: &str, by: &str) -> String {
    text.lines().map(|l| format!("{by}{l}\n")).collect()
}

pub fn render_suggestion(s: &RepairSuggestion) -> String {
    let mut out = format!("{}:{}: repair for {}\n", s.file, s.line, s.pattern_id);
    for n in &s.notes {
        let _ = writeln!(out, "  {n}");
    }
    match s.kind {
        RepairKind::ExpressionReplacement => {
            let alts = s.alternatives.join(", ");
            for t in &s.targets {
                let _ = writeln!(out, "  replace {} ({}:{}) with one of: {alts}", t.text, t.file, t.line);
            }
        }
        RepairKind::CodeBlock => {
            if let Some(r) = &s.replacement {
                out.push_str("  Replace the matched statement with:\n");
                out.push_str(&indent(r, "      "));
            } else if s.remove_matched {
                out.push_str("  Remove the matched statement:\n");
                out.push_str(&indent(s.matched_statement.as_deref().unwrap_or(""), "      "));
            }
            for b in &s.blocks {
                if b.insertion_anchor == InsertionAnchor::ReplaceMethodBody {
                    let _ = writeln!(out, "  Use these lines {}:", b.anchor_text);
                } else {
                    let _ = writeln!(out, "  Add these lines {}:", b.anchor_text);
                }
                out.push_str(&indent(&b.code, "      "));
            }
        }
    }
    out
}

/// Source text of every unit touched by the suggestion, with the
/// suggestion applied. Used to check that suggestions re-parse.
pub fn splice(s: &RepairSuggestion, model: &ProgramModel) -> BTreeMap<String, String> {
    let mut units: BTreeMap<usize, AstNode> = BTreeMap::new();
    let mut edits: Vec<&Edit> = s.edits.iter().collect();
    edits.sort_by(|a, b| (b.at().unit, &b.at().path).cmp(&(a.at().unit, &a.at().path)).then(a.rank().cmp(&b.rank())));
    for e in edits {
        let r = e.at();
        let unit = units.entry(r.unit).or_insert_with(|| model.units[r.unit].ast.clone());
        apply(unit, e);
    }
    units.into_iter().map(|(u, ast)| (model.units[u].file.clone(), render(&ast))).collect()
}

fn node_mut<'a>(root: &'a mut AstNode, path: &[usize]) -> Option<&'a mut AstNode> {
    let mut n = root;
    for &i in path {
        n = n.children.get_mut(i)?;
    }
    Some(n)
}

fn apply(unit: &mut AstNode, e: &Edit) {
    let path = &e.at().path;
    match e {
        Edit::ReplaceExpr(_, with) | Edit::ReplaceStmt(_, with) => {
            if let Some(n) = node_mut(unit, path) {
                *n = with.clone();
            }
        }
        Edit::ReplaceBody(_, stmts) => {
            if let Some(b) = node_mut(unit, path).and_then(|m| m.children.iter_mut().find(|c| c.kind == NodeKind::Block)) {
                b.children = stmts.clone();
            }
        }
        Edit::Remove(_) | Edit::InsertBefore(..) | Edit::InsertAfter(..) => {
            let Some((&last, parent)) = path.split_last() else { return };
            let Some(p) = node_mut(unit, parent) else { return };
            match e {
                Edit::Remove(_) => {
                    p.children.remove(last);
                }
                Edit::InsertBefore(_, nodes) => {
                    p.children.splice(last..last, nodes.iter().cloned());
                }
                Edit::InsertAfter(_, nodes) => {
                    p.children.splice(last + 1..last + 1, nodes.iter().cloned());
                }
                _ => {}
            }
        }
    }
}
