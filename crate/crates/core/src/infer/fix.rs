//! Abstract fix: the new version of updated code, inserted statements and
//! members, and instructional comments from the secure example.

use crate::diff::{EditKind, EditOp, ItemTree, Path};
use crate::frontend::render::{expr_str, render};
use crate::frontend::{AstNode, NodeKind};
use crate::pattern::{AbstractFix, FixBlock, FixKind, FixTarget, InsertionAnchor};

use super::{ports, stmt_of, Abstractor, CriticalSite, PairAnalysis, Port};

pub fn extract_fix(a: &PairAnalysis, site: &CriticalSite, abs: &mut Abstractor) -> (AbstractFix, Vec<String>) {
    let e = &a.script;
    let updates = e.count(EditKind::Update);
    if updates == 1 && e.count(EditKind::Insert) == 0 && e.count(EditKind::Delete) == 0 {
        return (expr_fix(a, site, abs), vec![]);
    }
    if let Some(mid) = site.method {
        return override_fix(a, mid, abs);
    }
    block_fix(a, site, abs)
}

fn expr_fix(a: &PairAnalysis, site: &CriticalSite, abs: &mut Abstractor) -> AbstractFix {
    let op = a.script.of_kind(EditKind::Update).next().expect("one update");
    let (pa, pb) = (op.a.clone().unwrap_or_default(), op.b.clone().unwrap_or_default());
    let new_node = a.s_ast().at(&pb).expect("update target");
    let replacement = expr_or_stmt(&abs.abstract_node(new_node));
    let target = site.call.as_ref().map(|call| {
        if call.path == pa {
            return FixTarget::Call;
        }
        match ports(&a.model_i, call).into_iter().find(|(_, p)| pa.starts_with(&p.path)).map(|(p, _)| p).or(site.port) {
            Some(Port::Arg(i)) => FixTarget::ArgOrigin(i),
            Some(Port::Receiver) => FixTarget::ReceiverOrigin,
            None => FixTarget::Call,
        }
    });
    AbstractFix { kind: FixKind::Expr, target, replacement: Some(replacement), blocks: vec![], remove_matched: false, notes: vec![] }
}

fn expr_or_stmt(n: &AstNode) -> String {
    if n.kind.is_statement() || n.kind.is_method_like() || n.kind == NodeKind::FieldDecl {
        render(n)
    } else {
        expr_str(n)
    }
}

/// Comments of a node and its descendants, verbatim.
fn comments_in(n: &AstNode, out: &mut Vec<String>) {
    for c in n.walk() {
        if c.kind == NodeKind::Comment && !out.contains(&c.text) {
            out.push(c.text.clone());
        }
    }
}

fn override_fix(a: &PairAnalysis, mid: usize, abs: &mut Abstractor) -> (AbstractFix, Vec<String>) {
    let mpath = &a.model_i.methods[mid].node.path;
    let mut notes = Vec::new();
    let mut blocks = Vec::new();
    if let Some(sp) = a.script.partner_of(mpath) {
        let method = a.s_ast().at(sp).expect("partner method");
        if let Some(body) = method.body() {
            comments_in(body, &mut notes);
            let body = abs.abstract_node(body);
            let text: Vec<String> = body.children.iter().map(render).collect();
            blocks.push(FixBlock { insertion_anchor: InsertionAnchor::ReplaceMethodBody, body: text.join("\n") });
        }
    }
    let fix = AbstractFix { kind: FixKind::Block, target: None, replacement: None, blocks, remove_matched: false, notes: notes.clone() };
    (fix, vec![])
}

fn is_member_container(s: &AstNode, parent: &[usize]) -> bool {
    parent.is_empty() || s.at(parent).is_some_and(|n| n.kind.is_type_decl())
}

fn block_fix(a: &PairAnalysis, site: &CriticalSite, abs: &mut Abstractor) -> (AbstractFix, Vec<String>) {
    let s = a.s_ast();
    let ts = ItemTree::build(s);
    let mut diagnostics = Vec::new();
    let mut notes = Vec::new();
    let call = site.call.as_ref().expect("invocation site");
    let crit_i = stmt_of(&a.model_i, call).path;
    let crit_s: Option<Path> = a.script.partner_of(&crit_i).cloned();

    let inserted: Vec<&EditOp> = a.script.of_kind(EditKind::Insert).collect();
    let is_inserted = |p: &Path| inserted.iter().any(|o| o.b.as_ref() == Some(p));
    let roots: Vec<&EditOp> = inserted
        .iter()
        .copied()
        .filter(|o| !o.parent.as_ref().is_some_and(|p| is_inserted(p)))
        .collect();

    let mut remove_matched = false;
    let mut replacement_path: Option<Path> = None;
    match &crit_s {
        Some(sp) => {
            let changed = a.script.of_kind(EditKind::Update).any(|o| o.a.as_ref().is_some_and(|p| p.starts_with(&crit_i)));
            if changed {
                replacement_path = Some(sp.clone());
            }
        }
        None => {
            remove_matched = true;
            replacement_path = slot_replacement(a, &ts, &crit_i, &roots);
        }
    }
    // S statement the others are positioned against
    let pivot = crit_s.clone().or_else(|| replacement_path.clone());
    let crit_method_s = pivot.as_ref().and_then(|p| enclosing_method(s, p));

    let mut replacement = None;
    if let Some(rp) = &replacement_path {
        let n = s.at(rp).expect("replacement");
        comments_in(n, &mut notes);
        replacement = Some(render(&abs.abstract_node(n)));
    }

    let mut blocks: Vec<FixBlock> = Vec::new();
    for op in roots {
        let b = op.b.clone().expect("insert target");
        if Some(&b) == replacement_path.as_ref() {
            continue;
        }
        let parent = op.parent.clone().unwrap_or_default();
        let anchor = if is_member_container(s, &parent) {
            InsertionAnchor::BeforeContainerMethod
        } else if crit_method_s.is_some() && enclosing_method(s, &b) == crit_method_s {
            if pivot.as_ref().is_some_and(|p| &b < p) {
                InsertionAnchor::BeforeMatchedStatement
            } else {
                InsertionAnchor::AfterMatchedStatement
            }
        } else {
            diagnostics.push(format!("insertion at line {} is outside the critical method and is not part of the fix", line_of(s, &b)));
            continue;
        };
        let mut text = String::new();
        if let Some(idx) = ts.find(&b) {
            for c in &ts.items[idx].comments {
                let cn = s.at(c).expect("comment");
                notes.push(cn.text.clone());
                text.push_str(&cn.text);
                text.push('\n');
            }
        }
        let n = s.at(&b).expect("inserted");
        comments_in(n, &mut notes);
        text.push_str(&render(&abs.abstract_node(n)));
        match blocks.last_mut() {
            Some(last) if last.insertion_anchor == anchor => {
                last.body.push('\n');
                last.body.push_str(&text);
            }
            _ => blocks.push(FixBlock { insertion_anchor: anchor, body: text }),
        }
    }
    notes.dedup();
    let fix = AbstractFix { kind: FixKind::Block, target: None, replacement, blocks, remove_matched, notes };
    (fix, diagnostics)
}

fn line_of(s: &AstNode, p: &[usize]) -> u32 {
    s.at(p).map(|n| n.line()).unwrap_or(0)
}

/// Path of the method or constructor enclosing `p`.
fn enclosing_method(s: &AstNode, p: &[usize]) -> Option<Path> {
    (0..=p.len()).rev().map(|k| &p[..k]).find(|q| s.at(q).is_some_and(|n| n.kind.is_method_like())).map(|q| q.to_vec())
}

/// For a deleted critical statement, the statement inserted in its place:
/// the first insertion in the partner container after the matched
/// siblings that preceded it.
fn slot_replacement(a: &PairAnalysis, ts: &ItemTree, crit_i: &[usize], roots: &[&EditOp]) -> Option<Path> {
    let ti = ItemTree::build(a.i_ast());
    let ci = ti.find(crit_i)?;
    let siblings: Vec<usize> = match ti.items[ci].parent {
        Some(p) => ti.items[p].children.clone(),
        None => ti.roots.clone(),
    };
    let s_parent: Path = match ti.items[ci].parent {
        Some(p) => a.script.partner_of(&ti.items[p].path)?.clone(),
        None => vec![],
    };
    let before: Vec<&Path> = siblings
        .iter()
        .take_while(|&&x| x != ci)
        .filter_map(|&x| a.script.partner_of(&ti.items[x].path))
        .collect();
    let s_siblings: Vec<Path> = match ts.find(&s_parent) {
        Some(p) => ts.items[p].children.iter().map(|&x| ts.items[x].path.clone()).collect(),
        None => ts.roots.iter().map(|&x| ts.items[x].path.clone()).collect(),
    };
    let start = match before.last() {
        Some(last) => s_siblings.iter().position(|p| p == *last)? + 1,
        None => 0,
    };
    let candidate = s_siblings.get(start)?;
    roots.iter().any(|o| o.b.as_ref() == Some(candidate)).then(|| candidate.clone())
}
