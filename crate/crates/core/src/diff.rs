//! Statement-level differencing of two compilation units with expression-level
//! refinement of updates.

use serde::{Deserialize, Serialize};

use crate::frontend::render::{item_tokens, texts};
use crate::frontend::{AstNode, NodeKind, NormalizedStmt};

pub const DEFAULT_THRESHOLD: f64 = 0.8;

pub type Path = Vec<usize>;

/// Token-level edit distance with unit costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - distance / max_len` over normalized tokens; two empty statements
/// are identical.
pub fn similarity(a: &NormalizedStmt, b: &NormalizedStmt) -> f64 {
    token_similarity(&a.tokens, &b.tokens)
}

pub fn token_similarity(a: &[String], b: &[String]) -> f64 {
    let max = a.len().max(b.len());
    if max == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EditKind {
    Insert,
    Delete,
    Update,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EditLevel {
    Statement,
    Expression,
}

/// One edit. `a` is a node path in I and `b` a node path in S.
/// An insert places `b` as child number `position` of the item `parent`
/// in S (the empty path is the unit root).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: EditKind,
    pub level: EditLevel,
    pub a: Option<Path>,
    pub b: Option<Path>,
    pub parent: Option<Path>,
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    /// Matched item pairs (I path, S path), updated ones included.
    pub stmt_matches: Vec<(Path, Path)>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn of_kind(&self, kind: EditKind) -> impl Iterator<Item = &EditOp> {
        self.ops.iter().filter(move |o| o.kind == kind)
    }

    pub fn count(&self, kind: EditKind) -> usize {
        self.of_kind(kind).count()
    }

    /// S path matched with the I item at `a`.
    pub fn partner_of(&self, a: &[usize]) -> Option<&Path> {
        self.stmt_matches.iter().find(|(x, _)| x == a).map(|(_, y)| y)
    }

    pub fn partner_in_i(&self, b: &[usize]) -> Option<&Path> {
        self.stmt_matches.iter().find(|(_, y)| y == b).map(|(x, _)| x)
    }
}

/// A differencing unit: a member, a statement, or the header of a
/// compound statement.
#[derive(Debug, Clone)]
pub struct Item {
    pub path: Path,
    pub kind: NodeKind,
    /// Leading comments, as paths of `Comment` nodes.
    pub comments: Vec<Path>,
    pub raw: Vec<String>,
    pub norm: NormalizedStmt,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct ItemTree {
    pub items: Vec<Item>,
    pub roots: Vec<usize>,
}

impl ItemTree {
    pub fn build(unit: &AstNode) -> ItemTree {
        let mut t = ItemTree::default();
        t.roots = t.collect(unit, &[], None);
        t
    }

    pub fn find(&self, path: &[usize]) -> Option<usize> {
        self.items.iter().position(|i| i.path == path)
    }

    fn collect(&mut self, unit_root: &AstNode, container: &[usize], parent: Option<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        for slot in container_slots(unit_root, container) {
            let Slot { path, comments } = slot;
            let node = unit_root.at(&path).expect("slot path");
            let toks = item_view(node, &path, unit_root);
            let idx = self.items.len();
            self.items.push(Item {
                path: path.clone(),
                kind: node.kind,
                comments,
                raw: texts(&toks),
                norm: crate::frontend::normalize::normalize_tokens(&toks),
                children: Vec::new(),
                parent,
            });
            let kids = self.collect(unit_root, &path, Some(idx));
            self.items[idx].children = kids;
            out.push(idx);
        }
        out
    }
}

struct Slot {
    path: Path,
    comments: Vec<Path>,
}

/// Tokens of an item; an `else` branch reads as the keyword alone.
fn item_view(node: &AstNode, path: &[usize], root: &AstNode) -> Vec<crate::frontend::render::RTok> {
    if is_else_branch(path, root) {
        return vec![crate::frontend::render::RTok { text: "else".into(), role: crate::frontend::render::Role::Keyword }];
    }
    item_tokens(node)
}

fn is_else_branch(path: &[usize], root: &AstNode) -> bool {
    match path.split_last() {
        Some((&2, parent)) => root.at(parent).is_some_and(|p| p.kind == NodeKind::If),
        _ => false,
    }
}

/// Child items of the item at `container` (the unit root when empty),
/// each with the comments that precede it.
fn container_slots(root: &AstNode, container: &[usize]) -> Vec<Slot> {
    let node = root.at(container).expect("container path");
    let mut lists: Vec<Path> = Vec::new();
    match node.kind {
        NodeKind::CompilationUnit | NodeKind::ClassDecl | NodeKind::InterfaceDecl => lists.push(container.to_vec()),
        NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
            if let Some(i) = node.children.iter().position(|c| c.kind == NodeKind::Block) {
                lists.push(child(container, i));
            }
        }
        NodeKind::If => {
            let mut out = slots_in(root, &child(container, 1));
            if node.children.len() > 2 {
                out.push(Slot { path: child(container, 2), comments: vec![] });
            }
            return out;
        }
        NodeKind::Try => {
            let mut out = Vec::new();
            for (i, c) in node.children.iter().enumerate() {
                match c.kind {
                    NodeKind::Block => out.extend(slots_in(root, &child(container, i))),
                    NodeKind::CatchClause | NodeKind::Finally => out.push(Slot { path: child(container, i), comments: vec![] }),
                    _ => {}
                }
            }
            return out;
        }
        NodeKind::CatchClause => lists.push(child(container, 1)),
        NodeKind::Finally => lists.push(child(container, 0)),
        NodeKind::Block => lists.push(container.to_vec()),
        _ => {}
    }
    lists.into_iter().flat_map(|p| slots_in(root, &p)).collect()
}

fn slots_in(root: &AstNode, list: &[usize]) -> Vec<Slot> {
    let node = root.at(list).expect("list path");
    let mut out = Vec::new();
    let mut pending = Vec::new();
    for (i, c) in node.children.iter().enumerate() {
        match c.kind {
            NodeKind::Comment => pending.push(child(list, i)),
            k if is_item_kind(k) => out.push(Slot { path: child(list, i), comments: std::mem::take(&mut pending) }),
            _ => {}
        }
    }
    out
}

fn is_item_kind(k: NodeKind) -> bool {
    k.is_statement()
        || matches!(
            k,
            NodeKind::ClassDecl | NodeKind::InterfaceDecl | NodeKind::MethodDecl | NodeKind::ConstructorDecl | NodeKind::FieldDecl
        )
}

fn child(p: &[usize], i: usize) -> Path {
    let mut v = p.to_vec();
    v.push(i);
    v
}

pub fn diff(i: &AstNode, s: &AstNode) -> EditScript {
    diff_with(i, s, DEFAULT_THRESHOLD)
}

pub fn diff_with(i: &AstNode, s: &AstNode, threshold: f64) -> EditScript {
    let ti = ItemTree::build(i);
    let ts = ItemTree::build(s);
    let mut d = Differ { i, s, ti: &ti, ts: &ts, th: threshold, script: EditScript::default() };
    d.level(&ti.roots, &ts.roots, &[]);
    d.script
}

struct Differ<'a> {
    i: &'a AstNode,
    s: &'a AstNode,
    ti: &'a ItemTree,
    ts: &'a ItemTree,
    th: f64,
    script: EditScript,
}

impl Differ<'_> {
    fn level(&mut self, ai: &[usize], bs: &[usize], s_parent: &[usize]) {
        let pairs = match_items(self.ti, self.ts, ai, bs, self.th);
        let matched_a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let matched_b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        for &x in ai {
            if !matched_a.contains(&x) {
                self.delete_subtree(x);
            }
        }
        for (pos, &y) in bs.iter().enumerate() {
            if let Some(&(x, _)) = pairs.iter().find(|p| p.1 == y) {
                let (ia, ib) = (&self.ti.items[x], &self.ts.items[y]);
                self.script.stmt_matches.push((ia.path.clone(), ib.path.clone()));
                if ia.raw != ib.raw {
                    let a_node = self.i.at(&ia.path).expect("item");
                    let b_node = self.s.at(&ib.path).expect("item");
                    for (ra, rb) in refine_update(a_node, b_node) {
                        let level = if ra.is_empty() { EditLevel::Statement } else { EditLevel::Expression };
                        self.script.ops.push(EditOp {
                            kind: EditKind::Update,
                            level,
                            a: Some([ia.path.clone(), ra].concat()),
                            b: Some([ib.path.clone(), rb].concat()),
                            parent: None,
                            position: 0,
                        });
                    }
                }
                let (ca, cb) = (ia.children.clone(), ib.children.clone());
                let sp = ib.path.clone();
                self.level(&ca, &cb, &sp);
            } else {
                debug_assert!(!matched_b.contains(&y));
                self.insert_subtree(y, s_parent, pos);
            }
        }
    }

    fn delete_subtree(&mut self, x: usize) {
        let it = &self.ti.items[x];
        self.script.ops.push(EditOp {
            kind: EditKind::Delete,
            level: EditLevel::Statement,
            a: Some(it.path.clone()),
            b: None,
            parent: None,
            position: 0,
        });
        for c in it.children.clone() {
            self.delete_subtree(c);
        }
    }

    fn insert_subtree(&mut self, y: usize, parent: &[usize], pos: usize) {
        let it = &self.ts.items[y];
        self.script.ops.push(EditOp {
            kind: EditKind::Insert,
            level: EditLevel::Statement,
            a: None,
            b: Some(it.path.clone()),
            parent: Some(parent.to_vec()),
            position: pos,
        });
        let p = it.path.clone();
        for (k, c) in it.children.clone().into_iter().enumerate() {
            self.insert_subtree(c, &p, k);
        }
    }
}

/// Order-preserving matching of sibling items: exact text first, then
/// greedy best-first by similarity with source-order ties; crossing pairs
/// are dropped.
fn match_items(ti: &ItemTree, ts: &ItemTree, ai: &[usize], bs: &[usize], th: f64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut used_a = vec![false; ai.len()];
    let mut used_b = vec![false; bs.len()];
    for (x, &a) in ai.iter().enumerate() {
        for (y, &b) in bs.iter().enumerate() {
            if !used_b[y] && ti.items[a].kind == ts.items[b].kind && ti.items[a].raw == ts.items[b].raw {
                used_a[x] = true;
                used_b[y] = true;
                pairs.push((x, y));
                break;
            }
        }
    }
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for (x, &a) in ai.iter().enumerate() {
        for (y, &b) in bs.iter().enumerate() {
            if used_a[x] || used_b[y] || ti.items[a].kind != ts.items[b].kind {
                continue;
            }
            let sim = similarity(&ti.items[a].norm, &ts.items[b].norm);
            if sim >= th {
                cands.push((sim, x, y));
            }
        }
    }
    cands.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    for (_, x, y) in cands {
        if !used_a[x] && !used_b[y] {
            used_a[x] = true;
            used_b[y] = true;
            pairs.push((x, y));
        }
    }
    pairs.sort();
    let kept = longest_increasing(&pairs);
    kept.into_iter().map(|(x, y)| (ai[x], bs[y])).collect()
}

/// Longest chain of pairs increasing in both coordinates (input sorted by
/// the first); earlier pairs win ties.
fn longest_increasing(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let n = pairs.len();
    let mut len = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..j {
            if pairs[i].1 < pairs[j].1 && len[i] + 1 > len[j] {
                len[j] = len[i] + 1;
                prev[j] = i;
            }
        }
    }
    let Some(mut end) = (0..n).max_by(|&a, &b| len[a].cmp(&len[b]).then(b.cmp(&a))) else {
        return vec![];
    };
    let mut out = Vec::new();
    loop {
        out.push(pairs[end]);
        if prev[end] == usize::MAX {
            break;
        }
        end = prev[end];
    }
    out.reverse();
    out
}

/// Children compared when refining: the header part of an item, without
/// nested statement lists, comments or anonymous class bodies' members.
fn header_children(n: &AstNode) -> Vec<usize> {
    let skip_blocks = matches!(
        n.kind,
        NodeKind::MethodDecl
            | NodeKind::ConstructorDecl
            | NodeKind::If
            | NodeKind::Try
            | NodeKind::CatchClause
            | NodeKind::Finally
            | NodeKind::ClassDecl
            | NodeKind::InterfaceDecl
            | NodeKind::Block
    );
    n.children
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind != NodeKind::Comment)
        .filter(|(_, c)| !(skip_blocks && (is_item_kind(c.kind) || matches!(c.kind, NodeKind::CatchClause | NodeKind::Finally))))
        .map(|(i, _)| i)
        .collect()
}

/// Top-down simultaneous traversal of two matched items. Returns relative
/// path pairs of the maximal differing subtrees; a single pair of empty
/// paths when the roots themselves differ.
pub fn refine_update(a: &AstNode, b: &AstNode) -> Vec<(Path, Path)> {
    let mut out = Vec::new();
    if a.kind != b.kind {
        return vec![(vec![], vec![])];
    }
    refine(a, b, &mut vec![], &mut vec![], &mut out, true);
    out
}

fn refine(a: &AstNode, b: &AstNode, pa: &mut Path, pb: &mut Path, out: &mut Vec<(Path, Path)>, root: bool) {
    let (ca, cb) = if root { (header_children(a), header_children(b)) } else {
        let f = |n: &AstNode| (0..n.children.len()).filter(|&i| n.children[i].kind != NodeKind::Comment).collect::<Vec<_>>();
        (f(a), f(b))
    };
    let same_shape = a.kind == b.kind && a.text == b.text && ca.len() == cb.len();
    if !same_shape {
        // an argument list is not an expression: report the whole call
        if a.kind == NodeKind::Args && b.kind == NodeKind::Args && !pa.is_empty() && !pb.is_empty() {
            out.push((pa[..pa.len() - 1].to_vec(), pb[..pb.len() - 1].to_vec()));
            return;
        }
        out.push((pa.clone(), pb.clone()));
        return;
    }
    for (&x, &y) in ca.iter().zip(&cb) {
        pa.push(x);
        pb.push(y);
        refine(&a.children[x], &b.children[y], pa, pb, out, false);
        pa.pop();
        pb.pop();
    }
}

/// Replay a script on I's item tree: drop deleted items, substitute
/// updated subtrees, then place inserts. Returns the preorder list of item
/// token texts, which equals that of S for a sound script.
pub fn replay(i: &AstNode, s: &AstNode, script: &EditScript) -> Vec<Vec<String>> {
    let ti = ItemTree::build(i);
    let ts = ItemTree::build(s);
    let r = Replayer { i, s, script };
    let mut root = RNode { key: Some(vec![]), toks: vec![], kids: r.kids(&ti, &ti.roots) };
    for op in script.of_kind(EditKind::Insert) {
        let (Some(b), Some(parent)) = (&op.b, &op.parent) else { continue };
        let idx = ts.find(b).expect("inserted item");
        let node = RNode { key: Some(b.clone()), toks: ts.items[idx].raw.clone(), kids: vec![] };
        if let Some(p) = root.find_mut(parent) {
            let pos = op.position.min(p.kids.len());
            p.kids.insert(pos, node);
        }
    }
    let mut out = Vec::new();
    root.flatten(&mut out);
    out
}

struct RNode {
    key: Option<Path>,
    toks: Vec<String>,
    kids: Vec<RNode>,
}

impl RNode {
    fn find_mut(&mut self, key: &[usize]) -> Option<&mut RNode> {
        if self.key.as_deref() == Some(key) {
            return Some(self);
        }
        self.kids.iter_mut().find_map(|k| k.find_mut(key))
    }

    fn flatten(&self, out: &mut Vec<Vec<String>>) {
        for k in &self.kids {
            out.push(k.toks.clone());
            k.flatten(out);
        }
    }
}

struct Replayer<'a> {
    i: &'a AstNode,
    s: &'a AstNode,
    script: &'a EditScript,
}

impl Replayer<'_> {
    fn kids(&self, t: &ItemTree, idxs: &[usize]) -> Vec<RNode> {
        idxs.iter().filter_map(|&c| self.item(t, c)).collect()
    }

    fn item(&self, t: &ItemTree, idx: usize) -> Option<RNode> {
        let it = &t.items[idx];
        if self.script.of_kind(EditKind::Delete).any(|o| o.a.as_ref() == Some(&it.path)) {
            return None;
        }
        let s_path = self.script.partner_of(&it.path).cloned();
        let mut node = self.i.at(&it.path).expect("item").clone();
        let mut whole = None;
        if let Some(sp) = &s_path {
            for op in self.script.of_kind(EditKind::Update) {
                let (Some(a), Some(b)) = (&op.a, &op.b) else { continue };
                if !a.starts_with(&it.path) || !b.starts_with(sp) {
                    continue;
                }
                let rel = &a[it.path.len()..];
                if rel.is_empty() {
                    whole = Some(b.clone());
                } else if let Some(slot) = at_mut(&mut node, rel) {
                    *slot = self.s.at(b).expect("update target").clone();
                }
            }
        }
        let toks = match whole {
            Some(b) => header_tokens(self.s, &b),
            None if is_else_branch(&it.path, self.i) => vec!["else".to_string()],
            None => texts(&item_tokens(&node)),
        };
        Some(RNode { key: s_path, toks, kids: self.kids(t, &it.children) })
    }
}

fn header_tokens(root: &AstNode, path: &[usize]) -> Vec<String> {
    if is_else_branch(path, root) {
        return vec!["else".into()];
    }
    texts(&item_tokens(root.at(path).expect("path")))
}

fn at_mut<'n>(n: &'n mut AstNode, path: &[usize]) -> Option<&'n mut AstNode> {
    let mut cur = n;
    for &i in path {
        cur = cur.children.get_mut(i)?;
    }
    Some(cur)
}

/// Preorder item token texts of a unit.
pub fn item_sequence(unit: &AstNode) -> Vec<Vec<String>> {
    let t = ItemTree::build(unit);
    let mut out = Vec::new();
    fn go(t: &ItemTree, idx: usize, out: &mut Vec<Vec<String>>) {
        out.push(t.items[idx].raw.clone());
        for &c in &t.items[idx].children {
            go(t, c, out);
        }
    }
    for &r in &t.roots {
        go(&t, r, &mut out);
    }
    out
}
