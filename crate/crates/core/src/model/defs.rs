//! Reaching definitions for locals on the structured AST.
//!
//! The subset has no loops, so one forward pass suffices: branches are
//! walked on copies of the environment and joined by union.

use std::collections::{BTreeMap, HashMap};

use crate::frontend::{AstNode, NodeKind};

use super::NodeRef;

/// A definition of a local variable reaching some use.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalDef {
    /// Assigned from an expression inside statement `stmt`.
    Expr { stmt: NodeRef, expr: NodeRef },
    /// Value of the formal parameter at this index.
    Param(usize),
    /// Filled by a randomness API used as an out-parameter.
    /// `prior` keeps the earlier definitions, which still fix the length.
    Random { stmt: NodeRef, prior: Vec<LocalDef> },
    /// Declared without initializer and never assigned.
    Uninit { stmt: NodeRef },
    /// Bound by a catch clause.
    Opaque { stmt: NodeRef },
}

/// An assignment whose target is not a local: a field or static member.
#[derive(Debug, Clone)]
pub struct NonLocalAssign {
    pub target: NodeRef,
    pub stmt: NodeRef,
    pub value: NodeRef,
}

#[derive(Debug, Default)]
pub struct DefUse {
    /// use-site path of a `Name` -> definitions reaching it
    pub uses: HashMap<Vec<usize>, Vec<LocalDef>>,
    pub nonlocal_assigns: Vec<NonLocalAssign>,
}

type Env = BTreeMap<String, Vec<LocalDef>>;

/// Methods whose first argument receives fresh random bytes.
pub const RANDOM_OUT_PARAM: &[&str] = &["nextBytes"];

pub struct Walker<'a> {
    unit_idx: usize,
    unit: &'a AstNode,
    out: DefUse,
}

fn join(a: &Env, b: &Env) -> Env {
    let mut out = a.clone();
    for (k, defs) in b {
        let e = out.entry(k.clone()).or_default();
        for d in defs {
            if !e.contains(d) {
                e.push(d.clone());
            }
        }
    }
    out
}

/// Drop variables declared inside a block once it ends.
fn scoped(outer: &Env, inner: Env) -> Env {
    inner.into_iter().filter(|(k, _)| outer.contains_key(k)).collect()
}

impl<'a> Walker<'a> {
    pub fn new(unit_idx: usize, unit: &'a AstNode) -> Self {
        Walker { unit_idx, unit, out: DefUse::default() }
    }

    fn r(&self, path: &[usize]) -> NodeRef {
        NodeRef::new(self.unit_idx, path.to_vec())
    }

    fn node(&self, path: &[usize]) -> &'a AstNode {
        self.unit.at(path).expect("valid path")
    }

    /// Walk a method (or the unit's top-level statements when `params` is
    /// empty and `body` is the unit root).
    pub fn walk_method(mut self, params: &[String], body: Option<&[usize]>, top_level: bool) -> DefUse {
        let mut env = Env::new();
        for (i, p) in params.iter().enumerate() {
            env.insert(p.clone(), vec![LocalDef::Param(i)]);
        }
        if let Some(body) = body {
            let node = self.node(body);
            let mut path = body.to_vec();
            for (i, c) in node.children.iter().enumerate() {
                if top_level && !c.kind.is_statement() {
                    continue;
                }
                path.push(i);
                env = self.stmt(&path, env);
                path.pop();
            }
        }
        self.out
    }

    fn block(&mut self, path: &[usize], env: Env) -> Env {
        let node = self.node(path);
        let outer = env.clone();
        let mut env = env;
        let mut p = path.to_vec();
        for i in 0..node.children.len() {
            p.push(i);
            env = self.stmt(&p, env);
            p.pop();
        }
        scoped(&outer, env)
    }

    fn stmt(&mut self, path: &[usize], mut env: Env) -> Env {
        let node = self.node(path);
        let sref = self.r(path);
        let child = |i: usize| {
            let mut p = path.to_vec();
            p.push(i);
            p
        };
        match node.kind {
            NodeKind::LocalVarDecl => {
                let init_idx = node
                    .children
                    .iter()
                    .position(|c| !matches!(c.kind, NodeKind::TypeRef | NodeKind::Modifier | NodeKind::Annotation));
                let def = match init_idx {
                    Some(i) => {
                        self.expr(&child(i), &mut env, &sref);
                        LocalDef::Expr { stmt: sref.clone(), expr: self.r(&child(i)) }
                    }
                    None => LocalDef::Uninit { stmt: sref.clone() },
                };
                env.insert(node.text.clone(), vec![def]);
                env
            }
            NodeKind::ExprStmt | NodeKind::Return | NodeKind::Throw => {
                for i in 0..node.children.len() {
                    self.expr(&child(i), &mut env, &sref);
                }
                env
            }
            NodeKind::Block => self.block(path, env),
            NodeKind::If => {
                self.expr(&child(0), &mut env, &sref);
                let then_env = self.block(&child(1), env.clone());
                let else_env = if node.children.len() > 2 { self.block(&child(2), env.clone()) } else { env };
                join(&then_env, &else_env)
            }
            NodeKind::Try => {
                let before = env.clone();
                let mut after = before.clone();
                let mut try_env = before.clone();
                for (i, c) in node.children.iter().enumerate() {
                    match c.kind {
                        NodeKind::Block => {
                            try_env = self.block(&child(i), before.clone());
                            after = try_env.clone();
                        }
                        NodeKind::CatchClause => {
                            let mut cenv = join(&before, &try_env);
                            let outer = cenv.clone();
                            cenv.insert(c.text.clone(), vec![LocalDef::Opaque { stmt: self.r(&child(i)) }]);
                            let mut body = child(i);
                            body.push(1);
                            let cenv = self.block(&body, cenv);
                            after = join(&after, &scoped(&outer, cenv));
                        }
                        NodeKind::Finally => {
                            let mut body = child(i);
                            body.push(0);
                            let joined = join(&after, &before);
                            after = self.block(&body, joined);
                        }
                        _ => {}
                    }
                }
                after
            }
            _ => env,
        }
    }

    /// Visit an expression in evaluation order, recording uses and
    /// applying the definitions it performs.
    fn expr(&mut self, path: &[usize], env: &mut Env, sref: &NodeRef) {
        let node = self.node(path);
        let child = |i: usize| {
            let mut p = path.to_vec();
            p.push(i);
            p
        };
        match node.kind {
            NodeKind::Name => {
                if let Some(defs) = env.get(&node.text) {
                    self.out.uses.insert(path.to_vec(), defs.clone());
                }
            }
            NodeKind::Assign => {
                self.expr(&child(1), env, sref);
                let lhs = &node.children[0];
                let value = LocalDef::Expr { stmt: sref.clone(), expr: self.r(&child(1)) };
                match lhs.kind {
                    NodeKind::Name if env.contains_key(&lhs.text) => {
                        if node.text == "=" {
                            env.insert(lhs.text.clone(), vec![value]);
                        } else {
                            // compound assignment also reads the old value
                            self.out.uses.insert(child(0), env[&lhs.text].clone());
                            env.get_mut(&lhs.text).expect("present").push(value);
                        }
                    }
                    NodeKind::ArrayAccess => {
                        self.expr(&child(0), env, sref);
                        if let Some(arr) = lhs.children.first().filter(|a| a.kind == NodeKind::Name) {
                            if let Some(defs) = env.get_mut(&arr.text) {
                                if !defs.contains(&value) {
                                    defs.push(value);
                                }
                            }
                        }
                    }
                    NodeKind::Name | NodeKind::FieldAccess => {
                        if lhs.kind == NodeKind::FieldAccess {
                            let mut t = child(0);
                            t.push(0);
                            self.expr(&t, env, sref);
                        }
                        self.out.nonlocal_assigns.push(NonLocalAssign {
                            target: self.r(&child(0)),
                            stmt: sref.clone(),
                            value: self.r(&child(1)),
                        });
                    }
                    _ => self.expr(&child(0), env, sref),
                }
            }
            NodeKind::ObjectCreation => {
                // anonymous class bodies are separate methods
                if let Some(args_idx) = node.children.iter().position(|c| c.kind == NodeKind::Args) {
                    self.expr(&child(args_idx), env, sref);
                }
            }
            NodeKind::MethodCall => {
                for i in 0..node.children.len() {
                    self.expr(&child(i), env, sref);
                }
                if RANDOM_OUT_PARAM.contains(&node.text.as_str()) && node.receiver().is_some() {
                    if let Some(arg) = node.args().first().filter(|a| a.kind == NodeKind::Name) {
                        if let Some(prior) = env.get(&arg.text).cloned() {
                            env.insert(arg.text.clone(), vec![LocalDef::Random { stmt: sref.clone(), prior }]);
                        }
                    }
                }
            }
            NodeKind::Conditional => {
                self.expr(&child(0), env, sref);
                let mut a = env.clone();
                self.expr(&child(1), &mut a, sref);
                let mut b = env.clone();
                self.expr(&child(2), &mut b, sref);
                *env = join(&a, &b);
            }
            NodeKind::ClassBody => {}
            _ => {
                for i in 0..node.children.len() {
                    self.expr(&child(i), env, sref);
                }
            }
        }
    }
}
