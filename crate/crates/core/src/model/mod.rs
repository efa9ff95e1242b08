//! Whole-program model: class, field and method tables, an approximate
//! call graph and per-method def-use information.

mod defs;
pub mod slice;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frontend::ast::simple_type_name;
use crate::frontend::binding::resolve_binding_with;
use crate::frontend::render::{dotted, is_type_like};
use crate::frontend::{parse_unit, ApiBinding, ApiTable, AstNode, NodeKind, ParseError};

pub use defs::{LocalDef, RANDOM_OUT_PARAM};
pub use slice::{backward_slice, backward_slice_many, const_origin, ConstOrigin, Endpoint, EndpointKind, OriginKind, Slice};

/// Location of a node: unit index plus child-index path from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub unit: usize,
    pub path: Vec<usize>,
}

impl NodeRef {
    pub fn new(unit: usize, path: Vec<usize>) -> Self {
        NodeRef { unit, path }
    }

    pub fn child(&self, i: usize) -> NodeRef {
        let mut path = self.path.clone();
        path.push(i);
        NodeRef { unit: self.unit, path }
    }

    /// Whether `self` lies inside the subtree rooted at `other`.
    pub fn is_within(&self, other: &NodeRef) -> bool {
        self.unit == other.unit && self.path.starts_with(&other.path)
    }
}

/// Evaluation context of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctx {
    Method(usize),
    /// Field initializer of a class.
    Class(usize),
}

#[derive(Debug, Clone)]
pub struct Unit {
    pub file: String,
    pub ast: AstNode,
}

#[derive(Debug, Clone)]
pub struct FieldDef {
    pub stmt: NodeRef,
    pub value: NodeRef,
}

#[derive(Debug, Clone)]
pub struct FieldInfo {
    pub decl: NodeRef,
    pub ty: String,
    pub defs: Vec<FieldDef>,
}

#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub name: String,
    pub unit: usize,
    pub node: NodeRef,
    pub supertypes: Vec<String>,
    pub outer: Option<usize>,
    pub fields: BTreeMap<String, FieldInfo>,
    pub methods: Vec<usize>,
    /// Holder for the top-level members of a classless unit.
    pub pseudo: bool,
}

#[derive(Debug, Clone)]
pub struct MethodInfo {
    pub class: usize,
    pub node: NodeRef,
    pub name: String,
    pub params: Vec<(String, String)>,
    pub is_ctor: bool,
    /// Top-level statements of a unit, modelled as a method.
    pub top_level: bool,
    /// Declared local variable types.
    pub locals: BTreeMap<String, String>,
    pub uses: HashMap<Vec<usize>, Vec<LocalDef>>,
    pub override_binding: Option<ApiBinding>,
}

impl MethodInfo {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone)]
pub struct CallSite {
    pub node: NodeRef,
    pub ctx: Ctx,
    pub binding: ApiBinding,
    /// In-tree candidate callees; empty for external calls.
    pub callees: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Location {
    pub ctx: Option<Ctx>,
    pub class: Option<usize>,
    /// Innermost enclosing statement or field declaration.
    pub stmt: Option<NodeRef>,
}

#[derive(Debug, Default)]
pub struct ProgramModel {
    pub units: Vec<Unit>,
    pub classes: Vec<ClassInfo>,
    pub methods: Vec<MethodInfo>,
    pub calls: BTreeMap<NodeRef, CallSite>,
    pub callers: HashMap<usize, Vec<NodeRef>>,
    class_by_node: HashMap<NodeRef, usize>,
    method_by_node: HashMap<NodeRef, usize>,
    classes_by_name: HashMap<String, Vec<usize>>,
    top_method: HashMap<usize, usize>,
    pseudo_class: HashMap<usize, usize>,
}

fn is_stmt_like(k: NodeKind) -> bool {
    matches!(
        k,
        NodeKind::LocalVarDecl | NodeKind::ExprStmt | NodeKind::Return | NodeKind::Throw | NodeKind::If | NodeKind::FieldDecl
    )
}

impl ProgramModel {
    /// Parse and model a set of `(file name, source)` pairs. All parse
    /// errors are collected; no partial model is returned.
    pub fn build(sources: &[(String, String)]) -> Result<ProgramModel, Vec<ParseError>> {
        let parsed: Vec<Result<AstNode, ParseError>> =
            sources.par_iter().map(|(f, s)| parse_unit(s, f)).collect();
        let mut units = Vec::new();
        let mut errors = Vec::new();
        for ((file, _), r) in sources.iter().zip(parsed) {
            match r {
                Ok(ast) => units.push(Unit { file: file.clone(), ast }),
                Err(e) => errors.push(e),
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self::from_units(units))
    }

    pub fn from_units(units: Vec<Unit>) -> ProgramModel {
        let mut m = ProgramModel { units, ..Default::default() };
        for u in 0..m.units.len() {
            m.collect_classes(u);
        }
        m.index_classes();
        m.collect_defuse();
        m.collect_calls();
        m
    }

    pub fn node(&self, r: &NodeRef) -> &AstNode {
        self.units[r.unit].ast.at(&r.path).expect("NodeRef points into the model")
    }

    pub fn file(&self, r: &NodeRef) -> &str {
        &self.units[r.unit].file
    }

    pub fn line(&self, r: &NodeRef) -> u32 {
        self.node(r).line()
    }

    // ---- construction ----

    fn collect_classes(&mut self, u: usize) {
        let root = NodeRef::new(u, vec![]);
        let pseudo = self.classes.len();
        self.classes.push(ClassInfo {
            name: String::new(),
            unit: u,
            node: root.clone(),
            supertypes: vec![],
            outer: None,
            fields: BTreeMap::new(),
            methods: vec![],
            pseudo: true,
        });
        self.pseudo_class.insert(u, pseudo);
        let unit_ast = self.units[u].ast.clone();
        if unit_ast.children.iter().any(|c| c.kind.is_statement()) {
            let id = self.add_method(pseudo, root.clone(), &unit_ast, true);
            self.top_method.insert(u, id);
        }
        self.collect_members(&unit_ast, &root, pseudo);
    }

    fn collect_members(&mut self, node: &AstNode, at: &NodeRef, class: usize) {
        for (i, c) in node.children.iter().enumerate() {
            let r = at.child(i);
            match c.kind {
                NodeKind::ClassDecl | NodeKind::InterfaceDecl => {
                    let id = self.add_class(c.text.clone(), r.clone(), c.supertypes(), Some(class));
                    self.collect_members(c, &r, id);
                }
                NodeKind::FieldDecl => {
                    self.classes[class].fields.insert(
                        c.text.clone(),
                        FieldInfo { decl: r.clone(), ty: c.decl_type().unwrap_or("").to_string(), defs: vec![] },
                    );
                    if let Some(init) = c.initializer() {
                        let idx = c.children.iter().position(|x| std::ptr::eq(x, init)).expect("child");
                        let value = r.child(idx);
                        self.classes[class].fields.get_mut(&c.text).expect("just inserted").defs.push(FieldDef { stmt: r.clone(), value: value.clone() });
                        self.collect_anonymous(init, &value, class);
                    }
                }
                NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
                    self.add_method(class, r.clone(), c, false);
                    if let Some(bi) = c.children.iter().position(|x| x.kind == NodeKind::Block) {
                        self.collect_anonymous(&c.children[bi], &r.child(bi), class);
                    }
                }
                k if k.is_statement() => self.collect_anonymous(c, &r, class),
                _ => {}
            }
        }
    }

    /// Anonymous class bodies nested anywhere below `node`.
    fn collect_anonymous(&mut self, node: &AstNode, at: &NodeRef, outer: usize) {
        for (i, c) in node.children.iter().enumerate() {
            let r = at.child(i);
            if c.kind == NodeKind::ClassBody {
                let name = format!("{}$anon{}", simple_type_name(&c.text), c.line());
                let id = self.add_class(name, r.clone(), vec![simple_type_name(&c.text).to_string()], Some(outer));
                self.collect_members(c, &r, id);
            } else {
                self.collect_anonymous(c, &r, outer);
            }
        }
    }

    fn add_class(&mut self, name: String, node: NodeRef, supertypes: Vec<String>, outer: Option<usize>) -> usize {
        let id = self.classes.len();
        let unit = node.unit;
        self.class_by_node.insert(node.clone(), id);
        self.classes.push(ClassInfo {
            name,
            unit,
            node,
            supertypes,
            outer,
            fields: BTreeMap::new(),
            methods: vec![],
            pseudo: false,
        });
        id
    }

    fn add_method(&mut self, class: usize, node: NodeRef, ast: &AstNode, top_level: bool) -> usize {
        let id = self.methods.len();
        let params: Vec<(String, String)> =
            ast.params().map(|p| (p.text.clone(), p.decl_type().unwrap_or("").to_string())).collect();
        let mut locals = BTreeMap::new();
        let scan: Vec<&AstNode> = if top_level {
            ast.children.iter().filter(|c| c.kind.is_statement()).collect()
        } else {
            ast.body().into_iter().collect()
        };
        for s in scan {
            for n in s.walk() {
                if matches!(n.kind, NodeKind::LocalVarDecl | NodeKind::CatchClause) {
                    locals.entry(n.text.clone()).or_insert_with(|| n.decl_type().unwrap_or("").to_string());
                }
            }
        }
        if !top_level {
            self.method_by_node.insert(node.clone(), id);
        }
        self.classes[class].methods.push(id);
        self.methods.push(MethodInfo {
            class,
            node,
            name: if top_level { "<top>".into() } else { ast.text.clone() },
            params,
            is_ctor: ast.kind == NodeKind::ConstructorDecl,
            top_level,
            locals,
            uses: HashMap::new(),
            override_binding: None,
        });
        id
    }

    fn index_classes(&mut self) {
        for (i, c) in self.classes.iter().enumerate() {
            if !c.pseudo {
                self.classes_by_name.entry(c.name.clone()).or_default().push(i);
            }
        }
    }

    fn collect_defuse(&mut self) {
        let table = ApiTable::builtin();
        let results: Vec<(defs::DefUse, Option<ApiBinding>)> = self
            .methods
            .par_iter()
            .map(|m| {
                let unit = &self.units[m.node.unit].ast;
                let names: Vec<String> = m.params.iter().map(|p| p.0.clone()).collect();
                let walker = defs::Walker::new(m.node.unit, unit);
                if m.top_level {
                    (walker.walk_method(&names, Some(&m.node.path), true), None)
                } else {
                    let ast = unit.at(&m.node.path).expect("method");
                    let body = ast.children.iter().position(|c| c.kind == NodeKind::Block).map(|i| {
                        let mut p = m.node.path.clone();
                        p.push(i);
                        p
                    });
                    let b = if ast.kind == NodeKind::MethodDecl {
                        let b = resolve_binding_with(table, ast, unit);
                        (b.is_override).then_some(b)
                    } else {
                        None
                    };
                    (walker.walk_method(&names, body.as_deref(), false), b)
                }
            })
            .collect();
        let mut assigns = Vec::new();
        for (i, (du, b)) in results.into_iter().enumerate() {
            self.methods[i].uses = du.uses;
            self.methods[i].override_binding = b;
            for a in du.nonlocal_assigns {
                assigns.push((i, a));
            }
        }
        for (mid, a) in assigns {
            if let Some((class, field)) = self.assigned_field(mid, &a.target) {
                if let Some(f) = self.classes[class].fields.get_mut(&field) {
                    f.defs.push(FieldDef { stmt: a.stmt, value: a.value });
                }
            }
        }
    }

    /// Class and field name written by an assignment target.
    fn assigned_field(&self, mid: usize, target: &NodeRef) -> Option<(usize, String)> {
        let t = self.node(target);
        let class = self.methods[mid].class;
        match t.kind {
            NodeKind::Name => self.find_field(class, &t.text).map(|c| (c, t.text.clone())),
            NodeKind::FieldAccess => {
                let owner = self.target_class(Ctx::Method(mid), &t.children[0])?;
                self.find_field(owner, &t.text).map(|c| (c, t.text.clone()))
            }
            _ => None,
        }
    }

    /// In-tree class denoted by a selection target (`this`, a class name or
    /// a variable of class type).
    pub(crate) fn target_class(&self, ctx: Ctx, target: &AstNode) -> Option<usize> {
        let class = self.ctx_class(ctx);
        match target.kind {
            NodeKind::This => Some(class),
            NodeKind::Name => {
                if let Some(ty) = self.var_type(ctx, &target.text) {
                    return self.class_named(&ty);
                }
                self.class_named(&target.text)
            }
            _ => None,
        }
    }

    pub fn ctx_class(&self, ctx: Ctx) -> usize {
        match ctx {
            Ctx::Method(m) => self.methods[m].class,
            Ctx::Class(c) => c,
        }
    }

    /// Declared type of a variable visible in `ctx`.
    pub fn var_type(&self, ctx: Ctx, name: &str) -> Option<String> {
        if let Ctx::Method(m) = ctx {
            let mi = &self.methods[m];
            if let Some(p) = mi.params.iter().find(|p| p.0 == name) {
                return Some(p.1.clone());
            }
            if let Some(t) = mi.locals.get(name) {
                return Some(t.clone());
            }
        }
        let c = self.find_field(self.ctx_class(ctx), name)?;
        Some(self.classes[c].fields[name].ty.clone())
    }

    pub fn class_named(&self, ty: &str) -> Option<usize> {
        self.classes_by_name.get(simple_type_name(ty)).and_then(|v| v.first().copied())
    }

    fn superclasses(&self, class: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut todo = vec![class];
        while let Some(c) = todo.pop() {
            for s in &self.classes[c].supertypes {
                for &sc in self.classes_by_name.get(s).into_iter().flatten() {
                    if !out.contains(&sc) && sc != class {
                        out.push(sc);
                        todo.push(sc);
                    }
                }
            }
        }
        out
    }

    fn subclasses(&self, class: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut todo = vec![class];
        while let Some(c) = todo.pop() {
            let name = &self.classes[c].name;
            for (i, k) in self.classes.iter().enumerate() {
                if k.supertypes.iter().any(|s| s == name) && !out.contains(&i) && i != class {
                    out.push(i);
                    todo.push(i);
                }
            }
        }
        out
    }

    /// Class declaring field `name` as seen from `class`: the class, its
    /// superclasses, enclosing classes, then the unit's top level.
    pub fn find_field(&self, class: usize, name: &str) -> Option<usize> {
        let mut cur = Some(class);
        while let Some(c) = cur {
            if self.classes[c].fields.contains_key(name) {
                return Some(c);
            }
            for s in self.superclasses(c) {
                if self.classes[s].fields.contains_key(name) {
                    return Some(s);
                }
            }
            cur = self.classes[c].outer;
        }
        let pseudo = self.pseudo_class[&self.classes[class].unit];
        self.classes[pseudo].fields.contains_key(name).then_some(pseudo)
    }

    fn methods_named(&self, class: usize, name: &str, arity: usize, dispatch: bool) -> Vec<usize> {
        let mut classes = vec![class];
        classes.extend(self.superclasses(class));
        if dispatch {
            classes.extend(self.subclasses(class));
        }
        let mut out = Vec::new();
        for c in classes {
            for &m in &self.classes[c].methods {
                let mi = &self.methods[m];
                if mi.name == name && mi.arity() == arity && !mi.is_ctor && !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }

    fn ctors(&self, class: usize, arity: usize) -> Vec<usize> {
        self.classes[class]
            .methods
            .iter()
            .copied()
            .filter(|&m| self.methods[m].is_ctor && self.methods[m].arity() == arity)
            .collect()
    }

    fn collect_calls(&mut self) {
        let table = ApiTable::builtin();
        let mut found: Vec<(NodeRef, Ctx)> = Vec::new();
        for (u, unit) in self.units.iter().enumerate() {
            collect_call_nodes(&unit.ast, &NodeRef::new(u, vec![]), &mut found);
        }
        let sites: Vec<CallSite> = found
            .par_iter()
            .filter_map(|(r, _)| {
                let ctx = self.locate(r).ctx?;
                let node = self.node(r);
                let binding = resolve_binding_with(table, node, &self.units[r.unit].ast);
                let callees = self.resolve_callees(ctx, node);
                Some(CallSite { node: r.clone(), ctx, binding, callees })
            })
            .collect();
        for s in sites {
            for &c in &s.callees {
                self.callers.entry(c).or_default().push(s.node.clone());
            }
            self.calls.insert(s.node.clone(), s);
        }
        for v in self.callers.values_mut() {
            v.sort();
        }
    }

    fn resolve_callees(&self, ctx: Ctx, call: &AstNode) -> Vec<usize> {
        let class = self.ctx_class(ctx);
        let arity = call.args().len();
        match call.kind {
            NodeKind::ObjectCreation => {
                if call.class_body().is_some() {
                    return vec![];
                }
                match self.class_named(&call.text) {
                    Some(c) => self.ctors(c, arity),
                    None => vec![],
                }
            }
            NodeKind::MethodCall => match call.receiver() {
                None if call.text == "this" => self.ctors(class, arity),
                None if call.text == "super" => {
                    self.superclasses(class).into_iter().flat_map(|s| self.ctors(s, arity)).collect()
                }
                None => {
                    let mut cur = Some(class);
                    while let Some(c) = cur {
                        let found = self.methods_named(c, &call.text, arity, true);
                        if !found.is_empty() {
                            return found;
                        }
                        cur = self.classes[c].outer;
                    }
                    let pseudo = self.pseudo_class[&self.classes[class].unit];
                    self.methods_named(pseudo, &call.text, arity, false)
                }
                Some(r) if r.kind == NodeKind::This => self.methods_named(class, &call.text, arity, true),
                Some(r) if r.kind == NodeKind::Name && r.text == "super" => self
                    .superclasses(class)
                    .into_iter()
                    .flat_map(|s| self.methods_named(s, &call.text, arity, false))
                    .collect(),
                Some(r) => {
                    let ty = match r.kind {
                        NodeKind::Name => self.var_type(ctx, &r.text).or_else(|| is_type_like(r).then(|| r.text.clone())),
                        NodeKind::ObjectCreation => Some(r.text.clone()),
                        NodeKind::FieldAccess if r.children[0].kind == NodeKind::This => self.var_type(ctx, &r.text),
                        NodeKind::FieldAccess => dotted(r).filter(|_| is_type_like(r)),
                        _ => None,
                    };
                    match ty.and_then(|t| self.class_named(&t)) {
                        Some(c) => self.methods_named(c, &call.text, arity, true),
                        None => vec![],
                    }
                }
            },
            _ => vec![],
        }
    }

    /// Context, class and innermost statement of a node.
    pub fn locate(&self, r: &NodeRef) -> Location {
        let root = &self.units[r.unit].ast;
        let mut ctx = None;
        let mut class = self.pseudo_class.get(&r.unit).copied();
        let mut stmt = None;
        let mut cur = root;
        let mut path = Vec::with_capacity(r.path.len());
        for (depth, &i) in r.path.iter().enumerate() {
            let Some(next) = cur.children.get(i) else { break };
            cur = next;
            path.push(i);
            if depth == 0 && cur.kind.is_statement() {
                if let Some(&m) = self.top_method.get(&r.unit) {
                    ctx = Some(Ctx::Method(m));
                }
            }
            let here = NodeRef::new(r.unit, path.clone());
            if let Some(&c) = self.class_by_node.get(&here) {
                class = Some(c);
                ctx = None;
            }
            if let Some(&m) = self.method_by_node.get(&here) {
                ctx = Some(Ctx::Method(m));
            }
            if cur.kind == NodeKind::FieldDecl {
                ctx = class.map(Ctx::Class);
            }
            if is_stmt_like(cur.kind) {
                stmt = Some(here);
            }
        }
        Location { ctx, class, stmt }
    }

    /// Invocation sites whose binding equals `b`.
    pub fn call_sites(&self, b: &ApiBinding) -> Vec<&CallSite> {
        self.calls.values().filter(|s| &s.binding == b).collect()
    }

    /// Method declarations overriding `b`.
    pub fn overriding_methods(&self, b: &ApiBinding) -> Vec<usize> {
        (0..self.methods.len()).filter(|&m| self.methods[m].override_binding.as_ref() == Some(b)).collect()
    }

    /// Return expressions of a method body, nested class bodies excluded.
    pub fn return_exprs(&self, m: usize) -> Vec<(NodeRef, NodeRef)> {
        let mi = &self.methods[m];
        let mut out = Vec::new();
        if mi.top_level {
            return out;
        }
        collect_returns(self.node(&mi.node), &mi.node, &mut out);
        out
    }

    /// All identifiers declared or referenced inside a class (or the
    /// top level of a classless unit).
    pub fn identifiers_in_class(&self, class: usize) -> BTreeSet<String> {
        let node = self.node(&self.classes[class].node);
        let mut out = BTreeSet::new();
        for n in node.walk() {
            match n.kind {
                NodeKind::Name
                | NodeKind::LocalVarDecl
                | NodeKind::FieldDecl
                | NodeKind::Param
                | NodeKind::CatchClause
                | NodeKind::MethodDecl
                | NodeKind::ClassDecl
                | NodeKind::FieldAccess
                | NodeKind::MethodCall => {
                    out.insert(n.text.clone());
                }
                _ => {}
            }
        }
        out
    }

    /// Callers' argument expressions for a formal parameter.
    pub fn actuals(&self, m: usize, index: usize) -> Vec<NodeRef> {
        let mut out = Vec::new();
        for site in self.callers.get(&m).into_iter().flatten() {
            let call = self.node(site);
            if let Some(ai) = call.children.iter().position(|c| c.kind == NodeKind::Args) {
                if index < call.children[ai].children.len() {
                    out.push(site.child(ai).child(index));
                }
            }
        }
        out
    }
}

fn collect_returns(node: &AstNode, at: &NodeRef, out: &mut Vec<(NodeRef, NodeRef)>) {
    for (i, c) in node.children.iter().enumerate() {
        let r = at.child(i);
        match c.kind {
            NodeKind::ClassBody => {}
            NodeKind::Return => {
                if !c.children.is_empty() {
                    out.push((r.clone(), r.child(0)));
                }
            }
            _ => collect_returns(c, &r, out),
        }
    }
}

fn collect_call_nodes(node: &AstNode, at: &NodeRef, out: &mut Vec<(NodeRef, Ctx)>) {
    for (i, c) in node.children.iter().enumerate() {
        let r = at.child(i);
        if matches!(c.kind, NodeKind::MethodCall | NodeKind::ObjectCreation) {
            out.push((r.clone(), Ctx::Class(0)));
        }
        collect_call_nodes(c, &r, out);
    }
}
