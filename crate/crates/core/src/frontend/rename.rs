//! Identifier renaming on ASTs, used to abstract example code and to
//! concretize abstract fixes.

use super::ast::{AstNode, NodeKind};

/// Variable names declared in `node` (locals, fields, parameters, catch
/// parameters), in source order, without duplicates.
pub fn declared_vars(node: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    for n in node.walk() {
        if matches!(n.kind, NodeKind::LocalVarDecl | NodeKind::FieldDecl | NodeKind::Param | NodeKind::CatchClause)
            && !out.contains(&n.text)
        {
            out.push(n.text.clone());
        }
    }
    out
}

/// Names of methods declared in `node`, in source order.
pub fn declared_methods(node: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    for n in node.walk() {
        if n.kind == NodeKind::MethodDecl && !out.contains(&n.text) {
            out.push(n.text.clone());
        }
    }
    out
}

/// Every identifier-like text in `node`: declared names, names, fields and
/// method names.
pub fn identifiers(node: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    for n in node.walk() {
        let is_ident = matches!(
            n.kind,
            NodeKind::LocalVarDecl
                | NodeKind::FieldDecl
                | NodeKind::Param
                | NodeKind::CatchClause
                | NodeKind::MethodDecl
                | NodeKind::Name
                | NodeKind::FieldAccess
                | NodeKind::MethodCall
        );
        if is_ident && !n.text.is_empty() && !out.contains(&n.text) {
            out.push(n.text.clone());
        }
    }
    out
}

/// Identifier occurrences in source order: variables (declarations and
/// uses) and locally declared methods (declarations and unqualified calls).
pub fn occurrences(node: &AstNode, is_var: &dyn Fn(&str) -> bool, is_method: &dyn Fn(&str) -> bool) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    collect(node, is_var, is_method, &mut out);
    out
}

fn collect(n: &AstNode, is_var: &dyn Fn(&str) -> bool, is_method: &dyn Fn(&str) -> bool, out: &mut Vec<(bool, String)>) {
    // declared names precede their initializers, calls precede arguments
    match n.kind {
        NodeKind::LocalVarDecl | NodeKind::FieldDecl | NodeKind::Param | NodeKind::CatchClause | NodeKind::Name
            if is_var(&n.text) =>
        {
            out.push((true, n.text.clone()));
        }
        NodeKind::FieldAccess if is_this(n) && is_var(&n.text) => out.push((true, n.text.clone())),
        NodeKind::MethodDecl if is_method(&n.text) => out.push((false, n.text.clone())),
        NodeKind::MethodCall if n.receiver().is_none_or(|r| r.kind == NodeKind::This) && is_method(&n.text) => {
            out.push((false, n.text.clone()))
        }
        _ => {}
    }
    if n.kind == NodeKind::MethodCall {
        // receiver first, then arguments
        for c in &n.children {
            collect(c, is_var, is_method, out);
        }
        return;
    }
    for c in &n.children {
        collect(c, is_var, is_method, out);
    }
}

fn is_this(n: &AstNode) -> bool {
    n.children.first().is_some_and(|c| c.kind == NodeKind::This)
}

/// Rename variables and locally declared methods in place. The closures
/// return the new name, or `None` to keep the identifier.
pub fn rename(node: &mut AstNode, var: &dyn Fn(&str) -> Option<String>, method: &dyn Fn(&str) -> Option<String>) {
    let new_name = match node.kind {
        NodeKind::LocalVarDecl | NodeKind::FieldDecl | NodeKind::Param | NodeKind::CatchClause | NodeKind::Name => {
            var(&node.text)
        }
        NodeKind::FieldAccess if is_this(node) => var(&node.text),
        NodeKind::MethodDecl => method(&node.text),
        NodeKind::MethodCall if node.receiver().is_none_or(|r| r.kind == NodeKind::This) => method(&node.text),
        _ => None,
    };
    if let Some(n) = new_name {
        node.text = n;
    }
    for c in &mut node.children {
        rename(c, var, method);
    }
}
