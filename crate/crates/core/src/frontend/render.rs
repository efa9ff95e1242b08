//! Token emission and pretty printing for AST nodes.
//!
//! Two views are produced. [`stmt_tokens`] and [`item_tokens`] yield flat
//! token lists annotated with a [`Role`], which normalization and template
//! abstraction consume. [`render`] pretty-prints a node back to Java text
//! that the parser accepts again.

use super::ast::{AstNode, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// A variable reference or declared variable name.
    Var,
    /// A literal constant.
    Lit,
    /// A qualified static constant such as `ByteLiterals.CONSTANT_ARRAY`.
    Const,
    /// A declared or invoked method name.
    Method,
    Type,
    Keyword,
    Punct,
    /// A field name selected from a non-`this` target, kept structural.
    Field,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RTok {
    pub text: String,
    pub role: Role,
}

impl RTok {
    fn new(text: impl Into<String>, role: Role) -> Self {
        RTok { text: text.into(), role }
    }
}

pub fn texts(toks: &[RTok]) -> Vec<String> {
    toks.iter().map(|t| t.text.clone()).collect()
}

/// Dotted text of a `Name`/`FieldAccess` chain, e.g. `javax.crypto.Cipher`.
pub fn dotted(node: &AstNode) -> Option<String> {
    match node.kind {
        NodeKind::Name => Some(node.text.clone()),
        NodeKind::FieldAccess => {
            let target = dotted(node.children.first()?)?;
            Some(format!("{target}.{}", node.text))
        }
        _ => None,
    }
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase())
}

fn is_const_name(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_uppercase())
        && s.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Whether a name used as a call receiver or selection target denotes a
/// type rather than a variable.
pub fn is_type_like(node: &AstNode) -> bool {
    match node.kind {
        NodeKind::Name => starts_upper(&node.text) && !is_const_name(&node.text),
        NodeKind::FieldAccess => dotted(node).is_some_and(|d| {
            let last = d.rsplit('.').next().unwrap_or("");
            let first = d.split('.').next().unwrap_or("");
            starts_upper(last) && !is_const_name(last) && !starts_upper(first)
        }),
        _ => false,
    }
}

/// `Type.CONSTANT` style selections, rendered as a single token.
pub fn is_static_const(node: &AstNode) -> bool {
    node.kind == NodeKind::FieldAccess
        && is_const_name(&node.text)
        && node.children.first().is_some_and(|t| {
            dotted(t).is_some_and(|d| starts_upper(d.rsplit('.').next().unwrap_or("")))
        })
}

fn punct(out: &mut Vec<RTok>, p: &str) {
    out.push(RTok::new(p, Role::Punct));
}

fn kw(out: &mut Vec<RTok>, k: &str) {
    out.push(RTok::new(k, Role::Keyword));
}

fn name_role(text: &str) -> Role {
    if text.starts_with("$c_") {
        Role::Lit
    } else {
        Role::Var
    }
}

pub fn expr_tokens(e: &AstNode, out: &mut Vec<RTok>) {
    match e.kind {
        NodeKind::Name => {
            let role = if e.text == "super" { Role::Keyword } else { name_role(&e.text) };
            out.push(RTok::new(&e.text, role));
        }
        NodeKind::This => kw(out, "this"),
        k if k.is_literal() => out.push(RTok::new(&e.text, Role::Lit)),
        NodeKind::FieldAccess => {
            if is_static_const(e) {
                out.push(RTok::new(dotted(e).unwrap_or_default(), Role::Const));
                return;
            }
            if is_type_like(e) {
                out.push(RTok::new(dotted(e).unwrap_or_default(), Role::Type));
                return;
            }
            let target = &e.children[0];
            target_tokens(target, out);
            punct(out, ".");
            let role = if target.kind == NodeKind::This { Role::Var } else { Role::Field };
            out.push(RTok::new(&e.text, role));
        }
        NodeKind::MethodCall => {
            if let Some(r) = e.receiver() {
                target_tokens(r, out);
                punct(out, ".");
            }
            if e.text == "this" || e.text == "super" {
                kw(out, &e.text);
            } else {
                out.push(RTok::new(&e.text, Role::Method));
            }
            args_tokens(e.args(), out);
        }
        NodeKind::ObjectCreation => {
            kw(out, "new");
            out.push(RTok::new(&e.text, Role::Type));
            args_tokens(e.args(), out);
            if let Some(body) = e.class_body() {
                punct(out, "{");
                for m in &body.children {
                    if m.kind != NodeKind::Comment {
                        out.extend(stmt_tokens(m));
                    }
                }
                punct(out, "}");
            }
        }
        NodeKind::ArrayCreation => {
            kw(out, "new");
            let dims = e.text.matches("[]").count();
            out.push(RTok::new(e.text.replace("[]", ""), Role::Type));
            let mut used = 0;
            for c in &e.children {
                if c.kind == NodeKind::ArrayInit {
                    continue;
                }
                punct(out, "[");
                expr_tokens(c, out);
                punct(out, "]");
                used += 1;
            }
            for _ in used..dims {
                punct(out, "[");
                punct(out, "]");
            }
            if let Some(init) = e.child(NodeKind::ArrayInit) {
                expr_tokens(init, out);
            }
        }
        NodeKind::ArrayInit => {
            punct(out, "{");
            for (i, c) in e.children.iter().enumerate() {
                if i > 0 {
                    punct(out, ",");
                }
                expr_tokens(c, out);
            }
            punct(out, "}");
        }
        NodeKind::ArrayAccess => {
            expr_tokens(&e.children[0], out);
            punct(out, "[");
            expr_tokens(&e.children[1], out);
            punct(out, "]");
        }
        NodeKind::Cast => {
            punct(out, "(");
            out.push(RTok::new(&e.text, Role::Type));
            punct(out, ")");
            expr_tokens(&e.children[0], out);
        }
        NodeKind::Binary | NodeKind::Assign => {
            expr_tokens(&e.children[0], out);
            punct(out, &e.text);
            expr_tokens(&e.children[1], out);
        }
        NodeKind::Unary => {
            punct(out, &e.text);
            expr_tokens(&e.children[0], out);
        }
        NodeKind::Postfix => {
            expr_tokens(&e.children[0], out);
            punct(out, &e.text);
        }
        NodeKind::Conditional => {
            expr_tokens(&e.children[0], out);
            punct(out, "?");
            expr_tokens(&e.children[1], out);
            punct(out, ":");
            expr_tokens(&e.children[2], out);
        }
        NodeKind::Paren => {
            punct(out, "(");
            expr_tokens(&e.children[0], out);
            punct(out, ")");
        }
        NodeKind::Args => args_tokens(&e.children, out),
        _ => out.push(RTok::new(&e.text, Role::Punct)),
    }
}

fn target_tokens(t: &AstNode, out: &mut Vec<RTok>) {
    if is_type_like(t) {
        out.push(RTok::new(dotted(t).unwrap_or_default(), Role::Type));
    } else {
        expr_tokens(t, out);
    }
}

fn args_tokens(args: &[AstNode], out: &mut Vec<RTok>) {
    punct(out, "(");
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            punct(out, ",");
        }
        expr_tokens(a, out);
    }
    punct(out, ")");
}

fn decl_prefix(node: &AstNode, out: &mut Vec<RTok>) {
    for c in &node.children {
        match c.kind {
            NodeKind::Annotation => out.push(RTok::new(format!("@{}", c.text), Role::Keyword)),
            NodeKind::Modifier => kw(out, &c.text),
            _ => {}
        }
    }
}

/// Tokens of a variable or field declaration without the trailing `;`.
fn var_decl_tokens(node: &AstNode, out: &mut Vec<RTok>) {
    decl_prefix(node, out);
    if let Some(t) = node.decl_type() {
        out.push(RTok::new(t, Role::Type));
    }
    out.push(RTok::new(&node.text, Role::Var));
    if let Some(init) = node.initializer() {
        punct(out, "=");
        expr_tokens(init, out);
    }
}

/// Header tokens of a declaration or compound statement; full tokens of
/// simple statements. These are the units compared during differencing.
pub fn item_tokens(node: &AstNode) -> Vec<RTok> {
    let mut out = Vec::new();
    match node.kind {
        NodeKind::ClassDecl | NodeKind::InterfaceDecl => {
            decl_prefix(node, &mut out);
            kw(&mut out, if node.kind == NodeKind::ClassDecl { "class" } else { "interface" });
            out.push(RTok::new(&node.text, Role::Type));
            for c in &node.children {
                let word = match c.kind {
                    NodeKind::Extends => "extends",
                    NodeKind::Implements => "implements",
                    _ => continue,
                };
                kw(&mut out, word);
                for (i, t) in c.children.iter().enumerate() {
                    if i > 0 {
                        punct(&mut out, ",");
                    }
                    out.push(RTok::new(&t.text, Role::Type));
                }
            }
        }
        NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
            decl_prefix(node, &mut out);
            if let Some(t) = node.decl_type() {
                out.push(RTok::new(t, Role::Type));
            }
            out.push(RTok::new(&node.text, Role::Method));
            punct(&mut out, "(");
            for (i, p) in node.params().enumerate() {
                if i > 0 {
                    punct(&mut out, ",");
                }
                decl_prefix(p, &mut out);
                out.push(RTok::new(p.decl_type().unwrap_or(""), Role::Type));
                out.push(RTok::new(&p.text, Role::Var));
            }
            punct(&mut out, ")");
            if let Some(th) = node.child(NodeKind::Throws) {
                kw(&mut out, "throws");
                for (i, t) in th.children.iter().enumerate() {
                    if i > 0 {
                        punct(&mut out, ",");
                    }
                    out.push(RTok::new(&t.text, Role::Type));
                }
            }
        }
        NodeKind::If => {
            kw(&mut out, "if");
            punct(&mut out, "(");
            expr_tokens(&node.children[0], &mut out);
            punct(&mut out, ")");
        }
        NodeKind::Try => kw(&mut out, "try"),
        NodeKind::CatchClause => {
            kw(&mut out, "catch");
            punct(&mut out, "(");
            out.push(RTok::new(node.decl_type().unwrap_or(""), Role::Type));
            out.push(RTok::new(&node.text, Role::Var));
            punct(&mut out, ")");
        }
        NodeKind::Finally => kw(&mut out, "finally"),
        NodeKind::Block => kw(&mut out, "{"),
        _ => return stmt_tokens(node),
    }
    out
}

/// Full tokens of a statement or member, nested blocks included.
pub fn stmt_tokens(node: &AstNode) -> Vec<RTok> {
    let mut out = Vec::new();
    stmt_tokens_into(node, &mut out);
    out
}

fn block_tokens(b: &AstNode, out: &mut Vec<RTok>) {
    punct(out, "{");
    for s in &b.children {
        if s.kind != NodeKind::Comment {
            stmt_tokens_into(s, out);
        }
    }
    punct(out, "}");
}

fn stmt_tokens_into(node: &AstNode, out: &mut Vec<RTok>) {
    match node.kind {
        NodeKind::LocalVarDecl | NodeKind::FieldDecl => {
            var_decl_tokens(node, out);
            punct(out, ";");
        }
        NodeKind::ExprStmt => {
            expr_tokens(&node.children[0], out);
            punct(out, ";");
        }
        NodeKind::Return => {
            kw(out, "return");
            if let Some(e) = node.children.first() {
                expr_tokens(e, out);
            }
            punct(out, ";");
        }
        NodeKind::Throw => {
            kw(out, "throw");
            expr_tokens(&node.children[0], out);
            punct(out, ";");
        }
        NodeKind::Block => block_tokens(node, out),
        NodeKind::If => {
            out.extend(item_tokens(node));
            block_tokens(&node.children[1], out);
            if let Some(e) = node.children.get(2) {
                kw(out, "else");
                block_tokens(e, out);
            }
        }
        NodeKind::Try => {
            kw(out, "try");
            for c in &node.children {
                match c.kind {
                    NodeKind::Block => block_tokens(c, out),
                    NodeKind::CatchClause => {
                        out.extend(item_tokens(c));
                        block_tokens(&c.children[1], out);
                    }
                    NodeKind::Finally => {
                        kw(out, "finally");
                        block_tokens(&c.children[0], out);
                    }
                    _ => {}
                }
            }
        }
        NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
            out.extend(item_tokens(node));
            match node.body() {
                Some(b) => block_tokens(b, out),
                None => punct(out, ";"),
            }
        }
        NodeKind::ClassDecl | NodeKind::InterfaceDecl => {
            out.extend(item_tokens(node));
            punct(out, "{");
            for m in node.members() {
                stmt_tokens_into(m, out);
            }
            punct(out, "}");
        }
        NodeKind::Comment => {}
        _ => expr_tokens(node, out),
    }
}

// ---- pretty printing ----

const INDENT: &str = "    ";

fn pad(level: usize) -> String {
    INDENT.repeat(level)
}

/// Single-line source form of an expression (anonymous class bodies span
/// several lines, indented relative to `level`).
pub fn expr_str(e: &AstNode) -> String {
    expr_str_at(e, 0)
}

fn join_args(args: &[AstNode], level: usize) -> String {
    args.iter().map(|a| expr_str_at(a, level)).collect::<Vec<_>>().join(", ")
}

fn expr_str_at(e: &AstNode, level: usize) -> String {
    match e.kind {
        NodeKind::Name | NodeKind::This => e.text.clone(),
        k if k.is_literal() => e.text.clone(),
        NodeKind::FieldAccess => format!("{}.{}", expr_str_at(&e.children[0], level), e.text),
        NodeKind::MethodCall => match e.receiver() {
            Some(r) => format!("{}.{}({})", expr_str_at(r, level), e.text, join_args(e.args(), level)),
            None => format!("{}({})", e.text, join_args(e.args(), level)),
        },
        NodeKind::ObjectCreation => {
            let mut s = format!("new {}({})", e.text, join_args(e.args(), level));
            if let Some(body) = e.class_body() {
                s.push_str(" {\n");
                for m in &body.children {
                    s.push_str(&render_at(m, level + 1));
                    s.push('\n');
                }
                s.push_str(&pad(level));
                s.push('}');
            }
            s
        }
        NodeKind::ArrayCreation => {
            let dims = e.text.matches("[]").count();
            let mut s = format!("new {}", e.text.replace("[]", ""));
            let mut used = 0;
            for c in &e.children {
                if c.kind != NodeKind::ArrayInit {
                    s.push_str(&format!("[{}]", expr_str_at(c, level)));
                    used += 1;
                }
            }
            for _ in used..dims {
                s.push_str("[]");
            }
            if let Some(init) = e.child(NodeKind::ArrayInit) {
                s.push(' ');
                s.push_str(&expr_str_at(init, level));
            }
            s
        }
        NodeKind::ArrayInit => format!("{{{}}}", join_args(&e.children, level)),
        NodeKind::ArrayAccess => format!("{}[{}]", expr_str_at(&e.children[0], level), expr_str_at(&e.children[1], level)),
        NodeKind::Cast => format!("({}) {}", e.text, expr_str_at(&e.children[0], level)),
        NodeKind::Binary | NodeKind::Assign => format!(
            "{} {} {}",
            expr_str_at(&e.children[0], level),
            e.text,
            expr_str_at(&e.children[1], level)
        ),
        NodeKind::Unary => format!("{}{}", e.text, expr_str_at(&e.children[0], level)),
        NodeKind::Postfix => format!("{}{}", expr_str_at(&e.children[0], level), e.text),
        NodeKind::Conditional => format!(
            "{} ? {} : {}",
            expr_str_at(&e.children[0], level),
            expr_str_at(&e.children[1], level),
            expr_str_at(&e.children[2], level)
        ),
        NodeKind::Paren => format!("({})", expr_str_at(&e.children[0], level)),
        NodeKind::Args => format!("({})", join_args(&e.children, level)),
        _ => e.text.clone(),
    }
}

/// Pretty-print any node at indentation level 0.
pub fn render(node: &AstNode) -> String {
    render_at(node, 0)
}

fn prefix_str(node: &AstNode, level: usize, annotations_on_own_line: bool) -> String {
    let mut s = String::new();
    for c in node.children_of(NodeKind::Annotation) {
        s.push('@');
        s.push_str(&c.text);
        if annotations_on_own_line {
            s.push('\n');
            s.push_str(&pad(level));
        } else {
            s.push(' ');
        }
    }
    for c in node.children_of(NodeKind::Modifier) {
        s.push_str(&c.text);
        s.push(' ');
    }
    s
}

fn block_str(b: &AstNode, level: usize) -> String {
    if b.children.is_empty() {
        return "{\n".to_string() + &pad(level) + "}";
    }
    let mut s = String::from("{\n");
    for c in &b.children {
        s.push_str(&render_at(c, level + 1));
        s.push('\n');
    }
    s.push_str(&pad(level));
    s.push('}');
    s
}

fn var_decl_str(node: &AstNode, level: usize) -> String {
    let mut s = prefix_str(node, level, false);
    s.push_str(node.decl_type().unwrap_or(""));
    s.push(' ');
    s.push_str(&node.text);
    if let Some(init) = node.initializer() {
        s.push_str(" = ");
        s.push_str(&expr_str_at(init, level));
    }
    s.push(';');
    s
}

/// Method or constructor header without the body, e.g.
/// `public byte[] keyInit()`.
pub fn method_header_str(node: &AstNode) -> String {
    method_header_at(node, 0)
}

fn method_header_at(node: &AstNode, level: usize) -> String {
    let mut s = prefix_str(node, level, true);
    if let Some(t) = node.decl_type() {
        s.push_str(t);
        s.push(' ');
    }
    s.push_str(&node.text);
    let params: Vec<String> = node
        .params()
        .map(|p| format!("{}{} {}", prefix_str(p, level, false), p.decl_type().unwrap_or(""), p.text))
        .collect();
    s.push_str(&format!("({})", params.join(", ")));
    if let Some(th) = node.child(NodeKind::Throws) {
        let tys: Vec<&str> = th.children.iter().map(|t| t.text.as_str()).collect();
        s.push_str(&format!(" throws {}", tys.join(", ")));
    }
    s
}

fn render_at(node: &AstNode, level: usize) -> String {
    let p = pad(level);
    match node.kind {
        NodeKind::CompilationUnit => {
            let mut s = String::new();
            for c in &node.children {
                s.push_str(&render_at(c, 0));
                s.push('\n');
            }
            s
        }
        NodeKind::Package => format!("{p}package {};", node.text),
        NodeKind::Import => format!("{p}import {};", node.text),
        NodeKind::Comment => {
            // continuation lines of block comments keep their own layout
            format!("{p}{}", node.text)
        }
        NodeKind::ClassDecl | NodeKind::InterfaceDecl => {
            let mut s = p.clone();
            s.push_str(&prefix_str(node, level, true));
            s.push_str(if node.kind == NodeKind::ClassDecl { "class " } else { "interface " });
            s.push_str(&node.text);
            for c in &node.children {
                let word = match c.kind {
                    NodeKind::Extends => "extends",
                    NodeKind::Implements => "implements",
                    _ => continue,
                };
                let tys: Vec<&str> = c.children.iter().map(|t| t.text.as_str()).collect();
                s.push_str(&format!(" {word} {}", tys.join(", ")));
            }
            s.push_str(" {\n");
            for c in &node.children {
                if matches!(
                    c.kind,
                    NodeKind::Annotation | NodeKind::Modifier | NodeKind::Extends | NodeKind::Implements
                ) {
                    continue;
                }
                s.push_str(&render_at(c, level + 1));
                s.push('\n');
            }
            s.push_str(&p);
            s.push('}');
            s
        }
        NodeKind::MethodDecl | NodeKind::ConstructorDecl => {
            let mut s = p.clone();
            s.push_str(&method_header_at(node, level));
            match node.body() {
                Some(b) => {
                    s.push(' ');
                    s.push_str(&block_str(b, level));
                }
                None => s.push(';'),
            }
            s
        }
        NodeKind::FieldDecl | NodeKind::LocalVarDecl => format!("{p}{}", var_decl_str(node, level)),
        NodeKind::ExprStmt => format!("{p}{};", expr_str_at(&node.children[0], level)),
        NodeKind::Return => match node.children.first() {
            Some(e) => format!("{p}return {};", expr_str_at(e, level)),
            None => format!("{p}return;"),
        },
        NodeKind::Throw => format!("{p}throw {};", expr_str_at(&node.children[0], level)),
        NodeKind::Block => format!("{p}{}", block_str(node, level)),
        NodeKind::If => {
            let mut s = format!("{p}if ({}) {}", expr_str_at(&node.children[0], level), block_str(&node.children[1], level));
            if let Some(e) = node.children.get(2) {
                s.push_str(" else ");
                s.push_str(&block_str(e, level));
            }
            s
        }
        NodeKind::Try => {
            let mut s = format!("{p}try");
            for c in &node.children {
                match c.kind {
                    NodeKind::Block => {
                        s.push(' ');
                        s.push_str(&block_str(c, level));
                    }
                    NodeKind::CatchClause => {
                        s.push_str(&format!(
                            " catch ({} {}) {}",
                            c.decl_type().unwrap_or(""),
                            c.text,
                            block_str(&c.children[1], level)
                        ));
                    }
                    NodeKind::Finally => {
                        s.push_str(" finally ");
                        s.push_str(&block_str(&c.children[0], level));
                    }
                    _ => {}
                }
            }
            s
        }
        _ => format!("{p}{}", expr_str_at(node, level)),
    }
}
