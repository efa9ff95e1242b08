//! Recursive-descent parser for the supported Java subset.
//!
//! Supported: packages, imports, classes and interfaces (including
//! anonymous class bodies), fields, methods, constructors, local
//! declarations, assignments, calls, object and array creation, casts,
//! `if`/`try`/`return`/`throw`, annotations and the usual operators.
//! Loops, switches, lambdas and method references are rejected with a
//! [`ParseError`].

use super::ast::{AstNode, NodeKind, Span};
use super::lexer::{tokenize, TokKind, Token};
use super::ParseError;

const MODIFIERS: &[&str] = &[
    "public", "private", "protected", "static", "final", "abstract", "synchronized", "native",
    "transient", "volatile", "strictfp", "default",
];

const UNSUPPORTED_STMTS: &[&str] = &["for", "while", "do", "switch", "synchronized", "assert", "break", "continue"];

const PRIMITIVES: &[&str] = &["byte", "short", "int", "long", "char", "float", "double", "boolean", "void"];

/// Parse one compilation unit.
pub fn parse_unit(source: &str, file: &str) -> Result<AstNode, ParseError> {
    let toks = tokenize(source, file)?;
    let mut p = Parser { toks, pos: 0, file: file.to_string(), class_names: Vec::new() };
    p.unit()
}

/// Parse a single statement (used to re-read rendered statements).
pub fn parse_statement(source: &str, file: &str) -> Result<AstNode, ParseError> {
    let toks = tokenize(source, file)?;
    let mut p = Parser { toks, pos: 0, file: file.to_string(), class_names: Vec::new() };
    p.skip_comments();
    let s = p.statement()?;
    p.skip_comments();
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input after statement"));
    }
    Ok(s)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    class_names: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    // ---- token helpers ----

    fn skip_comments(&mut self) {
        while self.pos < self.toks.len() && self.toks[self.pos].kind == TokKind::Comment {
            self.pos += 1;
        }
    }

    fn nth(&self, n: usize) -> Option<&Token> {
        let mut i = self.pos;
        let mut seen = 0;
        while i < self.toks.len() {
            if self.toks[i].kind != TokKind::Comment {
                if seen == n {
                    return Some(&self.toks[i]);
                }
                seen += 1;
            }
            i += 1;
        }
        None
    }

    fn peek(&self) -> Option<&Token> {
        self.nth(0)
    }

    fn peek_text(&self) -> &str {
        self.peek().map(|t| t.text.as_str()).unwrap_or("")
    }

    fn is(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text && t.kind != TokKind::Str)
    }

    fn is_nth(&self, n: usize, text: &str) -> bool {
        self.nth(n).is_some_and(|t| t.text == text && t.kind != TokKind::Str)
    }

    fn line(&self) -> u32 {
        self.peek()
            .map(|t| t.line)
            .or_else(|| self.toks.last().map(|t| t.end_line))
            .unwrap_or(1)
    }

    fn prev_line(&self) -> u32 {
        let mut i = self.pos;
        while i > 0 {
            i -= 1;
            if self.toks[i].kind != TokKind::Comment {
                return self.toks[i].end_line;
            }
        }
        1
    }

    fn bump(&mut self) -> PResult<Token> {
        self.skip_comments();
        match self.toks.get(self.pos) {
            Some(t) => {
                let t = t.clone();
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn expect(&mut self, text: &str) -> PResult<Token> {
        if self.is(text) {
            self.bump()
        } else {
            let found = self.peek().map(|t| t.text.clone()).unwrap_or_else(|| "end of input".into());
            Err(self.error(&format!("expected '{text}', found '{found}'")))
        }
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.is(text) {
            self.pos_after_peek();
            true
        } else {
            false
        }
    }

    fn pos_after_peek(&mut self) {
        self.skip_comments();
        self.pos += 1;
    }

    fn ident(&mut self) -> PResult<Token> {
        match self.peek() {
            Some(t) if t.kind == TokKind::Ident => self.bump(),
            Some(t) => {
                let m = format!("expected identifier, found '{}'", t.text);
                Err(self.error(&m))
            }
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    fn error(&self, msg: &str) -> ParseError {
        ParseError::new(&self.file, self.line(), msg)
    }

    fn span(&self, start: u32) -> Span {
        let end = self.prev_line().max(start);
        Span::new(&self.file, start, end)
    }

    fn take_comments(&mut self) -> Vec<AstNode> {
        let mut out = Vec::new();
        while self.pos < self.toks.len() && self.toks[self.pos].kind == TokKind::Comment {
            let t = &self.toks[self.pos];
            out.push(AstNode::new(NodeKind::Comment, t.text.clone(), Span::new(&self.file, t.line, t.end_line)));
            self.pos += 1;
        }
        out
    }

    // ---- compilation unit and members ----

    fn unit(&mut self) -> PResult<AstNode> {
        let mut children = Vec::new();
        loop {
            children.extend(self.take_comments());
            if self.peek().is_none() {
                break;
            }
            if self.is("package") {
                let start = self.line();
                self.bump()?;
                let name = self.qualified_name()?;
                self.expect(";")?;
                children.push(AstNode::new(NodeKind::Package, name, self.span(start)));
            } else if self.is("import") {
                let start = self.line();
                self.bump()?;
                let is_static = self.eat("static");
                let mut name = self.qualified_name()?;
                if self.eat(".") {
                    self.expect("*")?;
                    name.push_str(".*");
                }
                self.expect(";")?;
                let text = if is_static { format!("static {name}") } else { name };
                children.push(AstNode::new(NodeKind::Import, text, self.span(start)));
            } else if self.is(";") {
                self.bump()?;
            } else {
                children.extend(self.member_or_statement(true)?);
            }
        }
        let end = self.toks.iter().map(|t| t.end_line).max().unwrap_or(1);
        let span = Span::new(&self.file, 1, end.max(1));
        Ok(AstNode::new(NodeKind::CompilationUnit, "", span).with_children(children))
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?.text;
        while self.is(".") && self.nth(1).is_some_and(|t| t.kind == TokKind::Ident) {
            self.bump()?;
            name.push('.');
            name.push_str(&self.ident()?.text);
        }
        Ok(name)
    }

    /// Parse a member; at top level, fall back to a statement when the
    /// input does not look like a declaration. May yield several nodes
    /// for multi-declarator fields.
    fn member_or_statement(&mut self, top_level: bool) -> PResult<Vec<AstNode>> {
        let save = self.pos;
        match self.member() {
            Ok(m) => Ok(m),
            Err(e) if top_level => {
                let member_pos = self.pos;
                self.pos = save;
                match self.statement() {
                    Ok(s) => Ok(vec![s]),
                    Err(e2) => {
                        // report whichever parse got further
                        if member_pos >= self.pos { Err(e) } else { Err(e2) }
                    }
                }
            }
            Err(e) => Err(e),
        }
    }

    fn annotations_and_modifiers(&mut self) -> PResult<Vec<AstNode>> {
        let mut out = Vec::new();
        loop {
            if self.is("@") && !self.is_nth(1, "interface") {
                let start = self.line();
                self.bump()?;
                let name = self.qualified_name()?;
                if self.is("(") {
                    // annotation arguments are parsed and discarded
                    self.bump()?;
                    let mut depth = 1;
                    while depth > 0 {
                        let t = self.bump()?;
                        match t.text.as_str() {
                            "(" if t.kind == TokKind::Op => depth += 1,
                            ")" if t.kind == TokKind::Op => depth -= 1,
                            _ => {}
                        }
                    }
                }
                out.push(AstNode::new(NodeKind::Annotation, name, self.span(start)));
            } else if self.peek().is_some_and(|t| t.kind == TokKind::Ident && MODIFIERS.contains(&t.text.as_str()))
                && !(self.is("default") && self.is_nth(1, ":"))
            {
                let t = self.bump()?;
                out.push(AstNode::new(NodeKind::Modifier, t.text, Span::new(&self.file, t.line, t.line)));
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn member(&mut self) -> PResult<Vec<AstNode>> {
        let start = self.line();
        let mods = self.annotations_and_modifiers()?;
        let start = mods.first().map(|m| m.span.start_line).unwrap_or(start);
        if self.is("class") || self.is("interface") {
            return Ok(vec![self.type_decl(start, mods)?]);
        }
        if self.is("enum") || self.is("record") || self.is("@") {
            return Err(self.error(&format!("unsupported declaration '{}'", self.peek_text())));
        }
        if self.is("{") {
            return Err(self.error("initializer blocks are not supported"));
        }
        if self.is("<") {
            // generic method type parameters are skipped
            self.skip_type_params()?;
        }
        // constructor: Name '('
        if self.peek().is_some_and(|t| t.kind == TokKind::Ident) && self.is_nth(1, "(") {
            let name_tok = self.ident()?;
            if !self.class_names.is_empty() && !self.class_names.contains(&name_tok.text) {
                return Err(ParseError::new(&self.file, name_tok.line, "method declaration without return type"));
            }
            return Ok(vec![self.method_rest(start, mods, None, name_tok.text, NodeKind::ConstructorDecl)?]);
        }
        let ty = self.type_ref()?;
        let name_tok = self.ident()?;
        if self.is("(") {
            return Ok(vec![self.method_rest(start, mods, Some(ty), name_tok.text, NodeKind::MethodDecl)?]);
        }
        // field declaration(s)
        let mut fields = Vec::new();
        let mut name = name_tok.text;
        loop {
            let mut ty_here = ty.clone();
            while self.is("[") && self.is_nth(1, "]") {
                self.bump()?;
                self.bump()?;
                ty_here.text.push_str("[]");
            }
            let mut children = mods.clone();
            children.push(ty_here);
            if self.eat("=") {
                children.push(self.var_initializer()?);
            }
            fields.push((name.clone(), children));
            if self.eat(",") {
                name = self.ident()?.text;
                continue;
            }
            self.expect(";")?;
            break;
        }
        let span = self.span(start);
        Ok(fields
            .into_iter()
            .map(|(n, c)| AstNode::new(NodeKind::FieldDecl, n, span.clone()).with_children(c))
            .collect())
    }

    fn skip_type_params(&mut self) -> PResult<()> {
        self.expect("<")?;
        let mut depth = 1;
        while depth > 0 {
            let t = self.bump()?;
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                _ => {}
            }
        }
        Ok(())
    }

    fn type_decl(&mut self, start: u32, mods: Vec<AstNode>) -> PResult<AstNode> {
        let kw = self.bump()?;
        let kind = if kw.text == "class" { NodeKind::ClassDecl } else { NodeKind::InterfaceDecl };
        let name = self.ident()?.text;
        if self.is("<") {
            self.skip_type_params()?;
        }
        let mut children = mods;
        if self.is("extends") {
            let s = self.line();
            self.bump()?;
            let mut tys = vec![self.type_ref()?];
            while self.eat(",") {
                tys.push(self.type_ref()?);
            }
            children.push(AstNode::new(NodeKind::Extends, "", self.span(s)).with_children(tys));
        }
        if self.is("implements") {
            let s = self.line();
            self.bump()?;
            let mut tys = vec![self.type_ref()?];
            while self.eat(",") {
                tys.push(self.type_ref()?);
            }
            children.push(AstNode::new(NodeKind::Implements, "", self.span(s)).with_children(tys));
        }
        self.class_names.push(name.clone());
        let members = self.class_members();
        self.class_names.pop();
        children.extend(members?);
        Ok(AstNode::new(kind, name, self.span(start)).with_children(children))
    }

    fn class_members(&mut self) -> PResult<Vec<AstNode>> {
        self.expect("{")?;
        let mut out = Vec::new();
        loop {
            out.extend(self.take_comments());
            if self.is("}") {
                self.bump()?;
                break;
            }
            if self.peek().is_none() {
                return Err(self.error("unbalanced braces: missing '}'"));
            }
            if self.eat(";") {
                continue;
            }
            out.extend(self.member_or_statement(false)?);
        }
        Ok(out)
    }

    fn method_rest(
        &mut self,
        start: u32,
        mods: Vec<AstNode>,
        ret: Option<AstNode>,
        name: String,
        kind: NodeKind,
    ) -> PResult<AstNode> {
        let mut children = mods;
        if let Some(r) = ret {
            children.push(r);
        }
        self.expect("(")?;
        if !self.is(")") {
            loop {
                let ps = self.line();
                let pmods = self.annotations_and_modifiers()?;
                let ps = pmods.first().map(|m| m.span.start_line).unwrap_or(ps);
                let mut ty = self.type_ref()?;
                let pname = self.ident()?.text;
                while self.is("[") && self.is_nth(1, "]") {
                    self.bump()?;
                    self.bump()?;
                    ty.text.push_str("[]");
                }
                let mut pc: Vec<AstNode> = pmods.into_iter().filter(|m| m.kind == NodeKind::Modifier).collect();
                pc.push(ty);
                children.push(AstNode::new(NodeKind::Param, pname, self.span(ps)).with_children(pc));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        if self.is("throws") {
            let s = self.line();
            self.bump()?;
            let mut tys = vec![self.type_ref()?];
            while self.eat(",") {
                tys.push(self.type_ref()?);
            }
            children.push(AstNode::new(NodeKind::Throws, "", self.span(s)).with_children(tys));
        }
        if self.eat(";") {
            // abstract or interface method
        } else {
            children.push(self.block()?);
        }
        Ok(AstNode::new(kind, name, self.span(start)).with_children(children))
    }

    // ---- types ----

    fn type_ref(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let text = self.type_text()?;
        Ok(AstNode::new(NodeKind::TypeRef, text, Span::new(&self.file, start, start)))
    }

    fn type_text(&mut self) -> PResult<String> {
        let mut text = self.qualified_name()?;
        if self.is("<") {
            text.push_str(&self.type_args()?);
            // nested qualified type after generics, e.g. Map.Entry<K,V>.Inner is not supported
        }
        while self.is("[") && self.is_nth(1, "]") {
            self.bump()?;
            self.bump()?;
            text.push_str("[]");
        }
        if self.eat("...") {
            text.push_str("...");
        }
        Ok(text)
    }

    fn type_args(&mut self) -> PResult<String> {
        self.expect("<")?;
        let mut parts = Vec::new();
        if !self.is(">") {
            loop {
                if self.eat("?") {
                    if self.is("extends") || self.is("super") {
                        let kw = self.bump()?.text;
                        parts.push(format!("? {kw} {}", self.type_text()?));
                    } else {
                        parts.push("?".to_string());
                    }
                } else {
                    parts.push(self.type_text()?);
                }
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(">")?;
        Ok(format!("<{}>", parts.join(", ")))
    }

    /// Speculatively parse `Type Ident` to decide whether a local
    /// declaration starts here.
    fn looks_like_local_decl(&mut self) -> bool {
        let save = self.pos;
        let ok = (|| -> PResult<bool> {
            while self.is("final") || self.is("@") {
                if self.is("@") {
                    self.bump()?;
                    self.qualified_name()?;
                } else {
                    self.bump()?;
                }
            }
            let first = self.peek().cloned();
            let Some(first) = first else { return Ok(false) };
            if first.kind != TokKind::Ident || is_keyword_expr_start(&first.text) {
                return Ok(false);
            }
            self.type_text()?;
            let is_decl = self.peek().is_some_and(|t| t.kind == TokKind::Ident)
                && matches!(self.nth(1).map(|t| t.text.as_str()), Some("=") | Some(";") | Some(",") | Some("["));
            Ok(is_decl)
        })()
        .unwrap_or(false);
        self.pos = save;
        ok
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<AstNode> {
        let start = self.line();
        self.expect("{")?;
        let mut children = Vec::new();
        loop {
            children.extend(self.take_comments());
            if self.is("}") {
                self.bump()?;
                break;
            }
            if self.peek().is_none() {
                return Err(self.error("unbalanced braces: missing '}'"));
            }
            if self.eat(";") {
                continue;
            }
            children.extend(self.statement_multi()?);
        }
        Ok(AstNode::new(NodeKind::Block, "", self.span(start)).with_children(children))
    }

    /// A statement; multi-declarator locals expand to several nodes.
    fn statement_multi(&mut self) -> PResult<Vec<AstNode>> {
        if self.looks_like_local_decl() {
            return self.local_decls();
        }
        Ok(vec![self.statement()?])
    }

    fn statement(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        if tok.kind == TokKind::Ident && UNSUPPORTED_STMTS.contains(&tok.text.as_str()) {
            return Err(self.error(&format!("unsupported statement '{}'", tok.text)));
        }
        match tok.text.as_str() {
            "{" if tok.kind == TokKind::Op => self.block(),
            "if" => {
                self.bump()?;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = self.sub_statement()?;
                let mut children = vec![cond, then];
                if self.eat("else") {
                    children.push(self.sub_statement()?);
                }
                Ok(AstNode::new(NodeKind::If, "", self.span(start)).with_children(children))
            }
            "try" => {
                self.bump()?;
                if self.is("(") {
                    return Err(self.error("try-with-resources is not supported"));
                }
                let mut children = vec![self.block()?];
                while self.is("catch") {
                    let cs = self.line();
                    self.bump()?;
                    self.expect("(")?;
                    self.annotations_and_modifiers()?;
                    let mut ty = self.type_text()?;
                    while self.eat("|") {
                        ty.push_str(" | ");
                        ty.push_str(&self.type_text()?);
                    }
                    let tyn = AstNode::new(NodeKind::TypeRef, ty, Span::new(&self.file, cs, cs));
                    let name = self.ident()?.text;
                    self.expect(")")?;
                    let body = self.block()?;
                    children.push(AstNode::new(NodeKind::CatchClause, name, self.span(cs)).with_children(vec![tyn, body]));
                }
                if self.is("finally") {
                    let fs = self.line();
                    self.bump()?;
                    let body = self.block()?;
                    children.push(AstNode::new(NodeKind::Finally, "", self.span(fs)).with_children(vec![body]));
                }
                if children.len() == 1 {
                    return Err(self.error("try without catch or finally"));
                }
                Ok(AstNode::new(NodeKind::Try, "", self.span(start)).with_children(children))
            }
            "return" => {
                self.bump()?;
                let mut children = Vec::new();
                if !self.is(";") {
                    children.push(self.expr()?);
                }
                self.expect(";")?;
                Ok(AstNode::new(NodeKind::Return, "", self.span(start)).with_children(children))
            }
            "throw" => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(";")?;
                Ok(AstNode::new(NodeKind::Throw, "", self.span(start)).with_children(vec![e]))
            }
            _ => {
                if self.looks_like_local_decl() {
                    let mut decls = self.local_decls()?;
                    if decls.len() != 1 {
                        return Err(self.error("multiple declarators are not allowed here"));
                    }
                    return Ok(decls.remove(0));
                }
                let e = self.expr()?;
                self.expect(";")?;
                Ok(AstNode::new(NodeKind::ExprStmt, "", self.span(start)).with_children(vec![e]))
            }
        }
    }

    /// Body of `if`/`else`: a single statement, kept as a block.
    fn sub_statement(&mut self) -> PResult<AstNode> {
        if self.is("{") {
            return self.block();
        }
        let start = self.line();
        let s = self.statement_multi()?;
        Ok(AstNode::new(NodeKind::Block, "", self.span(start)).with_children(s))
    }

    fn local_decls(&mut self) -> PResult<Vec<AstNode>> {
        let start = self.line();
        let mods: Vec<AstNode> = self
            .annotations_and_modifiers()?
            .into_iter()
            .filter(|m| m.kind == NodeKind::Modifier)
            .collect();
        let ty = self.type_ref()?;
        let mut out = Vec::new();
        loop {
            let name = self.ident()?.text;
            let mut ty_here = ty.clone();
            while self.is("[") && self.is_nth(1, "]") {
                self.bump()?;
                self.bump()?;
                ty_here.text.push_str("[]");
            }
            let mut children = mods.clone();
            children.push(ty_here);
            if self.eat("=") {
                children.push(self.var_initializer()?);
            }
            out.push((name, children));
            if !self.eat(",") {
                break;
            }
        }
        self.expect(";")?;
        let span = self.span(start);
        Ok(out
            .into_iter()
            .map(|(n, c)| AstNode::new(NodeKind::LocalVarDecl, n, span.clone()).with_children(c))
            .collect())
    }

    fn var_initializer(&mut self) -> PResult<AstNode> {
        if self.is("{") {
            self.array_init()
        } else {
            self.expr()
        }
    }

    fn array_init(&mut self) -> PResult<AstNode> {
        let start = self.line();
        self.expect("{")?;
        let mut items = Vec::new();
        while !self.is("}") {
            items.push(self.var_initializer()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(AstNode::new(NodeKind::ArrayInit, "", self.span(start)).with_children(items))
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let lhs = self.conditional()?;
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Op
                && matches!(t.text.as_str(), "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>=")
            {
                let op = self.bump()?.text;
                if !matches!(lhs.kind, NodeKind::Name | NodeKind::FieldAccess | NodeKind::ArrayAccess) {
                    return Err(self.error("invalid assignment target"));
                }
                let rhs = self.expr()?;
                return Ok(AstNode::new(NodeKind::Assign, op, self.span(start)).with_children(vec![lhs, rhs]));
            }
            if t.text == "->" || t.text == "::" {
                return Err(self.error("lambdas and method references are not supported"));
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let c = self.binary(0)?;
        if self.eat("?") {
            let a = self.expr()?;
            self.expect(":")?;
            let b = self.conditional()?;
            return Ok(AstNode::new(NodeKind::Conditional, "", self.span(start)).with_children(vec![c, a, b]));
        }
        Ok(c)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<AstNode> {
        let start = self.line();
        let mut lhs = self.unary()?;
        loop {
            let Some(t) = self.peek() else { break };
            if t.kind != TokKind::Op && t.text != "instanceof" {
                break;
            }
            if t.text == "instanceof" {
                return Err(self.error("instanceof is not supported"));
            }
            let Some(prec) = binary_prec(&t.text) else { break };
            if prec < min_prec {
                break;
            }
            let op = self.bump()?.text;
            let rhs = self.binary(prec + 1)?;
            lhs = AstNode::new(NodeKind::Binary, op, self.span(start)).with_children(vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AstNode> {
        let start = self.line();
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Op && matches!(t.text.as_str(), "!" | "-" | "+" | "~" | "++" | "--") {
                let op = self.bump()?.text;
                let e = self.unary()?;
                return Ok(AstNode::new(NodeKind::Unary, op, self.span(start)).with_children(vec![e]));
            }
            if t.text == "(" && t.kind == TokKind::Op {
                if let Some(cast) = self.try_cast()? {
                    return Ok(cast);
                }
            }
        }
        self.postfix()
    }

    fn try_cast(&mut self) -> PResult<Option<AstNode>> {
        let save = self.pos;
        let start = self.line();
        self.bump()?; // (
        let ty = match self.peek() {
            Some(t) if t.kind == TokKind::Ident && !is_keyword_expr_start(&t.text) => self.type_text().ok(),
            _ => None,
        };
        if let Some(ty) = ty {
            if self.is(")") {
                self.bump()?;
                let primitive = PRIMITIVES.contains(&ty.trim_end_matches("[]"));
                let next_starts_operand = self.peek().is_some_and(|t| match t.kind {
                    TokKind::Ident | TokKind::Int | TokKind::Str | TokKind::Char => true,
                    TokKind::Op => t.text == "(" || (primitive && matches!(t.text.as_str(), "-" | "+" | "!" | "~")),
                    TokKind::Comment => false,
                });
                let looks_like_type = primitive || ty.ends_with("[]") || ty.contains('<') || ty.chars().next().is_some_and(|c| c.is_uppercase());
                if next_starts_operand && looks_like_type {
                    let e = self.unary()?;
                    return Ok(Some(AstNode::new(NodeKind::Cast, ty, self.span(start)).with_children(vec![e])));
                }
            }
        }
        self.pos = save;
        Ok(None)
    }

    fn postfix(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let mut e = self.primary()?;
        loop {
            if self.is(".") {
                self.bump()?;
                if self.is("<") {
                    return Err(self.error("explicit generic method calls are not supported"));
                }
                let name = self.ident()?;
                if self.is("(") {
                    let args = self.args()?;
                    e = AstNode::new(NodeKind::MethodCall, name.text, self.span(start)).with_children(vec![e, args]);
                } else {
                    e = AstNode::new(NodeKind::FieldAccess, name.text, self.span(start)).with_children(vec![e]);
                }
            } else if self.is("[") {
                self.bump()?;
                let idx = self.expr()?;
                self.expect("]")?;
                e = AstNode::new(NodeKind::ArrayAccess, "", self.span(start)).with_children(vec![e, idx]);
            } else if self.is("++") || self.is("--") {
                let op = self.bump()?.text;
                e = AstNode::new(NodeKind::Postfix, op, self.span(start)).with_children(vec![e]);
            } else if self.is("::") || self.is("->") {
                return Err(self.error("lambdas and method references are not supported"));
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<AstNode> {
        let start = self.line();
        self.expect("(")?;
        let mut items = Vec::new();
        if !self.is(")") {
            loop {
                items.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(AstNode::new(NodeKind::Args, "", self.span(start)).with_children(items))
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let start = self.line();
        let Some(t) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input in expression"));
        };
        let leaf = |kind, t: &Token, file: &str| AstNode::new(kind, t.text.clone(), Span::new(file, t.line, t.line));
        match t.kind {
            TokKind::Str => {
                self.bump()?;
                Ok(leaf(NodeKind::StringLiteral, &t, &self.file))
            }
            TokKind::Char => {
                self.bump()?;
                Ok(leaf(NodeKind::CharLiteral, &t, &self.file))
            }
            TokKind::Int => {
                self.bump()?;
                Ok(leaf(NodeKind::IntLiteral, &t, &self.file))
            }
            TokKind::Op if t.text == "(" => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(AstNode::new(NodeKind::Paren, "", self.span(start)).with_children(vec![e]))
            }
            TokKind::Ident => match t.text.as_str() {
                "true" | "false" => {
                    self.bump()?;
                    Ok(leaf(NodeKind::BoolLiteral, &t, &self.file))
                }
                "null" => {
                    self.bump()?;
                    Ok(leaf(NodeKind::NullLiteral, &t, &self.file))
                }
                "this" => {
                    self.bump()?;
                    if self.is("(") {
                        let args = self.args()?;
                        return Ok(AstNode::new(NodeKind::MethodCall, "this", self.span(start)).with_children(vec![args]));
                    }
                    Ok(leaf(NodeKind::This, &t, &self.file))
                }
                "super" => {
                    self.bump()?;
                    if self.is("(") {
                        let args = self.args()?;
                        return Ok(AstNode::new(NodeKind::MethodCall, "super", self.span(start)).with_children(vec![args]));
                    }
                    Ok(leaf(NodeKind::Name, &t, &self.file))
                }
                "new" => self.creator(),
                kw if is_reserved(kw) => Err(self.error(&format!("unexpected keyword '{kw}'"))),
                _ => {
                    self.bump()?;
                    if self.is("(") {
                        let args = self.args()?;
                        return Ok(AstNode::new(NodeKind::MethodCall, t.text, self.span(start)).with_children(vec![args]));
                    }
                    // primitive class literals such as byte[].class are not supported
                    Ok(leaf(NodeKind::Name, &t, &self.file))
                }
            },
            _ => Err(self.error(&format!("unexpected token '{}'", t.text))),
        }
    }

    fn creator(&mut self) -> PResult<AstNode> {
        let start = self.line();
        self.expect("new")?;
        let mut ty = self.qualified_name()?;
        if self.is("<") {
            ty.push_str(&self.type_args()?);
        }
        if self.is("[") {
            let mut children = Vec::new();
            let mut dims = 0;
            while self.is("[") {
                self.bump()?;
                if self.is("]") {
                    self.bump()?;
                    dims += 1;
                    continue;
                }
                children.push(self.expr()?);
                self.expect("]")?;
                dims += 1;
            }
            if self.is("{") {
                children.push(self.array_init()?);
            }
            if children.is_empty() {
                return Err(self.error("array creation needs a size or an initializer"));
            }
            let label = format!("{ty}{}", "[]".repeat(dims));
            return Ok(AstNode::new(NodeKind::ArrayCreation, label, self.span(start)).with_children(children));
        }
        let args = self.args()?;
        let mut children = vec![args];
        if self.is("{") {
            let bs = self.line();
            self.class_names.push(ty.clone());
            let members = self.class_members();
            self.class_names.pop();
            children.push(AstNode::new(NodeKind::ClassBody, ty.clone(), self.span(bs)).with_children(members?));
        }
        Ok(AstNode::new(NodeKind::ObjectCreation, ty, self.span(start)).with_children(children))
    }
}

fn binary_prec(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "|" => 3,
        "^" => 4,
        "&" => 5,
        "==" | "!=" => 6,
        "<" | ">" | "<=" | ">=" => 7,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        _ => return None,
    })
}

fn is_reserved(s: &str) -> bool {
    matches!(
        s,
        "class" | "interface" | "enum" | "if" | "else" | "try" | "catch" | "finally" | "return" | "throw"
            | "for" | "while" | "do" | "switch" | "case" | "break" | "continue" | "import" | "package"
            | "extends" | "implements" | "throws" | "instanceof"
    ) || MODIFIERS.contains(&s) && s != "default"
}

fn is_keyword_expr_start(s: &str) -> bool {
    matches!(s, "new" | "this" | "super" | "null" | "true" | "false" | "return" | "throw" | "if" | "try")
        || is_reserved(s)
}
