use serde::{Deserialize, Serialize};

/// Source location of a node. Lines are 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub file: String,
    pub start_line: u32,
    pub end_line: u32,
}

impl Span {
    pub fn new(file: &str, start_line: u32, end_line: u32) -> Self {
        Span {
            file: file.to_string(),
            start_line,
            end_line,
        }
    }

    pub fn encloses(&self, other: &Span) -> bool {
        self.file == other.file
            && self.start_line <= other.start_line
            && other.end_line <= self.end_line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    CompilationUnit,
    Package,
    Import,
    Comment,
    ClassDecl,
    InterfaceDecl,
    Extends,
    Implements,
    ClassBody,
    MethodDecl,
    ConstructorDecl,
    Param,
    Throws,
    FieldDecl,
    Modifier,
    Annotation,
    TypeRef,
    // statements
    Block,
    LocalVarDecl,
    ExprStmt,
    If,
    Try,
    CatchClause,
    Finally,
    Return,
    Throw,
    // expressions
    Args,
    MethodCall,
    ObjectCreation,
    ArrayCreation,
    ArrayInit,
    ArrayAccess,
    FieldAccess,
    Name,
    This,
    StringLiteral,
    IntLiteral,
    CharLiteral,
    BoolLiteral,
    NullLiteral,
    Cast,
    Binary,
    Unary,
    Postfix,
    Assign,
    Conditional,
    Paren,
}

impl NodeKind {
    pub fn is_statement(self) -> bool {
        matches!(
            self,
            NodeKind::Block
                | NodeKind::LocalVarDecl
                | NodeKind::ExprStmt
                | NodeKind::If
                | NodeKind::Try
                | NodeKind::Return
                | NodeKind::Throw
        )
    }

    pub fn is_literal(self) -> bool {
        matches!(
            self,
            NodeKind::StringLiteral
                | NodeKind::IntLiteral
                | NodeKind::CharLiteral
                | NodeKind::BoolLiteral
                | NodeKind::NullLiteral
        )
    }

    pub fn is_method_like(self) -> bool {
        matches!(self, NodeKind::MethodDecl | NodeKind::ConstructorDecl)
    }

    pub fn is_type_decl(self) -> bool {
        matches!(self, NodeKind::ClassDecl | NodeKind::InterfaceDecl)
    }
}

/// A node of the parsed Java subset.
///
/// Leaves carry their verbatim token in `text`. Inner nodes carry a label
/// there instead (declared name, operator, callee name, created type) and
/// produce their source form through [`AstNode::render`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    pub children: Vec<AstNode>,
    pub text: String,
    pub span: Span,
}

impl AstNode {
    pub fn new(kind: NodeKind, text: impl Into<String>, span: Span) -> Self {
        AstNode {
            kind,
            children: Vec::new(),
            text: text.into(),
            span,
        }
    }

    pub fn with_children(mut self, children: Vec<AstNode>) -> Self {
        self.children = children;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
            && matches!(
                self.kind,
                NodeKind::Name
                    | NodeKind::This
                    | NodeKind::StringLiteral
                    | NodeKind::IntLiteral
                    | NodeKind::CharLiteral
                    | NodeKind::BoolLiteral
                    | NodeKind::NullLiteral
                    | NodeKind::TypeRef
                    | NodeKind::Modifier
                    | NodeKind::Annotation
                    | NodeKind::Comment
                    | NodeKind::Import
                    | NodeKind::Package
            )
    }

    pub fn line(&self) -> u32 {
        self.span.start_line
    }

    pub fn child(&self, kind: NodeKind) -> Option<&AstNode> {
        self.children.iter().find(|c| c.kind == kind)
    }

    pub fn children_of(&self, kind: NodeKind) -> impl Iterator<Item = &AstNode> {
        self.children.iter().filter(move |c| c.kind == kind)
    }

    /// Preorder traversal including `self`.
    pub fn walk(&self) -> Vec<&AstNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            for c in n.children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Chain of ancestors from `self` down to `target` (inclusive), found by
    /// identity.
    pub fn path_to<'a>(&'a self, target: &AstNode) -> Option<Vec<&'a AstNode>> {
        if std::ptr::eq(self, target) {
            return Some(vec![self]);
        }
        for c in &self.children {
            if let Some(mut p) = c.path_to(target) {
                p.insert(0, self);
                return Some(p);
            }
        }
        None
    }

    /// Follow a child-index path.
    pub fn at(&self, path: &[usize]) -> Option<&AstNode> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get(i)?;
        }
        Some(cur)
    }

    /// Child-index path from `self` to `target`, found by identity.
    pub fn index_path_to(&self, target: &AstNode) -> Option<Vec<usize>> {
        if std::ptr::eq(self, target) {
            return Some(Vec::new());
        }
        for (i, c) in self.children.iter().enumerate() {
            if let Some(mut p) = c.index_path_to(target) {
                p.insert(0, i);
                return Some(p);
            }
        }
        None
    }

    // --- accessors for specific kinds ---

    /// Type of a declaration (field, local, param, method return, catch).
    pub fn decl_type(&self) -> Option<&str> {
        self.child(NodeKind::TypeRef).map(|t| t.text.as_str())
    }

    /// Initializer of a field or local declaration.
    pub fn initializer(&self) -> Option<&AstNode> {
        match self.kind {
            NodeKind::FieldDecl | NodeKind::LocalVarDecl => self
                .children
                .iter()
                .find(|c| !matches!(c.kind, NodeKind::TypeRef | NodeKind::Modifier | NodeKind::Annotation)),
            _ => None,
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &AstNode> {
        self.children_of(NodeKind::Param)
    }

    pub fn body(&self) -> Option<&AstNode> {
        self.child(NodeKind::Block)
    }

    pub fn has_annotation(&self, name: &str) -> bool {
        self.children_of(NodeKind::Annotation).any(|a| a.text == name)
    }

    pub fn has_modifier(&self, name: &str) -> bool {
        self.children_of(NodeKind::Modifier).any(|a| a.text == name)
    }

    /// Arguments of a call or object creation.
    pub fn args(&self) -> &[AstNode] {
        self.child(NodeKind::Args)
            .map(|a| a.children.as_slice())
            .unwrap_or(&[])
    }

    /// Receiver of a method call, when present.
    pub fn receiver(&self) -> Option<&AstNode> {
        if self.kind == NodeKind::MethodCall && self.children.len() == 2 {
            Some(&self.children[0])
        } else {
            None
        }
    }

    /// Anonymous class body of an object creation.
    pub fn class_body(&self) -> Option<&AstNode> {
        self.child(NodeKind::ClassBody)
    }

    /// Members of a class, interface, anonymous body or compilation unit.
    pub fn members(&self) -> impl Iterator<Item = &AstNode> {
        self.children.iter().filter(|c| {
            matches!(
                c.kind,
                NodeKind::ClassDecl
                    | NodeKind::InterfaceDecl
                    | NodeKind::MethodDecl
                    | NodeKind::ConstructorDecl
                    | NodeKind::FieldDecl
            ) || c.kind.is_statement()
        })
    }

    /// Supertype simple names from `extends`/`implements` clauses.
    pub fn supertypes(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.children {
            if matches!(c.kind, NodeKind::Extends | NodeKind::Implements) {
                for t in &c.children {
                    out.push(simple_type_name(&t.text).to_string());
                }
            }
        }
        out
    }

    /// Statements of a block (comments excluded).
    pub fn statements(&self) -> impl Iterator<Item = &AstNode> {
        self.children.iter().filter(|c| c.kind.is_statement())
    }

    /// Line of the declaration header: the first non-annotation child.
    pub fn decl_line(&self) -> u32 {
        self.children
            .iter()
            .find(|c| c.kind != NodeKind::Annotation)
            .map(|c| c.span.start_line)
            .unwrap_or(self.span.start_line)
    }
}

/// `java.util.List<String>[]` -> `List`.
pub fn simple_type_name(ty: &str) -> &str {
    let no_generic = ty.split('<').next().unwrap_or(ty);
    let no_array = no_generic.trim_end_matches("...").trim_end_matches("[]");
    let no_array = no_array.split('[').next().unwrap_or(no_array);
    no_array.rsplit('.').next().unwrap_or(no_array).trim()
}

/// `Map<String, byte[]>` -> `Map`, keeping array dims: `byte[]` stays.
pub fn erase_generics(ty: &str) -> String {
    let mut out = String::new();
    let mut depth = 0usize;
    for ch in ty.chars() {
        match ch {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(ch),
            _ => {}
        }
    }
    let out = out.replace("...", "[]");
    // qualified names are reduced to their simple form
    match out.find('[') {
        Some(i) => format!("{}{}", simple_type_name(&out[..i]), &out[i..]),
        None => simple_type_name(&out).to_string(),
    }
}
