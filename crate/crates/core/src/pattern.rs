//! Vulnerability-repair patterns: template, matching data and abstract fix.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::frontend::render::{stmt_tokens, Role};
use crate::frontend::normalize::collapse_options;
use crate::frontend::{parse_statement, ApiBinding, AstNode, PlaceholderKind, StubCatalog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Evidence {
    DataDependentOnUpdate,
    OverriddenEnclosingEdits,
    DeletedCall,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalApi {
    #[serde(flatten)]
    pub binding: ApiBinding,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StmtRole {
    Critical,
    Anchor,
    Context,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateStmt {
    /// Abstract source text, e.g. `SecretKey $v_0 = new SecretKeySpec(ByteLiterals.CONSTANT_ARRAY, "AES");`
    pub text: String,
    /// Shape tokens: variables renumbered, literals kept, option lists folded.
    pub tokens: Vec<String>,
    pub role: StmtRole,
    /// Line in the insecure example.
    pub line: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Template {
    pub stmts: Vec<TemplateStmt>,
    /// Data-dependency edges `(definition, use)` between statement indices.
    pub deps: Vec<(usize, usize)>,
}

/// A security API called by the contextual code, with the literal
/// arguments it was called with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Anchor {
    pub binding: ApiBinding,
    pub fixed_args: Vec<FixedArg>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedArg {
    pub param_index: usize,
    /// Unquoted string value.
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RangeTarget {
    /// The argument value itself.
    Direct,
    /// The size of an array allocation feeding the argument.
    ArraySize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Constraint {
    #[serde(rename_all = "camelCase")]
    ConstantPlaceholder { param_index: usize, placeholder: PlaceholderKind },
    #[serde(rename_all = "camelCase")]
    OptionSet { param_index: usize, insecure_options: Vec<String>, secure_options: Vec<String> },
    /// Values `>= threshold` are secure.
    #[serde(rename_all = "camelCase")]
    IntRange { param_index: usize, threshold: i64, target: RangeTarget },
}

impl Constraint {
    pub fn param_index(&self) -> usize {
        match self {
            Constraint::ConstantPlaceholder { param_index, .. }
            | Constraint::OptionSet { param_index, .. }
            | Constraint::IntRange { param_index, .. } => *param_index,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Constraint::ConstantPlaceholder { .. } => "constantPlaceholder",
            Constraint::OptionSet { .. } => "optionSet",
            Constraint::IntRange { .. } => "intRange",
        }
    }
}

/// How a pattern variable is bound at a match site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BindingRole {
    /// Variable declared or assigned by the critical statement.
    DeclaredTarget,
    Receiver,
    Arg(usize),
    /// Formal parameter of the overriding method.
    Param(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VarInfo {
    /// Identifier used in the examples.
    pub concrete: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<BindingRole>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FixKind {
    Expr,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InsertionAnchor {
    BeforeContainerMethod,
    BeforeMatchedStatement,
    AfterMatchedStatement,
    ReplaceMethodBody,
}

impl fmt::Display for InsertionAnchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InsertionAnchor::BeforeContainerMethod => "before the container method of the matched statement",
            InsertionAnchor::BeforeMatchedStatement => "before the matched statement",
            InsertionAnchor::AfterMatchedStatement => "after the matched statement",
            InsertionAnchor::ReplaceMethodBody => "as the body of the matched method",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixBlock {
    pub insertion_anchor: InsertionAnchor,
    /// Abstract Java text: members for `BeforeContainerMethod`,
    /// statements otherwise.
    pub body: String,
}

/// Which expression an expression fix replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FixTarget {
    /// Constant origins of the critical call's argument.
    ArgOrigin(usize),
    /// Constant origins of the receiver.
    ReceiverOrigin,
    /// The critical call itself.
    Call,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AbstractFix {
    pub kind: FixKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<FixTarget>,
    /// Expression (for `Expr`) or statement replacing the matched one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
    #[serde(default)]
    pub blocks: Vec<FixBlock>,
    #[serde(default)]
    pub remove_matched: bool,
    /// Instructional comments from the secure example, verbatim.
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pattern {
    pub id: String,
    pub critical_api: CriticalApi,
    pub template: Template,
    pub anchors: Vec<Anchor>,
    /// Literal arguments of the critical call that must match exactly.
    pub fixed_args: Vec<FixedArg>,
    pub constraints: Vec<Constraint>,
    pub fix: AbstractFix,
    /// Abstract name (`$v_i`, `$m_i`) -> example identifier.
    pub var_map: BTreeMap<String, VarInfo>,
    pub source_example_ids: Vec<String>,
}

impl Pattern {
    /// Simple name of the critical class, used as the report class.
    pub fn class_name(&self) -> &str {
        self.critical_api.binding.class_simple_name()
    }

    pub fn compute_id(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.critical_api.binding.to_string().as_bytes());
        for s in &self.template.stmts {
            h.update([0u8]);
            h.update(s.tokens.join(" ").as_bytes());
        }
        h.update([1u8]);
        h.update(serde_json::to_string(&self.constraints).expect("serializable").as_bytes());
        h.update(serde_json::to_string(&self.fixed_args).expect("serializable").as_bytes());
        h.update(serde_json::to_string(&self.anchors).expect("serializable").as_bytes());
        let digest = h.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("{}-{hex}", self.class_name().to_lowercase())
    }

    /// Matching key used by merge: everything except option literals.
    pub fn shape_key(&self) -> String {
        let cons: Vec<String> = self
            .constraints
            .iter()
            .map(|c| match c {
                Constraint::OptionSet { param_index, .. } => format!("optionSet:{param_index}"),
                other => serde_json::to_string(other).expect("serializable"),
            })
            .collect();
        let stmts: Vec<String> = self.template.stmts.iter().map(|s| s.tokens.join(" ")).collect();
        format!(
            "{}|{}|{:?}|{}|{}|{}",
            self.critical_api.binding,
            stmts.join(" ; "),
            self.template.deps,
            serde_json::to_string(&self.anchors).expect("serializable"),
            serde_json::to_string(&self.fixed_args).expect("serializable"),
            cons.join(",")
        )
    }
}

/// Token text standing for a folded option list.
pub const OPTIONS_TOKEN: &str = "$options";

/// Shape tokens of a statement: variables renumbered `$v_i` by first
/// occurrence, literals kept verbatim, option-stub argument lists folded.
pub fn shape_tokens(stmt: &AstNode) -> Vec<String> {
    let toks = stmt_tokens(stmt);
    let folded = collapse_options(&toks);
    let mut vars: BTreeMap<String, String> = BTreeMap::new();
    let mut out = Vec::with_capacity(folded.len());
    let catalog = StubCatalog::default();
    for (i, t) in folded.iter().enumerate() {
        let in_options = t.role == Role::Lit
            && i >= 2
            && folded[i - 1].text == "("
            && folded[i - 2].role == Role::Type
            && catalog.is_string_options_type(&folded[i - 2].text);
        match t.role {
            Role::Var => {
                let n = vars.len();
                out.push(vars.entry(t.text.clone()).or_insert_with(|| format!("$v_{n}")).clone());
            }
            _ if in_options => out.push(OPTIONS_TOKEN.to_string()),
            _ => out.push(t.text.clone()),
        }
    }
    out
}

/// Shape tokens of abstract statement text.
pub fn shape_of_text(text: &str) -> Vec<String> {
    match parse_statement(text, "<template>") {
        Ok(n) => shape_tokens(&n),
        Err(_) => text.split_whitespace().map(str::to_string).collect(),
    }
}
