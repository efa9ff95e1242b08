//! Generators and independent oracles shared by the module tests and the
//! acceptance suite.

use std::collections::BTreeSet;

use misuse_forge::eval::{Label, LabelSet};
use misuse_forge::model::{backward_slice, EndpointKind, NodeRef, ProgramModel};
use misuse_forge::pattern::{Constraint, Pattern};
use misuse_forge::store::{PatternPack, Provenance, SCHEMA_VERSION};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook recursive edit distance over (i, j) suffixes with a memo table.
pub fn lev_oracle(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut Vec<Vec<Option<usize>>>) -> usize {
        if let Some(v) = memo[i][j] {
            return v;
        }
        let v = if i == a.len() {
            b.len() - j
        } else if j == b.len() {
            a.len() - i
        } else {
            let sub = go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
            let del = go(a, b, i + 1, j, memo) + 1;
            let ins = go(a, b, i, j + 1, memo) + 1;
            sub.min(del).min(ins)
        };
        memo[i][j] = Some(v);
        v
    }
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    go(a, b, 0, 0, &mut memo)
}

pub fn call_with(n: usize) -> String {
    let args: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    format!("return f({});", args.join(", "))
}

pub fn unit(stmt: &str) -> String {
    format!("class T {{\n    void m() {{\n        {stmt}\n    }}\n}}\n")
}

/// Dropping the last argument of `return f(1, ..., n);` removes two of its
/// `2n + 4` normalized tokens.
pub fn pair_at(n: usize) -> (String, String, f64) {
    let (a, b) = (call_with(n), call_with(n - 1));
    let expected = 1.0 - 2.0 / (2 * n + 4) as f64;
    (a, b, expected)
}

/// Expression of the generated language. Variable reads carry the
/// definitions that reach them, fixed when the program is generated.
#[derive(Debug, Clone)]
pub enum Expr {
    Lit(i64),
    Var(String, Vec<usize>),
    Add(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
}

pub struct Def {
    line: u32,
    rhs: Expr,
}

pub struct Gen {
    rng: ChaCha8Rng,
    lines: Vec<String>,
    defs: Vec<Def>,
    /// variable -> reaching definition ids
    env: Vec<(String, Vec<usize>)>,
    next_var: usize,
}

pub const FIRST_LINE: u32 = 3;

impl Gen {
    fn line_no(&self) -> u32 {
        FIRST_LINE + self.lines.len() as u32
    }

    fn read(&mut self) -> Option<Expr> {
        if self.env.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..self.env.len());
        let (name, defs) = self.env[i].clone();
        Some(Expr::Var(name, defs))
    }

    fn expr(&mut self, depth: u32) -> Expr {
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..4) };
        match choice {
            0 => Expr::Lit(self.rng.gen_range(0..100)),
            1 => self.read().unwrap_or(Expr::Lit(7)),
            2 => Expr::Add(Box::new(self.expr(depth - 1)), Box::new(self.expr(depth - 1))),
            _ => Expr::Abs(Box::new(self.expr(depth - 1))),
        }
    }

    fn define(&mut self, name: &str, rhs: Expr, line: u32) {
        let id = self.defs.len();
        self.defs.push(Def { line, rhs });
        match self.env.iter_mut().find(|(n, _)| n == name) {
            Some(e) => e.1 = vec![id],
            None => self.env.push((name.to_string(), vec![id])),
        }
    }

    fn assignment(&mut self, indent: &str) -> bool {
        if self.env.is_empty() {
            return false;
        }
        let target = self.env[self.rng.gen_range(0..self.env.len())].0.clone();
        let rhs = self.expr(2);
        let line = self.line_no();
        self.lines.push(format!("{indent}{target} = {};", render(&rhs)));
        self.define(&target, rhs, line);
        true
    }

    fn statement(&mut self) {
        match self.rng.gen_range(0..6) {
            0..=2 => {
                let name = format!("v{}", self.next_var);
                self.next_var += 1;
                let rhs = self.expr(2);
                let line = self.line_no();
                self.lines.push(format!("        int {name} = {};", render(&rhs)));
                self.define(&name, rhs, line);
            }
            3 => {
                if !self.assignment("        ") {
                    self.lines.push("        noop();".into());
                }
            }
            n => {
                let Some(cond) = self.read() else {
                    self.lines.push("        noop();".into());
                    return;
                };
                self.lines.push(format!("        if ({} > 0) {{", render(&cond)));
                let before = self.env.clone();
                self.assignment("            ");
                let then_env = std::mem::replace(&mut self.env, before.clone());
                if n == 5 {
                    self.lines.push("        } else {".into());
                    self.assignment("            ");
                }
                self.lines.push("        }".into());
                let else_env = std::mem::take(&mut self.env);
                self.env = join(&then_env, &else_env);
            }
        }
    }
}

pub fn join(a: &[(String, Vec<usize>)], b: &[(String, Vec<usize>)]) -> Vec<(String, Vec<usize>)> {
    let mut out = a.to_vec();
    for (name, defs) in b {
        let e = out.iter_mut().find(|(n, _)| n == name).expect("same variables on both branches");
        for d in defs {
            if !e.1.contains(d) {
                e.1.push(*d);
            }
        }
    }
    out
}

pub fn render(e: &Expr) -> String {
    match e {
        Expr::Lit(v) => v.to_string(),
        Expr::Var(n, _) => n.clone(),
        Expr::Add(a, b) => format!("{} + {}", render(a), render(b)),
        Expr::Abs(a) => format!("Math.abs({})", render(a)),
    }
}

pub struct Program {
    pub source: String,
    sink: Expr,
    sink_line: u32,
    defs: Vec<Def>,
}

pub fn generate(seed: u64) -> Program {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), lines: Vec::new(), defs: Vec::new(), env: Vec::new(), next_var: 0 };
    let n = g.rng.gen_range(1..=11);
    for _ in 0..n {
        g.statement();
    }
    let sink = g.read().unwrap_or(Expr::Lit(1));
    let sink_line = g.line_no();
    g.lines.push(format!("        sink({});", render(&sink)));
    let source = format!("class P {{\n    void m() {{\n{}\n    }}\n}}\n", g.lines.join("\n"));
    Program { source, sink, sink_line, defs: g.defs }
}

pub type Ends = BTreeSet<(u32, &'static str, Option<String>)>;

/// Def-use closure computed directly on the generated program.
pub fn slice_oracle(p: &Program) -> (BTreeSet<u32>, Ends) {
    fn eval(p: &Program, e: &Expr, line: u32, opaque: bool, stmts: &mut BTreeSet<u32>, ends: &mut Ends, seen: &mut BTreeSet<(usize, bool)>) {
        match e {
            Expr::Lit(v) => {
                ends.insert((line, if opaque { "computed" } else { "literal" }, Some(v.to_string())));
            }
            Expr::Var(_, defs) => {
                for &d in defs {
                    stmts.insert(p.defs[d].line);
                    if seen.insert((d, opaque)) {
                        eval(p, &p.defs[d].rhs, p.defs[d].line, opaque, stmts, ends, seen);
                    }
                }
            }
            Expr::Add(a, b) => {
                eval(p, a, line, true, stmts, ends, seen);
                eval(p, b, line, true, stmts, ends, seen);
            }
            Expr::Abs(a) => {
                eval(p, a, line, true, stmts, ends, seen);
                ends.insert((line, "unknown", None));
            }
        }
    }
    let (mut stmts, mut ends, mut seen) = (BTreeSet::new(), Ends::new(), BTreeSet::new());
    eval(p, &p.sink, p.sink_line, false, &mut stmts, &mut ends, &mut seen);
    (stmts, ends)
}

pub fn sink_arg(model: &ProgramModel) -> NodeRef {
    let call = model.calls.keys().find(|r| model.node(r).text == "sink").expect("sink call").clone();
    call.child(0).child(0)
}

pub fn slice_of(p: &Program) -> (BTreeSet<u32>, Ends) {
    let model = super::model_one(&p.source);
    let s = backward_slice(&model, &sink_arg(&model));
    let stmts = s.statements.iter().map(|r| model.line(r)).collect();
    let ends = s
        .endpoints
        .iter()
        .map(|e| {
            let kind = match e.kind {
                EndpointKind::Literal => "literal",
                EndpointKind::Computed => "computed",
                EndpointKind::Unknown => "unknown",
                other => panic!("unexpected endpoint {other:?}"),
            };
            (model.line(e.node.as_ref().expect("endpoint node")), kind, e.value.clone())
        })
        .collect();
    (stmts, ends)
}

pub const ALPHABET: &[char] = &['a', 'Z', '0', '-', '/', ' ', '"', '\\', '\n', '\t', 'é', '鍵', '🔑', '$', '{', '\u{1}'];

pub fn text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..12);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

pub fn nonempty(rng: &mut ChaCha8Rng) -> String {
    format!("x{}", text(rng))
}

pub fn mutate(p: &mut Pattern, rng: &mut ChaCha8Rng) {
    for c in &mut p.constraints {
        match c {
            Constraint::OptionSet { insecure_options, secure_options, .. } => {
                *insecure_options = (0..rng.gen_range(1..4)).map(|k| format!("i{k}{}", text(rng))).collect();
                *secure_options = (0..rng.gen_range(1..4)).map(|k| format!("s{k}{}", text(rng))).collect();
            }
            Constraint::IntRange { threshold, .. } => *threshold = rng.gen(),
            Constraint::ConstantPlaceholder { .. } => {}
        }
    }
    for f in &mut p.fixed_args {
        f.value = text(rng);
    }
    p.fix.notes = (0..rng.gen_range(0..3)).map(|_| text(rng)).collect();
    p.source_example_ids = (0..rng.gen_range(1..3)).map(|_| nonempty(rng)).collect();
    for v in p.var_map.values_mut() {
        v.concrete = nonempty(rng);
    }
    if rng.gen_bool(0.3) {
        p.template.deps.clear();
    }
    p.id = p.compute_id();
}

pub fn random_pack(rng: &mut ChaCha8Rng, base: &[Pattern]) -> PatternPack {
    let mut patterns: Vec<Pattern> = Vec::new();
    for _ in 0..rng.gen_range(0..=8) {
        let mut p = base.choose(rng).unwrap().clone();
        mutate(&mut p, rng);
        if !patterns.iter().any(|q| q.id == p.id) {
            patterns.push(p);
        }
    }
    PatternPack {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance { tool_version: nonempty(rng), created: text(rng) },
        patterns,
    }
}

pub fn label(file: u32, line: u32, class: &str) -> Label {
    Label { file: format!("F{file}.java"), line, class: class.to_string() }
}

pub fn random_set(rng: &mut ChaCha8Rng, max: usize) -> LabelSet {
    let classes = ["Cipher", "KeyStore", "Random"];
    (0..rng.gen_range(0..=max)).map(|_| label(rng.gen_range(0..4), rng.gen_range(1..6), classes[rng.gen_range(0..3)])).collect()
}

