//! Shared abstraction of example identifiers: the same concrete name in I
//! and S maps to the same `$v_i`; helper methods introduced by S map to
//! `$m_i`.

use std::collections::{BTreeMap, HashMap};

use crate::frontend::rename::{declared_methods, declared_vars, occurrences, rename};
use crate::frontend::AstNode;
use crate::pattern::{BindingRole, VarInfo};

use super::PairAnalysis;

pub struct Abstractor {
    vars: Vec<String>,
    methods: Vec<String>,
    assigned: HashMap<String, String>,
    roles: HashMap<String, BindingRole>,
    next_var: usize,
    next_method: usize,
}

impl Abstractor {
    pub fn new(a: &PairAnalysis) -> Abstractor {
        let mut vars = declared_vars(a.i_ast());
        for v in declared_vars(a.s_ast()) {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let in_i = declared_methods(a.i_ast());
        let methods = declared_methods(a.s_ast()).into_iter().filter(|m| !in_i.contains(m)).collect();
        Abstractor { vars, methods, assigned: HashMap::new(), roles: HashMap::new(), next_var: 0, next_method: 0 }
    }

    pub fn bind(&mut self, name: &str, role: BindingRole) {
        self.roles.entry(name.to_string()).or_insert(role);
    }

    /// Clone of `node` with example identifiers replaced by abstract ones,
    /// allocating new abstract names in order of first occurrence.
    pub fn abstract_node(&mut self, node: &AstNode) -> AstNode {
        let is_var = |s: &str| self.vars.iter().any(|v| v == s);
        let is_method = |s: &str| self.methods.iter().any(|m| m == s);
        let occ = occurrences(node, &is_var, &is_method);
        for (var, name) in occ {
            let key = if var { format!("v:{name}") } else { format!("m:{name}") };
            if self.assigned.contains_key(&key) {
                continue;
            }
            let abs = if var {
                self.next_var += 1;
                format!("$v_{}", self.next_var - 1)
            } else {
                self.next_method += 1;
                format!("$m_{}", self.next_method - 1)
            };
            self.assigned.insert(key, abs);
        }
        let mut out = node.clone();
        let assigned = &self.assigned;
        rename(
            &mut out,
            &|v| assigned.get(&format!("v:{v}")).cloned(),
            &|m| assigned.get(&format!("m:{m}")).cloned(),
        );
        out
    }

    pub fn into_var_map(self) -> BTreeMap<String, VarInfo> {
        let mut out = BTreeMap::new();
        for (key, abs) in &self.assigned {
            let (kind, name) = key.split_at(2);
            let role = if kind == "v:" { self.roles.get(name).copied() } else { None };
            out.insert(abs.clone(), VarInfo { concrete: name.to_string(), role });
        }
        out
    }
}
