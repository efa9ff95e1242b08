//! Critical-API identification: update reaching a security call, then an
//! overriding security method enclosing all edits, then a deleted call.

use crate::diff::{EditKind, EditOp};
use crate::frontend::render::is_type_like;
use crate::frontend::{ApiTable, NodeKind};
use crate::model::{backward_slice, NodeRef, ProgramModel};
use crate::pattern::{CriticalApi, Evidence};

use super::{InferError, PairAnalysis};

/// An input position of a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Port {
    Receiver,
    Arg(usize),
}

#[derive(Debug, Clone)]
pub struct CriticalSite {
    pub api: CriticalApi,
    /// The critical invocation in I (absent for overriding methods).
    pub call: Option<NodeRef>,
    /// The overriding method in I's model.
    pub method: Option<usize>,
    /// The update that led to the call, and the port it reaches.
    pub update: Option<EditOp>,
    pub port: Option<Port>,
}

/// Receiver and argument expressions of a call or object creation.
pub fn ports(model: &ProgramModel, call: &NodeRef) -> Vec<(Port, NodeRef)> {
    let node = model.node(call);
    let mut out = Vec::new();
    if let Some(r) = node.receiver() {
        if !is_type_like(r) && r.kind != NodeKind::This {
            out.push((Port::Receiver, call.child(0)));
        }
    }
    if let Some(ai) = node.children.iter().position(|c| c.kind == NodeKind::Args) {
        for i in 0..node.children[ai].children.len() {
            out.push((Port::Arg(i), call.child(ai).child(i)));
        }
    }
    out
}

/// Security-API call sites of a model, in source order.
pub fn security_calls(model: &ProgramModel) -> Vec<NodeRef> {
    let table = ApiTable::builtin();
    model.calls.values().filter(|c| table.is_security_api(&c.binding)).map(|c| c.node.clone()).collect()
}

pub fn identify_critical(a: &PairAnalysis) -> Result<CriticalSite, InferError> {
    if a.script.is_empty() {
        return Err(InferError::NoCriticalApi("the examples are identical".into()));
    }
    if let Some(site) = stage_update(a) {
        return Ok(site);
    }
    if let Some(site) = stage_override(a) {
        return Ok(site);
    }
    if let Some(site) = stage_deleted(a) {
        return Ok(site);
    }
    Err(InferError::NoCriticalApi(
        "no update reaches a security API, no overriding security method encloses the edits, and no security call is deleted"
            .into(),
    ))
}

fn call_site(a: &PairAnalysis, call: &NodeRef, evidence: Evidence, update: Option<EditOp>, port: Option<Port>) -> CriticalSite {
    let binding = a.model_i.calls[call].binding.clone();
    CriticalSite { api: CriticalApi { binding, evidence }, call: Some(call.clone()), method: None, update, port }
}

fn stage_update(a: &PairAnalysis) -> Option<CriticalSite> {
    let calls = security_calls(&a.model_i);
    let mut updates: Vec<&EditOp> = a.script.of_kind(EditKind::Update).collect();
    updates.sort_by(|x, y| x.a.cmp(&y.a));
    for op in updates {
        let path = op.a.as_ref()?;
        // the call encloses the update
        let enclosing = calls.iter().filter(|c| path.starts_with(&c.path)).max_by_key(|c| c.path.len());
        if let Some(c) = enclosing {
            let port = ports(&a.model_i, c).into_iter().find(|(_, p)| path.starts_with(&p.path)).map(|(p, _)| p);
            return Some(call_site(a, c, Evidence::DataDependentOnUpdate, Some(op.clone()), port));
        }
        // the update encloses the call
        if let Some(c) = calls.iter().find(|c| c.path.starts_with(path)) {
            return Some(call_site(a, c, Evidence::DataDependentOnUpdate, Some(op.clone()), None));
        }
        // the call's inputs are computed from the updated code
        for c in &calls {
            for (port, p) in ports(&a.model_i, c) {
                let slice = backward_slice(&a.model_i, &p);
                if slice.visited.iter().any(|v| v.path.starts_with(path) || path.starts_with(&v.path)) {
                    return Some(call_site(a, c, Evidence::DataDependentOnUpdate, Some(op.clone()), Some(port)));
                }
            }
        }
    }
    None
}

fn stage_override(a: &PairAnalysis) -> Option<CriticalSite> {
    let table = ApiTable::builtin();
    for (mid, m) in a.model_i.methods.iter().enumerate() {
        let Some(b) = &m.override_binding else { continue };
        if !table.is_security_api(b) {
            continue;
        }
        let Some(partner) = a.script.partner_of(&m.node.path) else { continue };
        let encloses = a.script.ops.iter().all(|op| match op.kind {
            EditKind::Delete | EditKind::Update => op.a.as_ref().is_some_and(|p| p.starts_with(&m.node.path) && p != &m.node.path),
            EditKind::Insert => op.b.as_ref().is_some_and(|p| p.starts_with(partner) && p != partner),
        });
        if encloses {
            return Some(CriticalSite {
                api: CriticalApi { binding: b.clone(), evidence: Evidence::OverriddenEnclosingEdits },
                call: None,
                method: Some(mid),
                update: None,
                port: None,
            });
        }
    }
    None
}

fn stage_deleted(a: &PairAnalysis) -> Option<CriticalSite> {
    let calls = security_calls(&a.model_i);
    let mut deletes: Vec<&EditOp> = a.script.of_kind(EditKind::Delete).collect();
    deletes.sort_by(|x, y| x.a.cmp(&y.a));
    for op in deletes {
        let path = op.a.as_ref()?;
        if let Some(c) = calls.iter().find(|c| c.path.starts_with(path)) {
            return Some(call_site(a, c, Evidence::DeletedCall, None, None));
        }
    }
    None
}
