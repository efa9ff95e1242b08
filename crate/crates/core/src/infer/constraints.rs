//! Constraints from the stub conventions and from integer updates.

use crate::diff::EditKind;
use crate::model::slice::{parse_int, unquote};
use crate::model::{backward_slice, const_origin, EndpointKind, NodeRef, OriginKind, ProgramModel, Slice};
use crate::pattern::{Constraint, FixedArg, RangeTarget};

use super::{ports, stmt_of, CriticalSite, InferError, PairAnalysis, Port};

type Detected = (Vec<Constraint>, Vec<FixedArg>, Vec<String>);

/// The critical call's counterpart in S: same binding, preferably in the
/// statement matched with the critical one.
pub fn partner_call(a: &PairAnalysis, call: &NodeRef) -> Option<NodeRef> {
    let binding = &a.model_i.calls[call].binding;
    let istmt = stmt_of(&a.model_i, call);
    let sstmt = a.script.partner_of(&istmt.path);
    let same: Vec<&NodeRef> = a.model_s.calls.values().filter(|c| &c.binding == binding).map(|c| &c.node).collect();
    same.iter()
        .find(|c| sstmt.is_some_and(|p| c.path.starts_with(p)))
        .or_else(|| same.first())
        .map(|c| (*c).clone())
}

fn arg_slices(model: &ProgramModel, call: &NodeRef) -> Vec<(usize, Slice)> {
    ports(model, call)
        .into_iter()
        .filter_map(|(p, r)| match p {
            Port::Arg(i) => Some((i, backward_slice(model, &r))),
            Port::Receiver => None,
        })
        .collect()
}

fn options(slice: &Slice) -> Vec<String> {
    let mut out = Vec::new();
    for e in &slice.endpoints {
        if e.kind == EndpointKind::OptionLiteral && !e.in_size {
            let v = e.string_value().unwrap_or_default();
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

pub fn detect_constraints(a: &PairAnalysis, site: &CriticalSite) -> Result<Detected, InferError> {
    let Some(call) = &site.call else { return Ok((vec![], vec![], vec![])) };
    let mut constraints = Vec::new();
    let mut notes = Vec::new();
    let i_slices = arg_slices(&a.model_i, call);
    let s_call = partner_call(a, call);
    let s_slices = s_call.as_ref().map(|c| arg_slices(&a.model_s, c)).unwrap_or_default();
    let s_slice = |i: usize| s_slices.iter().find(|(j, _)| *j == i).map(|(_, s)| s);

    for (i, slice) in &i_slices {
        let placeholder = slice.endpoints.iter().find_map(|e| match e.kind {
            EndpointKind::Placeholder(k) if !e.in_size => Some(k),
            _ => None,
        });
        if let Some(kind) = placeholder {
            if s_slice(*i).is_some_and(|s| s.endpoints.iter().any(|e| matches!(e.kind, EndpointKind::Placeholder(_)))) {
                return Err(InferError::StubMisuse(format!(
                    "a constant placeholder reaches argument {i} of {} in the secure example",
                    site.api.binding
                )));
            }
            constraints.push(Constraint::ConstantPlaceholder { param_index: *i, placeholder: kind });
            continue;
        }
        let insecure = options(slice);
        if !insecure.is_empty() {
            let secure = s_slice(*i).map(options).unwrap_or_default();
            if secure.is_empty() {
                return Err(InferError::InvalidOptionSet(format!("argument {i} has insecure options but no secure options")));
            }
            if let Some(common) = insecure.iter().find(|o| secure.contains(o)) {
                return Err(InferError::InvalidOptionSet(format!("option {common:?} is listed as both insecure and secure")));
            }
            constraints.push(Constraint::OptionSet { param_index: *i, insecure_options: insecure, secure_options: secure });
        }
    }

    for op in a.script.of_kind(EditKind::Update) {
        let (Some(pa), Some(pb)) = (&op.a, &op.b) else { continue };
        let (Some(vi), Some(vs)) = (int_at(&a.model_i, pa), int_at(&a.model_s, pb)) else { continue };
        for (i, slice) in &i_slices {
            let Some(ep) = slice.endpoints.iter().find(|e| e.node.as_ref().is_some_and(|n| &n.path == pa)) else { continue };
            if constraints.iter().any(|c| c.param_index() == *i) {
                continue;
            }
            if vi < vs {
                let target = if ep.in_size { RangeTarget::ArraySize } else { RangeTarget::Direct };
                constraints.push(Constraint::IntRange { param_index: *i, threshold: vs, target });
            } else {
                notes.push(format!("integer update {vi} -> {vs} on argument {i} does not raise the value"));
            }
        }
    }

    let mut fixed = Vec::new();
    for (i, slice) in &i_slices {
        if constraints.iter().any(|c| c.param_index() == *i) {
            continue;
        }
        let o = const_origin(slice);
        if o.kind == OriginKind::Literal && o.values.len() == 1 && o.values[0].starts_with('"') {
            fixed.push(FixedArg { param_index: *i, value: unquote(&o.values[0]) });
        }
    }
    constraints.sort_by_key(|c| c.param_index());
    Ok((constraints, fixed, notes))
}

fn int_at(model: &ProgramModel, path: &[usize]) -> Option<i64> {
    let n = model.units[0].ast.at(path)?;
    match n.kind {
        crate::frontend::NodeKind::IntLiteral => parse_int(&n.text),
        crate::frontend::NodeKind::Unary if n.text == "-" => {
            n.children.first().filter(|c| c.kind == crate::frontend::NodeKind::IntLiteral).and_then(|c| parse_int(&c.text)).map(|v| -v)
        }
        _ => None,
    }
}
