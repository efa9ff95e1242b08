use crate::pattern::{Constraint, Pattern};

fn union_into(dst: &mut Vec<String>, src: &[String]) {
    for s in src {
        if !dst.contains(s) {
            dst.push(s.clone());
        }
    }
}

/// Union patterns that share the critical API and template shape and
/// differ only in option-set literals. Inputs are visited in order of their
/// smallest source example id, so the result does not depend on input
/// order. Output is sorted by id.
pub fn merge(patterns: &[Pattern]) -> Vec<Pattern> {
    let mut ordered: Vec<&Pattern> = patterns.iter().collect();
    ordered.sort_by_cached_key(|p| (p.source_example_ids.iter().min().cloned(), p.id.clone()));
    let mut groups: Vec<(String, Pattern)> = Vec::new();
    for p in ordered {
        let key = p.shape_key();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            None => groups.push((key, p.clone())),
            Some((_, acc)) => {
                for (c, other) in acc.constraints.iter_mut().zip(&p.constraints) {
                    if let (
                        Constraint::OptionSet { insecure_options: ai, secure_options: as_, .. },
                        Constraint::OptionSet { insecure_options: bi, secure_options: bs, .. },
                    ) = (c, other)
                    {
                        union_into(ai, bi);
                        union_into(as_, bs);
                    }
                }
                union_into(&mut acc.source_example_ids, &p.source_example_ids);
                union_into(&mut acc.fix.notes, &p.fix.notes);
            }
        }
    }
    let mut out: Vec<Pattern> = groups
        .into_iter()
        .map(|(_, mut p)| {
            p.id = p.compute_id();
            p
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
