use std::collections::HashMap;

use super::{atom_id, AtomSchema, DomainError, DomainModel, GroundAction, GroundDomain, Term, Typed};
use crate::ltlf::Prop;

/// Every tuple of objects matching `params`' types, first parameter slowest.
fn instantiations<'a>(model: &DomainModel, params: &[Typed], objects: &'a [Typed]) -> Vec<Vec<&'a str>> {
    let candidates: Vec<Vec<&str>> = params
        .iter()
        .map(|p| {
            objects
                .iter()
                .filter(|o| model.is_subtype(&o.ty, &p.ty))
                .map(|o| o.name.as_str())
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for c in &candidates {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for &o in c {
                let mut t = prefix.clone();
                t.push(o);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn resolve(a: &AtomSchema, binding: &[&str]) -> String {
    let args: Vec<&str> = a
        .args
        .iter()
        .map(|t| match t {
            Term::Param(k) => binding[*k],
            Term::Object(o) => o.as_str(),
        })
        .collect();
    atom_id(&a.predicate, &args)
}

/// Instantiates every predicate and action schema over the typed objects.
///
/// Instantiations whose precondition requires an atom both true and false,
/// or an atom outside the typed universe, can never fire and are dropped.
pub fn ground(model: &DomainModel, objects: &[Typed]) -> Result<GroundDomain, DomainError> {
    let mut objs: Vec<Typed> = Vec::new();
    for o in objects {
        if !objs.iter().any(|x| x.name == o.name) {
            objs.push(o.clone());
        }
    }

    let mut atoms: Vec<(Prop, String, Vec<String>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut origin: HashMap<String, String> = HashMap::new();
    for p in &model.predicates {
        for binding in instantiations(model, &p.params, &objs) {
            let id = atom_id(&p.name, &binding);
            let text = std::iter::once(p.name.as_str())
                .chain(binding.iter().copied())
                .collect::<Vec<_>>()
                .join(" ");
            if let Some(prev) = origin.get(&id) {
                return Err(DomainError::AtomCollision(prev.clone(), text));
            }
            let prop = Prop::new(&id).map_err(|e| DomainError::Parse {
                line: 0,
                col: 0,
                msg: e.to_string(),
            })?;
            index.insert(id.clone(), atoms.len());
            origin.insert(id, text);
            atoms.push((prop, p.name.clone(), binding.iter().map(|s| s.to_string()).collect()));
        }
    }

    let mut actions = Vec::new();
    for schema in &model.actions {
        'binding: for binding in instantiations(model, &schema.params, &objs) {
            let mut pre_pos = Vec::new();
            let mut pre_neg = Vec::new();
            for (a, positive) in &schema.precondition {
                match (index.get(&resolve(a, &binding)), positive) {
                    (Some(&i), true) => pre_pos.push(i),
                    (Some(&i), false) => pre_neg.push(i),
                    (None, true) => continue 'binding,
                    (None, false) => {}
                }
            }
            pre_pos.sort_unstable();
            pre_pos.dedup();
            pre_neg.sort_unstable();
            pre_neg.dedup();
            if pre_pos.iter().any(|i| pre_neg.contains(i)) {
                continue;
            }
            let effect = |list: &[AtomSchema]| -> Result<Vec<usize>, DomainError> {
                let mut out: Vec<usize> = list
                    .iter()
                    .map(|a| {
                        let id = resolve(a, &binding);
                        index.get(&id).copied().ok_or(DomainError::UnknownAtom(id))
                    })
                    .collect::<Result<_, _>>()?;
                out.sort_unstable();
                out.dedup();
                Ok(out)
            };
            let add = effect(&schema.add)?;
            let del = effect(&schema.del)?;
            actions.push(GroundAction {
                name: schema.name.clone(),
                args: binding.iter().map(|s| s.to_string()).collect(),
                pre_pos,
                pre_neg,
                add,
                del,
            });
        }
    }
    Ok(GroundDomain::new(model.clone(), objs, atoms, actions))
}
