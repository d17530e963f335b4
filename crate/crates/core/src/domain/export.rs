//! Export of reach-avoid problems as plain final-state PDDL.
//!
//! A constraint on intermediate states is compiled into the action set:
//! every action requires `(constraint_satisfied)` and clears it, and one
//! parameterless check action per constraint disjunct re-establishes it when
//! the constraint holds. Erasing the check actions from a plan for the
//! exported problem gives a plan for the original one.

use super::pddl::problem_text;
use super::{ActionSchema, AtomSchema, DomainError, GroundDomain, GroundProblem, PredicateSchema, Term};
use crate::bdd::{GoalExpression, Literal};

pub const CONSTRAINT_PREDICATE: &str = "constraint_satisfied";
pub const CHECK_ACTION_PREFIX: &str = "check-constraint";

fn ground_atom_schema(d: &GroundDomain, l: &Literal) -> Result<AtomSchema, DomainError> {
    let i = d
        .atom_index(l.prop.as_str())
        .ok_or_else(|| DomainError::UnknownAtom(l.prop.to_string()))?;
    let (pred, args) = d.atom_parts(i);
    Ok(AtomSchema {
        predicate: pred.to_string(),
        args: args.iter().map(|a| Term::Object(a.clone())).collect(),
    })
}

fn pddl_literal(d: &GroundDomain, l: &Literal) -> Result<String, DomainError> {
    let i = d
        .atom_index(l.prop.as_str())
        .ok_or_else(|| DomainError::UnknownAtom(l.prop.to_string()))?;
    let (pred, args) = d.atom_parts(i);
    let mut atom = format!("({pred}");
    for a in args {
        atom.push(' ');
        atom.push_str(a);
    }
    atom.push(')');
    Ok(if l.positive {
        atom
    } else {
        format!("(not {atom})")
    })
}

fn pddl_goal(d: &GroundDomain, g: &GoalExpression) -> Result<String, DomainError> {
    let mut parts: Vec<String> = g
        .required
        .iter()
        .map(|l| pddl_literal(d, l))
        .collect::<Result<_, _>>()?;
    if !g.disjuncts.is_empty() {
        let mut alts = Vec::new();
        for c in &g.disjuncts {
            let lits: Vec<String> = c.iter().map(|l| pddl_literal(d, l)).collect::<Result<_, _>>()?;
            alts.push(format!("(and {})", lits.join(" ")));
        }
        parts.push(format!("(or {})", alts.join(" ")));
    }
    Ok(format!("(and {})", parts.join(" ")))
}

fn has_negative(g: &GoalExpression) -> bool {
    g.required.iter().chain(g.disjuncts.iter().flatten()).any(|l| !l.positive)
}

fn require(reqs: &mut Vec<String>, r: &str) {
    if !reqs.iter().any(|x| x == r) {
        reqs.push(r.to_string());
    }
}

/// Domain and problem text for `p` as a final-state planning task.
pub fn export_constrained_pddl(p: &GroundProblem) -> Result<(String, String), DomainError> {
    let d = &p.domain;
    let mut model = d.model.clone();
    let mut objects: Vec<_> = d
        .objects
        .iter()
        .filter(|o| !model.constants.iter().any(|c| c.name == o.name))
        .cloned()
        .collect();

    if !p.constraint.is_top() {
        if model.predicate(CONSTRAINT_PREDICATE).is_some() {
            return Err(DomainError::Inexpressible(format!(
                "domain already declares `{CONSTRAINT_PREDICATE}`"
            )));
        }
        // check actions name ground atoms directly, so objects become constants
        model.constants.append(&mut objects);
        model.predicates.push(PredicateSchema {
            name: CONSTRAINT_PREDICATE.into(),
            params: Vec::new(),
        });
        let flag = AtomSchema {
            predicate: CONSTRAINT_PREDICATE.into(),
            args: Vec::new(),
        };
        for a in &mut model.actions {
            a.precondition.push((flag.clone(), true));
            a.del.push(flag.clone());
        }
        let required: Vec<(AtomSchema, bool)> = p
            .constraint
            .required
            .iter()
            .map(|l| Ok((ground_atom_schema(d, l)?, l.positive)))
            .collect::<Result<_, DomainError>>()?;
        let alternatives: Vec<&[Literal]> = if p.constraint.disjuncts.is_empty() {
            vec![&[]]
        } else {
            p.constraint.disjuncts.iter().map(Vec::as_slice).collect()
        };
        for (k, alt) in alternatives.into_iter().enumerate() {
            let mut pre = required.clone();
            for l in alt {
                pre.push((ground_atom_schema(d, l)?, l.positive));
            }
            model.actions.push(ActionSchema {
                name: format!("{CHECK_ACTION_PREFIX}-{k}"),
                params: Vec::new(),
                precondition: pre,
                add: vec![flag.clone()],
                del: Vec::new(),
            });
        }
        if has_negative(&p.constraint) {
            require(&mut model.requirements, ":negative-preconditions");
        }
    }
    if has_negative(&p.goal) {
        require(&mut model.requirements, ":negative-preconditions");
    }
    if !p.goal.disjuncts.is_empty() {
        require(&mut model.requirements, ":disjunctive-preconditions");
    }

    let init: Vec<(String, Vec<String>)> = p
        .start
        .ones()
        .map(|i| {
            let (pred, args) = d.atom_parts(i);
            (pred.to_string(), args.to_vec())
        })
        .collect();
    let goal = pddl_goal(d, &p.goal)?;
    let problem = problem_text(
        &format!("{}-subproblem", model.name),
        &model.name,
        &objects,
        &init,
        &goal,
    );
    Ok((model.to_pddl(), problem))
}
