//! STRIPS-style planning domains.
//!
//! Domains and problems are read from a PDDL subset ([`parse_pddl`]), grounded
//! into propositional actions ([`ground`]) and searched over bitset states.
//! A ground atom `(on b2 b1)` is the proposition `on_b2_b1`.

mod export;
mod ground;
mod pddl;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bdd::{GoalExpression, Literal};
use crate::ltlf::{Prop, WorldState};

pub use export::{export_constrained_pddl, CHECK_ACTION_PREFIX, CONSTRAINT_PREDICATE};
pub use ground::ground;
pub use pddl::{parse_domain, parse_pddl, parse_problem, ProblemModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unsupported requirement `{0}`")]
    UnsupportedRequirement(String),
    #[error("atom `{0}` is not part of the grounded domain")]
    UnknownAtom(String),
    #[error("ground atoms `{0}` and `{1}` map to the same proposition")]
    AtomCollision(String, String),
    #[error("action {0} is not applicable")]
    NotApplicable(String),
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("the goal is unsatisfiable")]
    UnsatisfiableGoal,
    #[error("cannot express `{0}` in the supported PDDL subset")]
    Inexpressible(String),
}

/// A typed variable or object list entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typed {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<Typed>,
}

/// Argument of an atom inside an action schema.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Index into the schema's parameter list.
    Param(usize),
    Object(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomSchema {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Typed>,
    /// `(atom, positive)` literals.
    pub precondition: Vec<(AtomSchema, bool)>,
    pub add: Vec<AtomSchema>,
    pub del: Vec<AtomSchema>,
}

/// A parsed domain definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(type, parent)`; the implicit root type is `object`.
    pub types: Vec<(String, String)>,
    pub constants: Vec<Typed>,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    /// Whether `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.types.iter().find(|(t, _)| t == cur) {
                Some((_, parent)) => cur = parent,
                None => return ancestor == "object",
            }
        }
        false
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }
}

/// Proposition identifier of a ground atom.
pub fn atom_id(predicate: &str, args: &[&str]) -> String {
    let mut s = predicate.to_string();
    for a in args {
        s.push('_');
        s.push_str(a);
    }
    s.to_lowercase().replace('-', "_")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// Fixed-width set of ground atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldStateBits(Vec<u64>);

impl WorldStateBits {
    pub fn empty(n_atoms: usize) -> Self {
        WorldStateBits(vec![0; n_atoms.div_ceil(64)])
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.0[atom / 64] & (1 << (atom % 64)) != 0
    }

    pub fn insert(&mut self, atom: usize) {
        self.0[atom / 64] |= 1 << (atom % 64);
    }

    pub fn remove(&mut self, atom: usize) {
        self.0[atom / 64] &= !(1 << (atom % 64));
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

impl fmt::Debug for WorldStateBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// A goal expression over atom indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CompiledGoal {
    pub required: Vec<(usize, bool)>,
    pub disjuncts: Vec<Vec<(usize, bool)>>,
}

impl CompiledGoal {
    pub fn holds(&self, s: &WorldStateBits) -> bool {
        let lit = |&(a, pos): &(usize, bool)| s.contains(a) == pos;
        self.required.iter().all(lit)
            && (self.disjuncts.is_empty() || self.disjuncts.iter().any(|c| c.iter().all(lit)))
    }

    pub fn is_top(&self) -> bool {
        self.required.is_empty() && self.disjuncts.is_empty()
    }

    /// Unsatisfied required literals plus the fewest unsatisfied literals of
    /// any disjunct.
    pub fn unsatisfied(&self, s: &WorldStateBits) -> usize {
        let miss = |c: &[(usize, bool)]| c.iter().filter(|&&(a, pos)| s.contains(a) != pos).count();
        let dis = self.disjuncts.iter().map(|c| miss(c)).min().unwrap_or(0);
        miss(&self.required) + dis
    }
}

/// A domain with its objects and all ground atoms and actions.
#[derive(Clone, Debug)]
pub struct GroundDomain {
    pub model: DomainModel,
    pub objects: Vec<Typed>,
    atoms: Vec<Prop>,
    atom_parts: Vec<(String, Vec<String>)>,
    atom_index: HashMap<Prop, usize>,
    pub actions: Vec<GroundAction>,
    action_index: HashMap<String, usize>,
}

impl GroundDomain {
    pub(crate) fn new(
        model: DomainModel,
        objects: Vec<Typed>,
        atoms: Vec<(Prop, String, Vec<String>)>,
        actions: Vec<GroundAction>,
    ) -> Self {
        let (atoms, atom_parts): (Vec<Prop>, Vec<(String, Vec<String>)>) =
            atoms.into_iter().map(|(p, pred, args)| (p, (pred, args))).unzip();
        let atom_index = atoms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let action_index = actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.to_string(), i))
            .collect();
        GroundDomain {
            model,
            objects,
            atoms,
            atom_parts,
            atom_index,
            actions,
            action_index,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Prop] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Prop {
        &self.atoms[i]
    }

    /// Predicate name and object arguments of atom `i`.
    pub fn atom_parts(&self, i: usize) -> (&str, &[String]) {
        let (p, args) = &self.atom_parts[i];
        (p, args)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atom_index.get(name).copied()
    }

    fn require_atom(&self, p: &Prop) -> Result<usize, DomainError> {
        self.atom_index(p.as_str())
            .ok_or_else(|| DomainError::UnknownAtom(p.to_string()))
    }

    /// Index of the ground action printed as `text`, e.g. `(stack b1 b2)`.
    pub fn action_by_text(&self, text: &str) -> Option<usize> {
        let norm = text
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase();
        self.action_index.get(&format!("({norm})")).copied()
    }

    pub fn state(&self, w: &WorldState) -> Result<WorldStateBits, DomainError> {
        let mut s = WorldStateBits::empty(self.atoms.len());
        for p in w.iter() {
            s.insert(self.require_atom(p)?);
        }
        Ok(s)
    }

    pub fn world(&self, s: &WorldStateBits) -> WorldState {
        s.ones().map(|i| self.atoms[i].clone()).collect()
    }

    pub fn compile(&self, g: &GoalExpression) -> Result<CompiledGoal, DomainError> {
        let lits = |ls: &[Literal]| -> Result<Vec<(usize, bool)>, DomainError> {
            ls.iter()
                .map(|l| Ok((self.require_atom(&l.prop)?, l.positive)))
                .collect()
        };
        Ok(CompiledGoal {
            required: lits(&g.required)?,
            disjuncts: g
                .disjuncts
                .iter()
                .map(|c| lits(c))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Atom index for each proposition, in order.
    pub fn label_map(&self, props: &[Prop]) -> Result<Vec<usize>, DomainError> {
        props.iter().map(|p| self.require_atom(p)).collect()
    }

    pub fn applicable(&self, s: &WorldStateBits, a: usize) -> bool {
        let a = &self.actions[a];
        a.pre_pos.iter().all(|&i| s.contains(i)) && a.pre_neg.iter().all(|&i| !s.contains(i))
    }

    /// `(s \ del) ∪ add`; the caller guarantees applicability.
    pub fn apply(&self, s: &WorldStateBits, a: usize) -> WorldStateBits {
        let a = &self.actions[a];
        let mut next = s.clone();
        for &i in &a.del {
            next.remove(i);
        }
        for &i in &a.add {
            next.insert(i);
        }
        next
    }

    pub fn successor(&self, s: &WorldStateBits, a: usize) -> Result<WorldStateBits, DomainError> {
        if self.applicable(s, a) {
            Ok(self.apply(s, a))
        } else {
            Err(DomainError::NotApplicable(self.actions[a].to_string()))
        }
    }

    /// Applicable actions and their successors, in grounding order.
    pub fn successors<'a>(
        &'a self,
        s: &'a WorldStateBits,
    ) -> impl Iterator<Item = (usize, WorldStateBits)> + 'a {
        (0..self.actions.len())
            .filter(move |&a| self.applicable(s, a))
            .map(move |a| (a, self.apply(s, a)))
    }
}

/// Whether the world state satisfies the goal expression.
pub fn holds(state: &WorldState, e: &GoalExpression) -> bool {
    e.holds(|p| state.contains(p.as_str()))
}

/// A reach-avoid problem: reach `goal` while every state before the last
/// satisfies `constraint`.
#[derive(Clone, Debug)]
pub struct GroundProblem {
    pub domain: Arc<GroundDomain>,
    pub start: WorldStateBits,
    pub goal: GoalExpression,
    pub constraint: GoalExpression,
    /// Whether the empty plan counts when `start` already satisfies `goal`.
    pub allow_empty_plan: bool,
}

impl GroundProblem {
    pub fn new(
        domain: Arc<GroundDomain>,
        start: WorldStateBits,
        goal: GoalExpression,
        constraint: GoalExpression,
    ) -> Self {
        GroundProblem {
            domain,
            start,
            goal,
            constraint,
            allow_empty_plan: true,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn three_stack() -> (GroundDomain, WorldStateBits) {
        let (model, objects, start, _) = parse_pddl(BLOCKSWORLD, THREE_STACK).unwrap();
        let g = ground(&model, &objects).unwrap();
        let s = g.state(&start).unwrap();
        (g, s)
    }

    #[test]
    fn only_unstack_c_b_applies_initially() {
        let (g, s) = three_stack();
        let names: Vec<String> = g.successors(&s).map(|(a, _)| g.actions[a].to_string()).collect();
        assert_eq!(names, ["(unstack c b)"]);
    }

    #[test]
    fn unstack_effects() {
        let (g, s) = three_stack();
        let a = g.action_by_text("(unstack C B)").unwrap();
        let next = g.world(&g.successor(&s, a).unwrap());
        let mut names: Vec<&str> = next.iter().map(|p| p.as_str()).collect();
        names.sort();
        assert_eq!(names, ["clear_b", "holding_c", "on_b_a", "ontable_a"]);
        let bad = g.action_by_text("(pick-up a)").unwrap();
        assert!(matches!(g.successor(&s, bad), Err(DomainError::NotApplicable(_))));
    }

    #[test]
    fn frame_property() {
        let (g, s) = three_stack();
        for (a, next) in g.successors(&s) {
            let act = &g.actions[a];
            for i in 0..g.atom_count() {
                if s.contains(i) != next.contains(i) {
                    assert!(act.add.contains(&i) || act.del.contains(&i));
                }
            }
        }
    }

    #[test]
    fn holds_goal_expressions() {
        let e = GoalExpression {
            required: vec![Literal::pos("a")],
            disjuncts: vec![vec![Literal::pos("b"), Literal::neg("d")], vec![Literal::pos("e")]],
        };
        let w = |xs: &[&str]| xs.iter().copied().collect::<WorldState>();
        assert!(holds(&w(&["a", "b"]), &e));
        assert!(holds(&w(&["a", "e", "d"]), &e));
        assert!(!holds(&w(&["a", "b", "d"]), &e));
        assert!(holds(&w(&[]), &GoalExpression::top()));
    }

    #[test]
    fn subtyping() {
        let (model, _, _, _) = parse_pddl(BLOCKSWORLD, THREE_STACK).unwrap();
        assert!(model.is_subtype("block", "object"));
        assert!(model.is_subtype("block", "block"));
        assert!(!model.is_subtype("object", "block"));
    }

    #[test]
    fn bitset_ops() {
        let mut s = WorldStateBits::empty(130);
        s.insert(0);
        s.insert(129);
        assert!(s.contains(129) && !s.contains(64));
        s.remove(0);
        assert_eq!(s.ones().collect::<Vec<_>>(), [129]);
    }
}
