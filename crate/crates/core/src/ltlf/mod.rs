//! LTLf formulas, finite traces and the reference semantics.
//!
//! [`evaluate`] is a direct recursive reading of the finite-trace semantics and
//! is used as the ground truth when checking automata and plans.

mod parser;
mod printer;
#[cfg(test)]
pub(crate) mod strategy;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parser::{parse, ParseError};

/// An atomic proposition identifier, e.g. `on_b2_b1`.
///
/// Identifiers match `[a-z][a-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prop(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid proposition identifier `{0}` (expected [a-z][a-z0-9_]*)")]
pub struct InvalidProp(pub String);

impl Prop {
    pub fn new(name: &str) -> Result<Self, InvalidProp> {
        if is_valid_prop(name) {
            Ok(Prop(Arc::from(name)))
        } else {
            Err(InvalidProp(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Identifier outside the user namespace, for bookkeeping variables that
    /// never leave the crate.
    pub(crate) fn internal(name: String) -> Self {
        Prop(Arc::from(name))
    }
}

pub(crate) fn is_valid_prop(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl fmt::Debug for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for Prop {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// LTLf abstract syntax. `Eventually` and `Globally` are kept as first-class
/// nodes; [`Formula::expand_derived`] rewrites them into `Until`/`Not`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Prop),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
}

impl Formula {
    /// Builds an atom, panicking on an invalid identifier. Intended for
    /// literals in code and tests; use [`Prop::new`] for untrusted input.
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Prop::new(name).expect("valid proposition identifier"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    /// Left-nested conjunction of `parts`; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction of `parts`; `False` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Atom names in order of first occurrence (left to right).
    pub fn atoms_in_order(&self) -> Vec<Prop> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Prop>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Globally(f) => {
                f.collect_atoms(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// True when the formula contains no temporal operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_propositional() && b.is_propositional(),
            Formula::Next(_) | Formula::Until(..) | Formula::Eventually(_) | Formula::Globally(_) => {
                false
            }
        }
    }

    /// Rewrites `F φ` as `true U φ` and `G φ` as `!F !φ` (recursively, so the
    /// result only uses the core operators plus `Or`).
    pub fn expand_derived(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.expand_derived()),
            Formula::And(a, b) => Formula::and(a.expand_derived(), b.expand_derived()),
            Formula::Or(a, b) => Formula::or(a.expand_derived(), b.expand_derived()),
            Formula::Next(f) => Formula::next(f.expand_derived()),
            Formula::Until(a, b) => Formula::until(a.expand_derived(), b.expand_derived()),
            Formula::Eventually(f) => Formula::until(Formula::True, f.expand_derived()),
            Formula::Globally(f) => Formula::not(Formula::until(
                Formula::True,
                Formula::not(f.expand_derived()),
            )),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Globally(f) => {
                1 + f.size()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// The set of atom names occurring in `f`.
pub fn atoms(f: &Formula) -> BTreeSet<Prop> {
    f.atoms_in_order().into_iter().collect()
}

/// The propositions true in one step; everything absent is false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WorldState(BTreeSet<Prop>);

impl WorldState {
    pub fn new() -> Self {
        WorldState(BTreeSet::new())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn insert(&mut self, p: Prop) -> bool {
        self.0.insert(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Prop> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Prop> for WorldState {
    fn from_iter<I: IntoIterator<Item = Prop>>(iter: I) -> Self {
        WorldState(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for WorldState {
    /// Panics on an invalid identifier.
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        WorldState(
            iter.into_iter()
                .map(|s| Prop::new(s).expect("valid proposition identifier"))
                .collect(),
        )
    }
}

/// A non-empty finite sequence of world states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace(Vec<WorldState>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a trace must contain at least one world state")]
pub struct EmptyTrace;

impl Trace {
    pub fn new(steps: Vec<WorldState>) -> Result<Self, EmptyTrace> {
        if steps.is_empty() {
            Err(EmptyTrace)
        } else {
            Ok(Trace(steps))
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &[WorldState] {
        &self.0
    }
}

impl std::ops::Index<usize> for Trace {
    type Output = WorldState;

    fn index(&self, i: usize) -> &WorldState {
        &self.0[i]
    }
}

/// `rho, 0 |= f`.
pub fn evaluate(rho: &Trace, f: &Formula) -> bool {
    holds_at(rho.steps(), 0, f)
}

/// `rho, i |= f` for `i < rho.len()`.
pub fn holds_at(rho: &[WorldState], i: usize, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => rho[i].contains(p.as_str()),
        Formula::Not(g) => !holds_at(rho, i, g),
        Formula::And(a, b) => holds_at(rho, i, a) && holds_at(rho, i, b),
        Formula::Or(a, b) => holds_at(rho, i, a) || holds_at(rho, i, b),
        // strict next: a successor position has to exist
        Formula::Next(g) => rho.len() > i + 1 && holds_at(rho, i + 1, g),
        Formula::Until(a, b) => {
            for j in i..rho.len() {
                if holds_at(rho, j, b) {
                    return true;
                }
                if !holds_at(rho, j, a) {
                    return false;
                }
            }
            false
        }
        Formula::Eventually(g) => (i..rho.len()).any(|j| holds_at(rho, j, g)),
        Formula::Globally(g) => (i..rho.len()).all(|j| holds_at(rho, j, g)),
    }
}
