//! Reduced ordered binary decision diagrams and guard-to-goal extraction.
//!
//! A [`Bdd`] is a single-owner node arena. Handles ([`BddRef`]) are only
//! meaningful for the store that produced them. Variables are numbered in
//! registration order, which is also the variable order of the diagram.
//!
//! [`Bdd::extract_goal`] turns an arbitrary satisfiable guard into a
//! [`GoalExpression`]: the literals every model agrees on, conjoined with a
//! disjunction of the prime implicants of what remains.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::ltlf::{Formula, Prop};

/// Maximum number of disjunctive literals [`Bdd::extract_goal`] will
/// enumerate subsets of.
pub const MAX_DISJUNCTIVE_LITERALS: usize = 20;

/// Handle to a function stored in a [`Bdd`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BddRef(u32);

impl BddRef {
    pub const FALSE: BddRef = BddRef(0);
    pub const TRUE: BddRef = BddRef(1);

    pub fn is_false(self) -> bool {
        self == BddRef::FALSE
    }

    pub fn is_true(self) -> bool {
        self == BddRef::TRUE
    }

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Node {
    var: u32,
    low: BddRef,
    high: BddRef,
}

/// Boolean connectives understood by [`Bdd::combine`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BddError {
    #[error("unknown proposition `{0}`")]
    UnknownAtom(String),
    #[error("temporal operator in propositional formula `{0}`")]
    Temporal(String),
    #[error("guard is unsatisfiable")]
    Unsatisfiable,
    #[error("{0} disjunctive literals exceed the enumeration limit of {MAX_DISJUNCTIVE_LITERALS}")]
    TooManyDisjunctiveLiterals(usize),
    #[error("{0:?} needs two operands")]
    MissingOperand(BoolOp),
}

/// A proposition with a truth value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub prop: Prop,
    pub positive: bool,
}

impl Literal {
    pub fn new(prop: Prop, positive: bool) -> Self {
        Literal { prop, positive }
    }

    /// Positive literal; panics on an invalid identifier.
    pub fn pos(name: &str) -> Self {
        Literal::new(Prop::new(name).expect("valid proposition identifier"), true)
    }

    /// Negative literal; panics on an invalid identifier.
    pub fn neg(name: &str) -> Self {
        Literal::new(Prop::new(name).expect("valid proposition identifier"), false)
    }

    pub fn negated(&self) -> Self {
        Literal::new(self.prop.clone(), !self.positive)
    }

    pub fn holds(&self, truth: impl Fn(&Prop) -> bool) -> bool {
        truth(&self.prop) == self.positive
    }

    pub fn to_formula(&self) -> Formula {
        let atom = Formula::Atom(self.prop.clone());
        if self.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.prop)
        } else {
            write!(f, "!{}", self.prop)
        }
    }
}

/// `required ∧ (∨ disjuncts)`; an empty disjunct list stands for `true`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GoalExpression {
    pub required: Vec<Literal>,
    pub disjuncts: Vec<Vec<Literal>>,
}

impl GoalExpression {
    pub fn top() -> Self {
        GoalExpression::default()
    }

    pub fn conjunction(required: Vec<Literal>) -> Self {
        GoalExpression {
            required,
            disjuncts: Vec::new(),
        }
    }

    pub fn is_top(&self) -> bool {
        self.required.is_empty() && self.disjuncts.is_empty()
    }

    pub fn holds(&self, truth: impl Fn(&Prop) -> bool) -> bool {
        self.required.iter().all(|l| l.holds(&truth))
            && (self.disjuncts.is_empty()
                || self
                    .disjuncts
                    .iter()
                    .any(|c| c.iter().all(|l| l.holds(&truth))))
    }

    /// Every proposition mentioned, in first-occurrence order.
    pub fn props(&self) -> Vec<Prop> {
        let mut out: Vec<Prop> = Vec::new();
        for l in self.required.iter().chain(self.disjuncts.iter().flatten()) {
            if !out.contains(&l.prop) {
                out.push(l.prop.clone());
            }
        }
        out
    }

    pub fn to_formula(&self) -> Formula {
        let req = Formula::conjunction(self.required.iter().map(Literal::to_formula));
        if self.disjuncts.is_empty() {
            return req;
        }
        let dis = Formula::disjunction(
            self.disjuncts
                .iter()
                .map(|c| Formula::conjunction(c.iter().map(Literal::to_formula))),
        );
        if self.required.is_empty() {
            dis
        } else {
            Formula::and(req, dis)
        }
    }
}

fn write_conj(f: &mut fmt::Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl fmt::Display for GoalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_top() {
            return f.write_str("true");
        }
        write_conj(f, &self.required)?;
        if self.disjuncts.is_empty() {
            return Ok(());
        }
        if !self.required.is_empty() {
            f.write_str(" & ")?;
        }
        let wrap = !self.required.is_empty() && self.disjuncts.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (i, c) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write_conj(f, c)?;
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Node store with unique table and operation caches.
#[derive(Clone)]
pub struct Bdd {
    nodes: Vec<Node>,
    unique: HashMap<Node, BddRef>,
    vars: Vec<Prop>,
    var_index: HashMap<Prop, u32>,
    apply_cache: HashMap<(BoolOp, BddRef, BddRef), BddRef>,
    not_cache: HashMap<BddRef, BddRef>,
    subset_evaluations: usize,
}

impl Default for Bdd {
    fn default() -> Self {
        Bdd::new()
    }
}

impl fmt::Debug for Bdd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bdd")
            .field("nodes", &self.nodes.len())
            .field("vars", &self.vars)
            .finish()
    }
}

impl Bdd {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL_VAR,
            low: BddRef(v),
            high: BddRef(v),
        };
        Bdd {
            nodes: vec![terminal(0), terminal(1)],
            unique: HashMap::new(),
            vars: Vec::new(),
            var_index: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
            subset_evaluations: 0,
        }
    }

    /// Adds `p` to the variable order (no-op if present) and returns its index.
    pub fn register(&mut self, p: &Prop) -> u32 {
        if let Some(&i) = self.var_index.get(p) {
            return i;
        }
        let i = self.vars.len() as u32;
        self.vars.push(p.clone());
        self.var_index.insert(p.clone(), i);
        i
    }

    pub fn var_of(&self, name: &str) -> Option<u32> {
        self.var_index.get(name).copied()
    }

    pub fn prop(&self, var: u32) -> &Prop {
        &self.vars[var as usize]
    }

    pub fn props(&self) -> &[Prop] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Total number of nodes in the store, terminals included.
    pub fn store_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, value: bool) -> BddRef {
        if value {
            BddRef::TRUE
        } else {
            BddRef::FALSE
        }
    }

    fn mk(&mut self, var: u32, low: BddRef, high: BddRef) -> BddRef {
        if low == high {
            return low;
        }
        let n = Node { var, low, high };
        if let Some(&r) = self.unique.get(&n) {
            return r;
        }
        let r = BddRef(self.nodes.len() as u32);
        self.nodes.push(n);
        self.unique.insert(n, r);
        r
    }

    /// Variable index at the root of `f`; `u32::MAX` for terminals.
    pub fn top_var(&self, f: BddRef) -> u32 {
        self.nodes[f.0 as usize].var
    }

    /// `(low, high)` children of a non-terminal.
    pub fn children(&self, f: BddRef) -> (BddRef, BddRef) {
        let n = self.nodes[f.0 as usize];
        (n.low, n.high)
    }

    fn cofactors(&self, f: BddRef, var: u32) -> (BddRef, BddRef) {
        let n = self.nodes[f.0 as usize];
        if n.var == var {
            (n.low, n.high)
        } else {
            (f, f)
        }
    }

    pub fn var(&mut self, var: u32) -> BddRef {
        assert!((var as usize) < self.vars.len(), "unregistered variable {var}");
        self.mk(var, BddRef::FALSE, BddRef::TRUE)
    }

    pub fn nvar(&mut self, var: u32) -> BddRef {
        assert!((var as usize) < self.vars.len(), "unregistered variable {var}");
        self.mk(var, BddRef::TRUE, BddRef::FALSE)
    }

    pub fn literal(&mut self, lit: &Literal) -> Result<BddRef, BddError> {
        let v = self
            .var_of(lit.prop.as_str())
            .ok_or_else(|| BddError::UnknownAtom(lit.prop.to_string()))?;
        Ok(if lit.positive { self.var(v) } else { self.nvar(v) })
    }

    pub fn not(&mut self, f: BddRef) -> BddRef {
        if f.is_terminal() {
            return BddRef(1 - f.0);
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let n = self.nodes[f.0 as usize];
        let low = self.not(n.low);
        let high = self.not(n.high);
        let r = self.mk(n.var, low, high);
        self.not_cache.insert(f, r);
        r
    }

    pub fn and(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BoolOp::And, a, b)
    }

    pub fn or(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BoolOp::Or, a, b)
    }

    pub fn xor(&mut self, a: BddRef, b: BddRef) -> BddRef {
        self.apply(BoolOp::Xor, a, b)
    }

    /// `(c ∧ t) ∨ (¬c ∧ e)`.
    pub fn ite(&mut self, c: BddRef, t: BddRef, e: BddRef) -> BddRef {
        let ct = self.and(c, t);
        let nc = self.not(c);
        let ne = self.and(nc, e);
        self.or(ct, ne)
    }

    /// Applies `op`; `b` is ignored for [`BoolOp::Not`] and required otherwise.
    pub fn combine(
        &mut self,
        op: BoolOp,
        a: BddRef,
        b: Option<BddRef>,
    ) -> Result<BddRef, BddError> {
        match (op, b) {
            (BoolOp::Not, _) => Ok(self.not(a)),
            (_, None) => Err(BddError::MissingOperand(op)),
            (op, Some(b)) => Ok(self.apply(op, a, b)),
        }
    }

    fn apply(&mut self, op: BoolOp, a: BddRef, b: BddRef) -> BddRef {
        use BddRef as R;
        match op {
            BoolOp::And => {
                if a == R::FALSE || b == R::FALSE {
                    return R::FALSE;
                }
                if a == R::TRUE || a == b {
                    return b;
                }
                if b == R::TRUE {
                    return a;
                }
            }
            BoolOp::Or => {
                if a == R::TRUE || b == R::TRUE {
                    return R::TRUE;
                }
                if a == R::FALSE || a == b {
                    return b;
                }
                if b == R::FALSE {
                    return a;
                }
            }
            BoolOp::Xor => {
                if a == b {
                    return R::FALSE;
                }
                if a == R::FALSE {
                    return b;
                }
                if b == R::FALSE {
                    return a;
                }
                if a == R::TRUE {
                    return self.not(b);
                }
                if b == R::TRUE {
                    return self.not(a);
                }
            }
            BoolOp::Not => unreachable!("unary operator routed through apply"),
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.apply_cache.get(&(op, a, b)) {
            return r;
        }
        let var = self.top_var(a).min(self.top_var(b));
        let (a0, a1) = self.cofactors(a, var);
        let (b0, b1) = self.cofactors(b, var);
        let low = self.apply(op, a0, b0);
        let high = self.apply(op, a1, b1);
        let r = self.mk(var, low, high);
        self.apply_cache.insert((op, a, b), r);
        r
    }

    /// `f|_{var←value}`.
    pub fn restrict(&mut self, f: BddRef, var: u32, value: bool) -> BddRef {
        let mut memo = HashMap::new();
        self.restrict_rec(f, var, value, &mut memo)
    }

    fn restrict_rec(
        &mut self,
        f: BddRef,
        var: u32,
        value: bool,
        memo: &mut HashMap<BddRef, BddRef>,
    ) -> BddRef {
        let n = self.nodes[f.0 as usize];
        if f.is_terminal() || n.var > var {
            return f;
        }
        if n.var == var {
            return if value { n.high } else { n.low };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let low = self.restrict_rec(n.low, var, value, memo);
        let high = self.restrict_rec(n.high, var, value, memo);
        let r = self.mk(n.var, low, high);
        memo.insert(f, r);
        r
    }

    /// Restricts `f` by every `(var, value)` pair in `cube`.
    pub fn restrict_cube(&mut self, f: BddRef, cube: &[(u32, bool)]) -> BddRef {
        cube.iter()
            .fold(f, |acc, &(v, b)| self.restrict(acc, v, b))
    }

    pub fn restrict_literals(&mut self, f: BddRef, lits: &[Literal]) -> Result<BddRef, BddError> {
        let cube = self.cube_of(lits)?;
        Ok(self.restrict_cube(f, &cube))
    }

    fn cube_of(&self, lits: &[Literal]) -> Result<Vec<(u32, bool)>, BddError> {
        lits.iter()
            .map(|l| {
                self.var_of(l.prop.as_str())
                    .map(|v| (v, l.positive))
                    .ok_or_else(|| BddError::UnknownAtom(l.prop.to_string()))
            })
            .collect()
    }

    /// Simultaneously substitutes `subst[v]` for every variable `v` that has
    /// an entry.
    pub fn compose(&mut self, f: BddRef, subst: &HashMap<u32, BddRef>) -> BddRef {
        let mut memo = HashMap::new();
        self.compose_rec(f, subst, &mut memo)
    }

    fn compose_rec(
        &mut self,
        f: BddRef,
        subst: &HashMap<u32, BddRef>,
        memo: &mut HashMap<BddRef, BddRef>,
    ) -> BddRef {
        if f.is_terminal() {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = self.nodes[f.0 as usize];
        let low = self.compose_rec(n.low, subst, memo);
        let high = self.compose_rec(n.high, subst, memo);
        let x = match subst.get(&n.var) {
            Some(&g) => g,
            None => self.var(n.var),
        };
        let r = self.ite(x, high, low);
        memo.insert(f, r);
        r
    }

    /// Evaluates `f` under the assignment `value(var)`.
    pub fn eval(&self, f: BddRef, value: impl Fn(u32) -> bool) -> bool {
        let mut cur = f;
        while !cur.is_terminal() {
            let n = self.nodes[cur.0 as usize];
            cur = if value(n.var) { n.high } else { n.low };
        }
        cur.is_true()
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: BddRef) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if g.is_terminal() || !seen.insert(g) {
                continue;
            }
            let n = self.nodes[g.0 as usize];
            out.insert(n.var);
            stack.push(n.low);
            stack.push(n.high);
        }
        out
    }

    /// Number of distinct nodes reachable from `f`, terminals included.
    pub fn node_count(&self, f: BddRef) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if !seen.insert(g) || g.is_terminal() {
                continue;
            }
            let n = self.nodes[g.0 as usize];
            stack.push(n.low);
            stack.push(n.high);
        }
        seen.len()
    }

    /// Builds the diagram of a temporal-operator-free formula. Every atom must
    /// already be registered.
    pub fn from_propositional(&mut self, f: &Formula) -> Result<BddRef, BddError> {
        Ok(match f {
            Formula::True => BddRef::TRUE,
            Formula::False => BddRef::FALSE,
            Formula::Atom(p) => {
                let v = self
                    .var_of(p.as_str())
                    .ok_or_else(|| BddError::UnknownAtom(p.to_string()))?;
                self.var(v)
            }
            Formula::Not(g) => {
                let g = self.from_propositional(g)?;
                self.not(g)
            }
            Formula::And(a, b) => {
                let a = self.from_propositional(a)?;
                let b = self.from_propositional(b)?;
                self.and(a, b)
            }
            Formula::Or(a, b) => {
                let a = self.from_propositional(a)?;
                let b = self.from_propositional(b)?;
                self.or(a, b)
            }
            _ => return Err(BddError::Temporal(f.to_string())),
        })
    }

    /// Copies `f` from another store, registering unknown propositions here.
    pub fn import(&mut self, other: &Bdd, f: BddRef) -> BddRef {
        let mut memo = HashMap::new();
        self.import_rec(other, f, &mut memo)
    }

    fn import_rec(&mut self, other: &Bdd, f: BddRef, memo: &mut HashMap<BddRef, BddRef>) -> BddRef {
        if f.is_terminal() {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = other.nodes[f.0 as usize];
        let low = self.import_rec(other, n.low, memo);
        let high = self.import_rec(other, n.high, memo);
        let v = self.register(other.prop(n.var));
        let x = self.var(v);
        let r = self.ite(x, high, low);
        memo.insert(f, r);
        r
    }

    /// Root-to-TRUE paths as `(var, value)` cubes; pairwise disjoint.
    pub fn cubes(&self, f: BddRef) -> Vec<Vec<(u32, bool)>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.cubes_rec(f, &mut path, &mut out);
        out
    }

    fn cubes_rec(&self, f: BddRef, path: &mut Vec<(u32, bool)>, out: &mut Vec<Vec<(u32, bool)>>) {
        if f.is_false() {
            return;
        }
        if f.is_true() {
            out.push(path.clone());
            return;
        }
        let n = self.nodes[f.0 as usize];
        path.push((n.var, false));
        self.cubes_rec(n.low, path, out);
        path.pop();
        path.push((n.var, true));
        self.cubes_rec(n.high, path, out);
        path.pop();
    }

    /// Disjunction of the path cubes of `f`.
    pub fn to_formula(&self, f: BddRef) -> Formula {
        Formula::disjunction(self.cubes(f).into_iter().map(|cube| {
            Formula::conjunction(cube.into_iter().map(|(v, b)| {
                Literal::new(self.prop(v).clone(), b).to_formula()
            }))
        }))
    }

    /// Human-readable guard: the extracted goal expression when it can be
    /// computed, the path cubes otherwise.
    pub fn describe(&mut self, f: BddRef) -> String {
        if f.is_false() {
            return "false".into();
        }
        match self.extract_goal(f) {
            Ok(g) => g.to_string(),
            Err(_) => self.to_formula(f).to_string(),
        }
    }

    /// Graphviz rendering; dashed edges are low (false) branches.
    pub fn to_dot(&self, f: BddRef) -> String {
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n");
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(g) = stack.pop() {
            if g.is_terminal() || !seen.insert(g) {
                continue;
            }
            let n = self.nodes[g.0 as usize];
            let _ = writeln!(out, "  n{} [shape=circle,label=\"{}\"];", g.0, self.prop(n.var));
            let _ = writeln!(out, "  n{} -> n{} [style=dashed];", g.0, n.low.0);
            let _ = writeln!(out, "  n{} -> n{};", g.0, n.high.0);
            stack.push(n.low);
            stack.push(n.high);
        }
        out.push_str("}\n");
        out
    }

    fn lit(&self, var: u32, positive: bool) -> Literal {
        Literal::new(self.prop(var).clone(), positive)
    }

    /// Literals forced by every model of `f`: `x` when `f|_{x←0}` is false,
    /// `¬x` when `f|_{x←1}` is false. Ordered by variable.
    pub fn required_literals(&mut self, f: BddRef) -> Result<Vec<Literal>, BddError> {
        if f.is_false() {
            return Err(BddError::Unsatisfiable);
        }
        let mut out = Vec::new();
        for v in self.support(f) {
            if self.restrict(f, v, false).is_false() {
                out.push(self.lit(v, true));
            } else if self.restrict(f, v, true).is_false() {
                out.push(self.lit(v, false));
            }
        }
        Ok(out)
    }

    /// Literals that can make a difference to `fd`. `x` is reported when
    /// some model of `fd` needs `x` true (`fd|_{x←1} ∧ ¬fd|_{x←0}` is
    /// satisfiable) and `¬x` when some model needs it false; a variable may
    /// appear with both polarities.
    pub fn disjunctive_literals(&mut self, fd: BddRef) -> Vec<Literal> {
        let mut out = Vec::new();
        for v in self.support(fd) {
            let f0 = self.restrict(fd, v, false);
            let f1 = self.restrict(fd, v, true);
            let n0 = self.not(f0);
            let n1 = self.not(f1);
            if !self.and(f1, n0).is_false() {
                out.push(self.lit(v, true));
            }
            if !self.and(f0, n1).is_false() {
                out.push(self.lit(v, false));
            }
        }
        out
    }

    /// Number of candidate conjunctions tested by the last
    /// [`Bdd::extract_goal`] call.
    pub fn subset_evaluations(&self) -> usize {
        self.subset_evaluations
    }

    /// Rewrites `f` as required literals conjoined with a disjunction of
    /// minimal literal conjunctions over the remaining function.
    pub fn extract_goal(&mut self, f: BddRef) -> Result<GoalExpression, BddError> {
        self.subset_evaluations = 0;
        let required = self.required_literals(f)?;
        let req_cube = self.cube_of(&required)?;
        let fd = self.restrict_cube(f, &req_cube);
        if fd.is_true() {
            return Ok(GoalExpression::conjunction(required));
        }
        let lits = self.disjunctive_literals(fd);
        let d = lits.len();
        if d > MAX_DISJUNCTIVE_LITERALS {
            return Err(BddError::TooManyDisjunctiveLiterals(d));
        }
        let cube: Vec<(u32, bool)> = self.cube_of(&lits)?;
        // masks of literal pairs over the same variable
        let mut conflicts: Vec<u64> = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                if cube[i].0 == cube[j].0 {
                    conflicts.push((1 << i) | (1 << j));
                }
            }
        }
        let mut found: Vec<u64> = Vec::new();
        let mut disjuncts = Vec::new();
        let full: u64 = (1u64 << d) - 1;
        for k in 1..=d {
            let mut mask: u64 = (1u64 << k) - 1;
            while mask <= full {
                let skip = found.iter().any(|&m| mask & m == m)
                    || conflicts.iter().any(|&c| mask & c == c);
                if !skip {
                    self.subset_evaluations += 1;
                    let sub: Vec<(u32, bool)> = (0..d)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| cube[i])
                        .collect();
                    if self.restrict_cube(fd, &sub).is_true() {
                        found.push(mask);
                        disjuncts.push(
                            (0..d)
                                .filter(|i| mask & (1 << i) != 0)
                                .map(|i| lits[i].clone())
                                .collect(),
                        );
                    }
                }
                // next mask with the same popcount
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
        }
        Ok(GoalExpression {
            required,
            disjuncts,
        })
    }

    /// Builds the diagram of a goal expression.
    pub fn from_goal(&mut self, g: &GoalExpression) -> Result<BddRef, BddError> {
        let mut acc = BddRef::TRUE;
        for l in &g.required {
            let x = self.literal(l)?;
            acc = self.and(acc, x);
        }
        if g.disjuncts.is_empty() {
            return Ok(acc);
        }
        let mut dis = BddRef::FALSE;
        for c in &g.disjuncts {
            let mut conj = BddRef::TRUE;
            for l in c {
                let x = self.literal(l)?;
                conj = self.and(conj, x);
            }
            dis = self.or(dis, conj);
        }
        Ok(self.and(acc, dis))
    }
}
