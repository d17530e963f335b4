//! Formula progression with BDD-canonical states.
//!
//! The goal is put in negation normal form, where `X` is the strong next and
//! `WX` its weak dual. Progressing a formula through one letter yields a
//! Boolean function over *obligations*, each of which says "the next
//! position exists and satisfies ψ" (strong) or "if a next position exists,
//! it satisfies ψ" (weak). An automaton state is such a function, kept as a
//! BDD over obligation variables, so equivalent states share one handle.
//!
//! Proposition variables are registered before any obligation variable, so
//! in the transition function the letter is decided above every obligation
//! node; the obligation-level sub-diagrams are the successor states.

use std::collections::{HashMap, VecDeque};

use super::{minimize, Dfa, DfaError, StateId};
use crate::bdd::{Bdd, BddRef};
use crate::ltlf::{Formula, Prop};

pub const DEFAULT_STATE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("automaton exceeds the state cap of {0}")]
    StateCapExceeded(usize),
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Nnf {
    True,
    False,
    Lit(u32, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    WeakNext(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
    Eventually(Box<Nnf>),
    Globally(Box<Nnf>),
}

fn and(a: Nnf, b: Nnf) -> Nnf {
    match (a, b) {
        (Nnf::False, _) | (_, Nnf::False) => Nnf::False,
        (Nnf::True, x) | (x, Nnf::True) => x,
        (a, b) => Nnf::And(Box::new(a), Box::new(b)),
    }
}

fn or(a: Nnf, b: Nnf) -> Nnf {
    match (a, b) {
        (Nnf::True, _) | (_, Nnf::True) => Nnf::True,
        (Nnf::False, x) | (x, Nnf::False) => x,
        (a, b) => Nnf::Or(Box::new(a), Box::new(b)),
    }
}

/// Negation normal form of `f` (negated when `neg`).
fn nnf(f: &Formula, neg: bool, bdd: &Bdd) -> Nnf {
    match f {
        Formula::True => {
            if neg {
                Nnf::False
            } else {
                Nnf::True
            }
        }
        Formula::False => {
            if neg {
                Nnf::True
            } else {
                Nnf::False
            }
        }
        Formula::Atom(p) => Nnf::Lit(
            bdd.var_of(p.as_str()).expect("atoms registered before translation"),
            !neg,
        ),
        Formula::Not(g) => nnf(g, !neg, bdd),
        Formula::And(a, b) => {
            let (a, b) = (nnf(a, neg, bdd), nnf(b, neg, bdd));
            if neg {
                or(a, b)
            } else {
                and(a, b)
            }
        }
        Formula::Or(a, b) => {
            let (a, b) = (nnf(a, neg, bdd), nnf(b, neg, bdd));
            if neg {
                and(a, b)
            } else {
                or(a, b)
            }
        }
        Formula::Next(g) => {
            let g = nnf(g, neg, bdd);
            if neg {
                Nnf::WeakNext(Box::new(g))
            } else {
                Nnf::Next(Box::new(g))
            }
        }
        Formula::Until(a, b) => {
            let (a, b) = (Box::new(nnf(a, neg, bdd)), Box::new(nnf(b, neg, bdd)));
            if neg {
                Nnf::Release(a, b)
            } else {
                Nnf::Until(a, b)
            }
        }
        Formula::Eventually(g) => {
            let g = Box::new(nnf(g, neg, bdd));
            if neg {
                Nnf::Globally(g)
            } else {
                Nnf::Eventually(g)
            }
        }
        Formula::Globally(g) => {
            let g = Box::new(nnf(g, neg, bdd));
            if neg {
                Nnf::Eventually(g)
            } else {
                Nnf::Globally(g)
            }
        }
    }
}

struct Progression {
    bdd: Bdd,
    n_props: u32,
    obligations: HashMap<(Nnf, bool), u32>,
    /// Formula and strength per obligation variable (offset by `n_props`).
    formulas: Vec<(Nnf, bool)>,
    strong: Vec<bool>,
}

impl Progression {
    fn obligation(&mut self, f: &Nnf, strong: bool) -> BddRef {
        match (f, strong) {
            (Nnf::True, false) => return BddRef::TRUE,
            (Nnf::False, true) => return BddRef::FALSE,
            _ => {}
        }
        let key = (f.clone(), strong);
        let var = match self.obligations.get(&key) {
            Some(&v) => v,
            None => {
                let k = self.formulas.len();
                let tag = if strong { "x" } else { "wx" };
                let v = self.bdd.register(&Prop::internal(format!("#{tag}{k}")));
                self.obligations.insert(key.clone(), v);
                self.formulas.push(key);
                self.strong.push(strong);
                v
            }
        };
        self.bdd.var(var)
    }

    /// One-letter progression of `f` as a function of the current letter and
    /// the obligations placed on the next position.
    fn progress(&mut self, f: &Nnf) -> BddRef {
        match f {
            Nnf::True => BddRef::TRUE,
            Nnf::False => BddRef::FALSE,
            Nnf::Lit(v, true) => self.bdd.var(*v),
            Nnf::Lit(v, false) => self.bdd.nvar(*v),
            Nnf::And(a, b) => {
                let (a, b) = (self.progress(a), self.progress(b));
                self.bdd.and(a, b)
            }
            Nnf::Or(a, b) => {
                let (a, b) = (self.progress(a), self.progress(b));
                self.bdd.or(a, b)
            }
            Nnf::Next(g) => self.obligation(g, true),
            Nnf::WeakNext(g) => self.obligation(g, false),
            Nnf::Until(a, b) => {
                let pb = self.progress(b);
                let pa = self.progress(a);
                let o = self.obligation(f, true);
                let keep = self.bdd.and(pa, o);
                self.bdd.or(pb, keep)
            }
            Nnf::Release(a, b) => {
                let pb = self.progress(b);
                let pa = self.progress(a);
                let o = self.obligation(f, false);
                let stop = self.bdd.or(pa, o);
                self.bdd.and(pb, stop)
            }
            Nnf::Eventually(g) => {
                let pg = self.progress(g);
                let o = self.obligation(f, true);
                self.bdd.or(pg, o)
            }
            Nnf::Globally(g) => {
                let pg = self.progress(g);
                let o = self.obligation(f, false);
                self.bdd.and(pg, o)
            }
        }
    }

    /// Whether the state is satisfied when the word ends here: strong
    /// obligations fail, weak ones hold.
    fn accepts_empty(&self, state: BddRef) -> bool {
        let n = self.n_props;
        self.bdd
            .eval(state, |v| v >= n && !self.strong[(v - n) as usize])
    }

    /// Splits a transition function into `(successor, guard)` pairs.
    fn successors(&mut self, t: BddRef) -> Vec<(BddRef, BddRef)> {
        let mut out: Vec<(BddRef, BddRef)> = Vec::new();
        self.split(t, BddRef::TRUE, &mut out);
        out
    }

    fn split(&mut self, t: BddRef, guard: BddRef, out: &mut Vec<(BddRef, BddRef)>) {
        if t.is_terminal() || self.bdd.top_var(t) >= self.n_props {
            match out.iter_mut().find(|e| e.0 == t) {
                Some(e) => e.1 = self.bdd.or(e.1, guard),
                None => out.push((t, guard)),
            }
            return;
        }
        let v = self.bdd.top_var(t);
        let (low, high) = self.bdd.children(t);
        let nx = self.bdd.nvar(v);
        let x = self.bdd.var(v);
        let gl = self.bdd.and(guard, nx);
        let gh = self.bdd.and(guard, x);
        self.split(low, gl, out);
        self.split(high, gh, out);
    }
}

/// Compiles `goal` into a minimal automaton accepting exactly the non-empty
/// label words that satisfy it.
pub fn translate(goal: &Formula, state_cap: usize) -> Result<Dfa, TranslateError> {
    let raw = translate_unminimized(goal, state_cap)?;
    Ok(minimize(&raw))
}

/// The progression automaton before minimization; states are numbered in
/// discovery order.
pub fn translate_unminimized(goal: &Formula, state_cap: usize) -> Result<Dfa, TranslateError> {
    let mut bdd = Bdd::new();
    for p in goal.atoms_in_order() {
        bdd.register(&p);
    }
    let n_props = bdd.num_vars() as u32;
    let root = nnf(goal, false, &bdd);
    let mut pr = Progression {
        bdd,
        n_props,
        obligations: HashMap::new(),
        formulas: Vec::new(),
        strong: Vec::new(),
    };
    let init = pr.obligation(&root, true);

    let mut index: HashMap<BddRef, StateId> = HashMap::from([(init, 0)]);
    let mut states = vec![init];
    let mut raw_edges: Vec<Vec<(StateId, BddRef)>> = Vec::new();
    let mut progressed: HashMap<u32, BddRef> = HashMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let s = states[q];
        // obligation formulas may register further obligations while being
        // progressed, so iterate until every variable in the support is known
        let support: Vec<u32> = pr.bdd.support(s).into_iter().collect();
        let mut subst = HashMap::new();
        for v in support {
            let r = match progressed.get(&v) {
                Some(&r) => r,
                None => {
                    let (f, _) = pr.formulas[(v - n_props) as usize].clone();
                    let r = pr.progress(&f);
                    progressed.insert(v, r);
                    r
                }
            };
            subst.insert(v, r);
        }
        let t = pr.bdd.compose(s, &subst);
        let mut out = Vec::new();
        for (succ, guard) in pr.successors(t) {
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    if states.len() >= state_cap {
                        return Err(TranslateError::StateCapExceeded(state_cap));
                    }
                    let id = states.len();
                    states.push(succ);
                    index.insert(succ, id);
                    queue.push_back(id);
                    id
                }
            };
            out.push((id, guard));
        }
        if raw_edges.len() <= q {
            raw_edges.resize(q + 1, Vec::new());
        }
        raw_edges[q] = out;
    }
    raw_edges.resize(states.len(), Vec::new());

    let accepting: Vec<bool> = states.iter().map(|&s| pr.accepts_empty(s)).collect();
    let mut store = Bdd::new();
    for p in goal.atoms_in_order() {
        store.register(&p);
    }
    let edges = raw_edges
        .into_iter()
        .map(|out| {
            out.into_iter()
                .map(|(t, g)| (t, store.import(&pr.bdd, g)))
                .collect()
        })
        .collect();
    Ok(Dfa::from_parts(store, 0, accepting, edges)?)
}
