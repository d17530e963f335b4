//! Reader and writer for the supported PDDL subset.
//!
//! Domains: `define`, `domain`, `:requirements`, `:types`, `:constants`,
//! `:predicates`, `:action` with `:parameters`, `:precondition` and
//! `:effect`. Preconditions and effects are conjunctions of (possibly
//! negated) atoms. Problems: `:domain`, `:objects`, `:init`, `:goal`, where
//! the goal may additionally use `or`. Names are case-insensitive and stored
//! lowercased. Anything else is rejected.

use std::fmt::Write as _;

use super::{
    atom_id, ActionSchema, AtomSchema, DomainError, DomainModel, PredicateSchema, Term, Typed,
};
use crate::bdd::{Bdd, BddError, GoalExpression};
use crate::ltlf::{Formula, Prop, WorldState};

const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
];

#[derive(Clone, Debug)]
enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

fn err(pos: Pos, msg: impl Into<String>) -> DomainError {
    DomainError::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    fn expect_sym(&self, what: &str) -> Result<&str, DomainError> {
        self.sym()
            .ok_or_else(|| err(self.pos(), format!("expected {what}, found a list")))
    }

    fn expect_list(&self, what: &str) -> Result<&[Sexp], DomainError> {
        match self {
            Sexp::List(items, _) => Ok(items),
            Sexp::Sym(s, p) => Err(err(*p, format!("expected {what}, found `{s}`"))),
        }
    }
}

fn read(text: &str) -> Result<Sexp, DomainError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut result: Option<Sexp> = None;
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => stack.push((Vec::new(), pos)),
            ')' => {
                let (items, start) = stack.pop().ok_or_else(|| err(pos, "unbalanced `)`"))?;
                let list = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None if result.is_none() => result = Some(list),
                    None => return Err(err(pos, "text after the closing `)`")),
                }
            }
            _ => {
                let mut s = c.to_string();
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    s.push(n);
                    chars.next();
                    col += 1;
                }
                let sym = Sexp::Sym(s.to_lowercase(), pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(sym),
                    None => return Err(err(pos, format!("`{s}` outside of a list"))),
                }
            }
        }
        col += 1;
    }
    if let Some((_, p)) = stack.last() {
        return Err(err(*p, "unclosed `(`"));
    }
    result.ok_or_else(|| err(Pos { line, col }, "empty input"))
}

/// Splits `a b - t c` into typed entries (`object` when untyped).
fn typed_list(items: &[Sexp], what: &str) -> Result<Vec<Typed>, DomainError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = items[i].expect_sym(what)?;
        if s == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| err(items[i].pos(), "`-` without a type"))?;
            let ty = ty.sym().ok_or_else(|| {
                err(ty.pos(), "only simple types are supported (no `either`)")
            })?;
            if pending.is_empty() {
                return Err(err(items[i].pos(), "`-` without preceding names"));
            }
            for n in pending.drain(..) {
                out.push(Typed {
                    name: n,
                    ty: ty.to_string(),
                });
            }
            i += 2;
        } else {
            pending.push(s.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| Typed {
        name: n,
        ty: "object".into(),
    }));
    Ok(out)
}

fn header<'a>(top: &'a Sexp, kind: &str) -> Result<(&'a str, &'a [Sexp]), DomainError> {
    let items = top.expect_list("(define ...)")?;
    if items.first().and_then(Sexp::sym) != Some("define") {
        return Err(err(top.pos(), "expected `(define ...)`"));
    }
    let head = items
        .get(1)
        .ok_or_else(|| err(top.pos(), format!("missing `({kind} NAME)`")))?;
    let h = head.expect_list(&format!("({kind} NAME)"))?;
    if h.len() != 2 || h[0].sym() != Some(kind) {
        return Err(err(head.pos(), format!("expected `({kind} NAME)`")));
    }
    Ok((h[1].expect_sym("a name")?, &items[2..]))
}

fn check_name(s: &Sexp) -> Result<String, DomainError> {
    let n = s.expect_sym("a name")?;
    if n.starts_with('?') || n.starts_with(':') {
        return Err(err(s.pos(), format!("`{n}` is not a valid name")));
    }
    Ok(n.to_string())
}

/// Parses a domain definition.
pub fn parse_domain(text: &str) -> Result<DomainModel, DomainError> {
    let top = read(text)?;
    let (name, sections) = header(&top, "domain")?;
    let mut model = DomainModel {
        name: name.to_string(),
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };
    for sec in sections {
        let items = sec.expect_list("a domain section")?;
        let key = items
            .first()
            .and_then(Sexp::sym)
            .ok_or_else(|| err(sec.pos(), "empty section"))?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let r = r.expect_sym("a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(DomainError::UnsupportedRequirement(r.to_string()));
                    }
                    model.requirements.push(r.to_string());
                }
            }
            ":types" => {
                for t in typed_list(&items[1..], "a type")? {
                    model.types.push((t.name, t.ty));
                }
            }
            ":constants" => model.constants.extend(typed_list(&items[1..], "a constant")?),
            ":predicates" => {
                for p in &items[1..] {
                    let parts = p.expect_list("a predicate declaration")?;
                    let name = parts
                        .first()
                        .ok_or_else(|| err(p.pos(), "empty predicate declaration"))
                        .and_then(check_name)?;
                    let params = typed_list(&parts[1..], "a parameter")?;
                    model.predicates.push(PredicateSchema { name, params });
                }
            }
            ":action" => {
                let a = parse_action(&items[1..], sec.pos(), &model)?;
                model.actions.push(a);
            }
            other => return Err(err(sec.pos(), format!("unsupported section `{other}`"))),
        }
    }
    for (t, parent) in &model.types {
        if parent != "object" && !model.types.iter().any(|(x, _)| x == parent) {
            return Err(DomainError::Parse {
                line: 0,
                col: 0,
                msg: format!("type `{t}` has undeclared parent `{parent}`"),
            });
        }
    }
    Ok(model)
}

fn parse_action(items: &[Sexp], pos: Pos, model: &DomainModel) -> Result<ActionSchema, DomainError> {
    let name = items
        .first()
        .ok_or_else(|| err(pos, "action without a name"))
        .and_then(check_name)?;
    let mut params = Vec::new();
    let mut pre = Vec::new();
    let mut eff = Vec::new();
    let mut i = 1;
    while i < items.len() {
        let key = items[i].expect_sym("an action keyword")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| err(items[i].pos(), format!("`{key}` without a value")))?;
        match key {
            ":parameters" => {
                params = typed_list(val.expect_list("a parameter list")?, "a parameter")?;
                for p in &params {
                    if !p.name.starts_with('?') {
                        return Err(err(val.pos(), format!("parameter `{}` must start with `?`", p.name)));
                    }
                }
            }
            ":precondition" => pre = literals(val, &params, model, "precondition")?,
            ":effect" => eff = literals(val, &params, model, "effect")?,
            other => return Err(err(items[i].pos(), format!("unsupported action keyword `{other}`"))),
        }
        i += 2;
    }
    let add: Vec<AtomSchema> = eff.iter().filter(|(_, p)| *p).map(|(a, _)| a.clone()).collect();
    let del: Vec<AtomSchema> = eff.iter().filter(|(_, p)| !*p).map(|(a, _)| a.clone()).collect();
    if let Some(a) = add.iter().find(|a| del.contains(a)) {
        return Err(err(
            pos,
            format!("action `{name}` both adds and deletes `{}`", a.predicate),
        ));
    }
    Ok(ActionSchema {
        name,
        params,
        precondition: pre,
        add,
        del,
    })
}

/// A conjunction of (negated) atoms over the schema parameters.
fn literals(
    e: &Sexp,
    params: &[Typed],
    model: &DomainModel,
    what: &str,
) -> Result<Vec<(AtomSchema, bool)>, DomainError> {
    let items = e.expect_list(what)?;
    match items.first().and_then(Sexp::sym) {
        None if items.is_empty() => Ok(Vec::new()),
        Some("and") => {
            let mut out = Vec::new();
            for c in &items[1..] {
                out.extend(literals(c, params, model, what)?);
            }
            Ok(out)
        }
        Some("not") => {
            if items.len() != 2 {
                return Err(err(e.pos(), "`not` takes one argument"));
            }
            Ok(vec![(atom_schema(&items[1], params, model)?, false)])
        }
        Some(op @ ("or" | "imply" | "forall" | "exists" | "when" | "=")) => Err(err(
            e.pos(),
            format!("`{op}` is not supported in an action {what}"),
        )),
        _ => Ok(vec![(atom_schema(e, params, model)?, true)]),
    }
}

fn atom_schema(e: &Sexp, params: &[Typed], model: &DomainModel) -> Result<AtomSchema, DomainError> {
    let items = e.expect_list("an atom")?;
    let pred = items
        .first()
        .ok_or_else(|| err(e.pos(), "empty atom"))?
        .expect_sym("a predicate name")?;
    let schema = model
        .predicate(pred)
        .ok_or_else(|| err(e.pos(), format!("undeclared predicate `{pred}`")))?;
    if schema.params.len() != items.len() - 1 {
        return Err(err(
            e.pos(),
            format!("`{pred}` takes {} arguments", schema.params.len()),
        ));
    }
    let mut args = Vec::new();
    for a in &items[1..] {
        let s = a.expect_sym("an argument")?;
        if s.starts_with('?') {
            let k = params
                .iter()
                .position(|p| p.name == s)
                .ok_or_else(|| err(a.pos(), format!("unbound variable `{s}`")))?;
            args.push(Term::Param(k));
        } else if model.constants.iter().any(|c| c.name == s) {
            args.push(Term::Object(s.to_string()));
        } else {
            return Err(err(a.pos(), format!("unknown constant `{s}`")));
        }
    }
    Ok(AtomSchema {
        predicate: pred.to_string(),
        args,
    })
}

/// A parsed problem definition. Atoms in `init` and `goal` are proposition
/// identifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemModel {
    pub name: String,
    pub domain: String,
    pub objects: Vec<Typed>,
    pub init: WorldState,
    pub goal: Formula,
}

/// Parses a problem against an already parsed domain.
pub fn parse_problem(text: &str, model: &DomainModel) -> Result<ProblemModel, DomainError> {
    let top = read(text)?;
    let (name, sections) = header(&top, "problem")?;
    let mut problem = ProblemModel {
        name: name.to_string(),
        domain: String::new(),
        objects: Vec::new(),
        init: WorldState::new(),
        goal: Formula::True,
    };
    let mut all_objects = model.constants.clone();
    let mut init_atoms = Vec::new();
    let mut goal = None;
    for sec in sections {
        let items = sec.expect_list("a problem section")?;
        let key = items
            .first()
            .and_then(Sexp::sym)
            .ok_or_else(|| err(sec.pos(), "empty section"))?;
        match key {
            ":domain" => {
                let d = items
                    .get(1)
                    .ok_or_else(|| err(sec.pos(), "missing domain name"))?
                    .expect_sym("a domain name")?;
                if d != model.name {
                    return Err(err(
                        sec.pos(),
                        format!("problem is for domain `{d}`, not `{}`", model.name),
                    ));
                }
                problem.domain = d.to_string();
            }
            ":objects" => {
                let objs = typed_list(&items[1..], "an object")?;
                for o in &objs {
                    if o.ty != "object" && !model.types.iter().any(|(t, _)| *t == o.ty) {
                        return Err(err(sec.pos(), format!("undeclared type `{}`", o.ty)));
                    }
                }
                all_objects.extend(objs.iter().cloned());
                problem.objects.extend(objs);
            }
            ":init" => init_atoms.extend(items[1..].iter().cloned()),
            ":goal" => {
                goal = Some(
                    items
                        .get(1)
                        .ok_or_else(|| err(sec.pos(), "empty goal"))?
                        .clone(),
                )
            }
            other => return Err(err(sec.pos(), format!("unsupported section `{other}`"))),
        }
    }
    for a in &init_atoms {
        let p = ground_atom(a, model, &all_objects)?;
        problem.init.insert(p);
    }
    if let Some(g) = goal {
        problem.goal = goal_formula(&g, model, &all_objects)?;
    }
    Ok(problem)
}

fn ground_atom(e: &Sexp, model: &DomainModel, objects: &[Typed]) -> Result<Prop, DomainError> {
    let items = e.expect_list("a ground atom")?;
    let pred = items
        .first()
        .ok_or_else(|| err(e.pos(), "empty atom"))?
        .expect_sym("a predicate name")?;
    let schema = model
        .predicate(pred)
        .ok_or_else(|| err(e.pos(), format!("undeclared predicate `{pred}`")))?;
    if schema.params.len() != items.len() - 1 {
        return Err(err(
            e.pos(),
            format!("`{pred}` takes {} arguments", schema.params.len()),
        ));
    }
    let mut args = Vec::new();
    for (a, param) in items[1..].iter().zip(&schema.params) {
        let s = a.expect_sym("an object")?;
        let obj = objects
            .iter()
            .find(|o| o.name == s)
            .ok_or_else(|| err(a.pos(), format!("unknown object `{s}`")))?;
        if !model.is_subtype(&obj.ty, &param.ty) {
            return Err(err(
                a.pos(),
                format!("`{s}` is not of type `{}`", param.ty),
            ));
        }
        args.push(s);
    }
    let id = atom_id(pred, &args);
    Prop::new(&id).map_err(|e2| err(e.pos(), e2.to_string()))
}

fn goal_formula(e: &Sexp, model: &DomainModel, objects: &[Typed]) -> Result<Formula, DomainError> {
    let items = e.expect_list("a goal formula")?;
    match items.first().and_then(Sexp::sym) {
        None if items.is_empty() => Ok(Formula::True),
        Some("and") => Ok(Formula::conjunction(
            items[1..]
                .iter()
                .map(|c| goal_formula(c, model, objects))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Some("or") => Ok(Formula::disjunction(
            items[1..]
                .iter()
                .map(|c| goal_formula(c, model, objects))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Some("not") if items.len() == 2 => {
            Ok(Formula::not(goal_formula(&items[1], model, objects)?))
        }
        Some(op @ ("not" | "imply" | "forall" | "exists" | "=")) => {
            Err(err(e.pos(), format!("`{op}` is not supported in a goal")))
        }
        _ => Ok(Formula::Atom(ground_atom(e, model, objects)?)),
    }
}

/// Goal expression of a propositional formula.
pub(crate) fn goal_expression(f: &Formula) -> Result<GoalExpression, DomainError> {
    let mut bdd = Bdd::new();
    for p in f.atoms_in_order() {
        bdd.register(&p);
    }
    let g = bdd
        .from_propositional(f)
        .map_err(|e| DomainError::Inexpressible(e.to_string()))?;
    bdd.extract_goal(g).map_err(|e| match e {
        BddError::Unsatisfiable => DomainError::UnsatisfiableGoal,
        other => DomainError::Inexpressible(other.to_string()),
    })
}

/// Parses a domain and problem pair. Returns the model, all objects
/// (domain constants first), the initial state and the final-state goal.
pub fn parse_pddl(
    domain_text: &str,
    problem_text: &str,
) -> Result<(DomainModel, Vec<Typed>, WorldState, GoalExpression), DomainError> {
    let model = parse_domain(domain_text)?;
    let problem = parse_problem(problem_text, &model)?;
    let goal = goal_expression(&problem.goal)?;
    let mut objects = model.constants.clone();
    objects.extend(problem.objects);
    Ok((model, objects, problem.init, goal))
}

fn write_typed(out: &mut String, items: &[Typed]) {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.name);
        if t.ty != "object" {
            let _ = write!(out, " - {}", t.ty);
        }
    }
}

fn write_atom(out: &mut String, a: &AtomSchema, params: &[Typed]) {
    let _ = write!(out, "({}", a.predicate);
    for t in &a.args {
        match t {
            Term::Param(k) => {
                let _ = write!(out, " {}", params[*k].name);
            }
            Term::Object(o) => {
                let _ = write!(out, " {o}");
            }
        }
    }
    out.push(')');
}

fn write_literals(out: &mut String, lits: &[(AtomSchema, bool)], params: &[Typed]) {
    out.push_str("(and");
    for (a, pos) in lits {
        out.push(' ');
        if !pos {
            out.push_str("(not ");
        }
        write_atom(out, a, params);
        if !pos {
            out.push(')');
        }
    }
    out.push(')');
}

impl DomainModel {
    /// PDDL text of this model.
    pub fn to_pddl(&self) -> String {
        let mut out = format!("(define (domain {})\n", self.name);
        if !self.requirements.is_empty() {
            let _ = writeln!(out, "  (:requirements {})", self.requirements.join(" "));
        }
        if !self.types.is_empty() {
            out.push_str("  (:types");
            for (t, parent) in &self.types {
                let _ = write!(out, " {t} - {parent}");
            }
            out.push_str(")\n");
        }
        if !self.constants.is_empty() {
            out.push_str("  (:constants ");
            write_typed(&mut out, &self.constants);
            out.push_str(")\n");
        }
        out.push_str("  (:predicates");
        for p in &self.predicates {
            let _ = write!(out, "\n    ({}", p.name);
            if !p.params.is_empty() {
                out.push(' ');
                write_typed(&mut out, &p.params);
            }
            out.push(')');
        }
        out.push_str(")\n");
        for a in &self.actions {
            let _ = write!(out, "  (:action {}\n    :parameters (", a.name);
            write_typed(&mut out, &a.params);
            out.push_str(")\n    :precondition ");
            write_literals(&mut out, &a.precondition, &a.params);
            out.push_str("\n    :effect ");
            let eff: Vec<(AtomSchema, bool)> = a
                .del
                .iter()
                .map(|x| (x.clone(), false))
                .chain(a.add.iter().map(|x| (x.clone(), true)))
                .collect();
            write_literals(&mut out, &eff, &a.params);
            out.push_str(")\n");
        }
        out.push_str(")\n");
        out
    }
}

/// PDDL problem text. Ground atoms are given as `(predicate, args)` pairs.
pub(crate) fn problem_text(
    name: &str,
    domain: &str,
    objects: &[Typed],
    init: &[(String, Vec<String>)],
    goal: &str,
) -> String {
    let mut out = format!("(define (problem {name})\n  (:domain {domain})\n");
    if !objects.is_empty() {
        out.push_str("  (:objects ");
        write_typed(&mut out, objects);
        out.push_str(")\n");
    }
    out.push_str("  (:init");
    for (p, args) in init {
        let _ = write!(out, " ({p}");
        for a in args {
            let _ = write!(out, " {a}");
        }
        out.push(')');
    }
    let _ = write!(out, ")\n  (:goal {goal})\n)\n");
    out
}
