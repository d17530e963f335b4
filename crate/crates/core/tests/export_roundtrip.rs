use std::sync::Arc;

use tide_core::bdd::{GoalExpression, Literal};
use tide_core::domain::{export_constrained_pddl, ground, CHECK_ACTION_PREFIX, parse_domain, parse_pddl, Typed};
use tide_core::ltlf::WorldState;
use tide_core::reach_avoid::{solve_bfs, Plan};
use tide_core::{GroundDomain, GroundProblem};

const BLOCKSWORLD: &str = "(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (holding ?x - block) (handempty))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))";

fn blocks(n: usize) -> Arc<GroundDomain> {
    let m = parse_domain(BLOCKSWORLD).unwrap();
    let objs: Vec<Typed> = (1..=n)
        .map(|i| Typed {
            name: format!("b{i}"),
            ty: "block".into(),
        })
        .collect();
    Arc::new(ground(&m, &objs).unwrap())
}

fn state(d: &GroundDomain, atoms: &[&str]) -> tide_core::WorldStateBits {
    let w: WorldState = atoms.iter().copied().collect();
    d.state(&w).unwrap()
}

/// Solves the exported pair and maps the plan back without check actions.
fn solve_exported(p: &GroundProblem) -> (Plan, usize) {
    let (dt, pt) = export_constrained_pddl(p).unwrap();
    let (model, objects, init, goal) = parse_pddl(&dt, &pt).unwrap();
    let flat = Arc::new(ground(&model, &objects).unwrap());
    let start = flat.state(&init).unwrap();
    let plain = GroundProblem::new(flat.clone(), start, goal, GoalExpression::top());
    let plan = solve_bfs(&plain, 1_000_000).unwrap().plan().expect("exported problem solvable").clone();
    let checks = plan
        .steps
        .iter()
        .filter(|&&a| flat.actions[a].name.starts_with(CHECK_ACTION_PREFIX))
        .count();
    let steps = plan
        .steps
        .iter()
        .filter(|&&a| !flat.actions[a].name.starts_with(CHECK_ACTION_PREFIX))
        .map(|&a| p.domain.action_by_text(&flat.actions[a].to_string()).unwrap())
        .collect();
    (Plan::new(steps), checks)
}

#[test]
fn conjunctive_constraint_round_trip() {
    let d = blocks(3);
    let start = state(&d, &["on_b2_b1", "ontable_b1", "ontable_b3", "clear_b2", "clear_b3", "handempty"]);
    let p = GroundProblem::new(
        d.clone(),
        start,
        GoalExpression::conjunction(vec![Literal::pos("on_b3_b2")]),
        GoalExpression::conjunction(vec![Literal::pos("on_b2_b1"), Literal::neg("on_b3_b2")]),
    );
    let (plan, checks) = solve_exported(&p);
    assert_eq!(plan.to_text(&d), "(pick-up b3)\n(stack b3 b2)\n");
    assert_eq!(checks, 2);
    plan.validate(&p).unwrap();
}

#[test]
fn disjunctive_constraint_round_trip() {
    let d = blocks(3);
    let start = state(
        &d,
        &["ontable_b1", "ontable_b2", "ontable_b3", "clear_b1", "clear_b2", "clear_b3", "handempty"],
    );
    let constraint = GoalExpression {
        required: vec![Literal::neg("on_b2_b1")],
        disjuncts: vec![vec![Literal::pos("ontable_b3")], vec![Literal::pos("holding_b3")]],
    };
    let p = GroundProblem::new(
        d.clone(),
        start,
        GoalExpression::conjunction(vec![Literal::pos("on_b3_b1")]),
        constraint,
    );
    let (plan, _) = solve_exported(&p);
    assert_eq!(plan.len(), 2);
    plan.validate(&p).unwrap();
}

#[test]
fn unconstrained_export_is_the_plain_domain() {
    let d = blocks(2);
    let start = state(&d, &["ontable_b1", "ontable_b2", "clear_b1", "clear_b2", "handempty"]);
    let p = GroundProblem::new(
        d.clone(),
        start,
        GoalExpression::conjunction(vec![Literal::pos("on_b1_b2")]),
        GoalExpression::top(),
    );
    let (dt, _) = export_constrained_pddl(&p).unwrap();
    assert!(!dt.contains(CHECK_ACTION_PREFIX));
    let (plan, checks) = solve_exported(&p);
    assert_eq!((plan.len(), checks), (2, 0));
}
