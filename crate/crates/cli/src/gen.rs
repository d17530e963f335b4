//! Blocksworld benchmark generator.

use std::fmt;
use std::str::FromStr;

use crate::CliError;

pub const BLOCKSWORLD_DOMAIN: &str = "(define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block)
               (ontable ?x - block)
               (clear ?x - block)
               (holding ?x - block)
               (handempty))
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
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    /// Build the ascending tower, then the descending one.
    Reversal,
    /// Build the ascending tower, then move its base block to the top.
    Relocation,
}

impl Benchmark {
    /// Length of a shortest plan for `n` blocks.
    pub fn optimum(self, n: usize) -> usize {
        match self {
            Benchmark::Reversal => 4 * n - 2,
            Benchmark::Relocation => 6 * (n - 1),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Benchmark::Reversal => "reversal",
            Benchmark::Relocation => "relocation",
        })
    }
}

impl FromStr for Benchmark {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "reversal" => Ok(Benchmark::Reversal),
            "relocation" => Ok(Benchmark::Relocation),
            _ => Err(CliError::Usage(format!("unknown benchmark `{s}`"))),
        }
    }
}

/// A tower listed bottom to top.
fn tower(blocks: &[usize]) -> Vec<(String, Vec<String>)> {
    let mut atoms = vec![("ontable".to_string(), vec![format!("b{}", blocks[0])])];
    for w in blocks.windows(2) {
        atoms.push(("on".into(), vec![format!("b{}", w[1]), format!("b{}", w[0])]));
    }
    atoms
}

fn ltl(atoms: &[(String, Vec<String>)]) -> String {
    atoms
        .iter()
        .map(|(p, args)| std::iter::once(p.as_str()).chain(args.iter().map(String::as_str)).collect::<Vec<_>>().join("_"))
        .collect::<Vec<_>>()
        .join(" & ")
}

fn pddl(atoms: &[(String, Vec<String>)]) -> String {
    atoms
        .iter()
        .map(|(p, args)| format!("({p} {})", args.join(" ")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generated benchmark instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub domain: String,
    pub problem: String,
    pub goal: String,
}

/// Domain, problem and LTLf goal for `n` blocks starting on the table.
/// The problem's own goal is the final tower.
pub fn gen_blocksworld(benchmark: Benchmark, n: usize) -> Result<Generated, CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("benchmarks need at least 2 blocks, got {n}")));
    }
    let asc: Vec<usize> = (1..=n).collect();
    let second: Vec<usize> = match benchmark {
        Benchmark::Reversal => (1..=n).rev().collect(),
        Benchmark::Relocation => (2..=n).chain([1]).collect(),
    };
    let first = tower(&asc);
    let last = tower(&second);
    let goal = format!("F(({}) & X(F({})))", ltl(&first), ltl(&last));
    let names: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let init: Vec<String> = names
        .iter()
        .flat_map(|b| [format!("(ontable {b})"), format!("(clear {b})")])
        .chain(["(handempty)".to_string()])
        .collect();
    let problem = format!(
        "(define (problem {benchmark}-{n})\n  (:domain blocksworld)\n  (:objects {} - block)\n  (:init {})\n  (:goal (and {})))\n",
        names.join(" "),
        init.join(" "),
        pddl(&last)
    );
    Ok(Generated {
        domain: BLOCKSWORLD_DOMAIN.to_string(),
        problem,
        goal,
    })
}
