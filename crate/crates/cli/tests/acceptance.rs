//! Acceptance suite. Each criterion prints one PASS/FAIL line; the run
//! exits with an error if any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tide_cli::{gen_blocksworld, load_instance, validate, Benchmark, Instance};
use tide_core::automaton::{translate, trace_rank, CostProvenance, Dfa, EdgeCostTable};
use tide_core::bdd::{Bdd, Literal};
use tide_core::ltlf::{atoms, evaluate, parse, Formula, Prop, Trace, WorldState};
use tide_core::reach_avoid::solve_one_step;
use tide_core::tide::{create_subproblem, generate_dfa_trace, solve, Case, FrozenQueue, NoPlan, PlannerSolver, TideResult};
use tide_core::{RealizationMode, TideConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const P1: &str = "F(on_b2_b1 & X(F(on_b3_b2)))";
const P2: &str = "F(on_b2_b1 & X(on_b2_b1 U on_b3_b2))";
const P3: &str = "F(on_b2_b1) & G(!on_b2_b1 | X(on_b3_b2))";

const SWITCHES_DOMAIN: &str = "(define (domain switches)
  (:requirements :strips)
  (:predicates (a) (b) (c))
  (:action set-b :parameters () :precondition (and) :effect (b))
  (:action drop-a :parameters () :precondition (b) :effect (not (a))))";
const SWITCHES_PROBLEM: &str = "(define (problem s) (:domain switches) (:init (a)) (:goal (and (b))))";

const ORDERS_DOMAIN: &str = "(define (domain orders)
  (:requirements :strips)
  (:predicates (ready ?o) (done ?o) (next ?o ?p))
  (:action process
    :parameters (?o ?p)
    :precondition (and (ready ?o) (next ?o ?p))
    :effect (and (done ?o) (ready ?p) (not (ready ?o)))))";
const ORDERS_PROBLEM: &str = "(define (problem five) (:domain orders)
  (:objects o1 o2 o3 o4 o5 o6)
  (:init (ready o1) (next o1 o2) (next o2 o3) (next o3 o4) (next o4 o5) (next o5 o6))
  (:goal (and (done o5))))";
const ORDERS_GOAL: &str = "F(done_o1) & F(done_o2) & F(done_o3) & F(done_o4) & F(done_o5)";

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn blocks3() -> Instance {
    let g = gen_blocksworld(Benchmark::Reversal, 3).unwrap();
    load_instance(&g.domain, &g.problem).unwrap()
}

fn switches() -> Instance {
    load_instance(SWITCHES_DOMAIN, SWITCHES_PROBLEM).unwrap()
}

fn orders() -> Instance {
    load_instance(ORDERS_DOMAIN, ORDERS_PROBLEM).unwrap()
}

fn config(mode: RealizationMode) -> TideConfig {
    TideConfig {
        mode,
        ..TideConfig::default()
    }
}

const MODES: [RealizationMode; 3] = [
    RealizationMode::BfsHierarchical,
    RealizationMode::Planner(PlannerSolver::Bfs),
    RealizationMode::Planner(PlannerSolver::Astar),
];

fn run(inst: &Instance, goal: &str, cfg: &TideConfig) -> Result<TideResult, String> {
    let f = parse(goal).map_err(|e| e.to_string())?;
    solve(inst.domain.clone(), &inst.start, &f, cfg).map_err(|e| e.to_string())
}

/// Solves and validates independently; `Ok(None)` means no plan.
fn solve_checked(inst: &Instance, goal: &str, cfg: &TideConfig) -> Result<Option<usize>, String> {
    let r = run(inst, goal, cfg)?;
    match r.plan() {
        Some(p) => {
            validate(inst, &parse(goal).unwrap(), &p.to_text(&inst.domain))
                .map_err(|v| format!("{goal}: plan does not validate: {v}"))?;
            Ok(Some(p.len()))
        }
        None => Ok(None),
    }
}

fn words(alphabet: &[WorldState], len: usize) -> Vec<Vec<WorldState>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn power_set(f: &Formula) -> Vec<WorldState> {
    let props: Vec<_> = atoms(f).into_iter().collect();
    (0..1usize << props.len())
        .map(|m| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

fn dfa_oracle_equivalence() -> Outcome {
    let suite = [
        "p", "!p", "true", "false", "p & q", "p | !q", "X p", "X(X q)", "!X p", "p U q", "F p", "G p",
        "G(p | q)", "F(p & q)", "F(p & X q)", "G(!p | X q)", "X(p U q)", "(p U q) U r", "p U (q U r)",
        "p U X q", "X(p) U (q & X r)", "G F p", "F G !q", "G(p | X(!q U r))", "!(p U q) & F r",
        "F(X(X(p)))", P1, P2, P3,
    ];
    let t0 = Instant::now();
    let mut checked = 0usize;
    for text in suite {
        let f = parse(text).map_err(|e| format!("{text}: {e}"))?;
        let dfa = translate(&f, 10_000).map_err(|e| format!("{text}: {e}"))?;
        let alphabet = power_set(&f);
        for len in 1..=4 {
            for w in words(&alphabet, len) {
                let expected = evaluate(&Trace::new(w.clone()).unwrap(), &f);
                check(dfa.accepts(&w) == expected, || format!("{text} disagrees on {w:?}"))?;
                checked += 1;
            }
        }
    }
    let dt = t0.elapsed();
    check(dt < Duration::from_secs(30), || format!("took {dt:?}"))?;
    Ok(format!("{} formulas, {checked} words, {dt:.2?}", suite.len()))
}

fn cost_example() -> Dfa {
    Dfa::from_guards(
        &["c1", "g", "h"],
        0,
        &[3],
        5,
        &[
            (0, 0, "!c1 & !g & !h"),
            (0, 1, "!c1 & g"),
            (0, 2, "c1 & !g & !h"),
            (0, 3, "c1 & g"),
            (0, 4, "!g & h"),
            (1, 1, "true"),
            (2, 2, "!g & !h"),
            (2, 3, "g"),
            (2, 4, "!g & h"),
            (3, 3, "true"),
            (4, 4, "true"),
        ],
    )
    .unwrap()
}

fn cost_worked_example() -> Outcome {
    let d = cost_example();
    for (s, t, c) in [(0, 2, 1), (0, 1, 1), (2, 3, 1), (0, 3, 2)] {
        let got = d.edge_cost(s, t).map_err(|e| e.to_string())?;
        check(got == c, || format!("edge {s}->{t} costs {got}, expected {c}"))?;
    }
    let costs = EdgeCostTable::from_dfa(&d);
    let cfg = TideConfig::default();
    let mut q = FrozenQueue::new(0);
    let best = generate_dfa_trace(&d, &costs, &mut q, &cfg).ok_or("no trace")?;
    check(best.states == [0, 2, 3], || format!("selected {:?}", best.states))?;
    let rank = trace_rank(&best).unwrap();
    check(rank == 1.0, || format!("rank {rank}"))?;
    let direct = q
        .traces()
        .into_iter()
        .find(|t| t.states == [0, 3])
        .ok_or("0->3 not queued")?;
    let direct_rank = trace_rank(direct).unwrap();
    check(direct_rank == 2.0, || format!("0->3 rank {direct_rank}"))?;
    Ok("0->2->3 rank 1 over 0->3 rank 2".into())
}

fn store(names: &[&str]) -> Bdd {
    let mut b = Bdd::new();
    for n in names {
        b.register(&Prop::new(n).unwrap());
    }
    b
}

fn guard_extraction() -> Outcome {
    let t0 = Instant::now();
    let mut b = store(&["a", "b", "c", "d", "e"]);
    let f = b
        .from_propositional(&parse("a & b & !d | a & c & !d | a & e").unwrap())
        .map_err(|e| e.to_string())?;
    let g = b.extract_goal(f).map_err(|e| e.to_string())?;
    check(g.required == [Literal::pos("a")], || format!("required {:?}", g.required))?;
    let got: BTreeSet<Vec<String>> = g
        .disjuncts
        .iter()
        .map(|c| {
            let mut v: Vec<String> = c.iter().map(|l| l.to_string()).collect();
            v.sort();
            v
        })
        .collect();
    let want: BTreeSet<Vec<String>> = [vec!["!d", "b"], vec!["!d", "c"], vec!["e"]]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
    check(got == want, || format!("disjuncts {got:?}"))?;

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let names = ["v0", "v1", "v2", "v3", "v4", "v5"];
    for round in 0..200 {
        let nv = rng.gen_range(1..=6);
        let terms: Vec<Vec<(usize, bool)>> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let mut vars: Vec<usize> = (0..nv).filter(|_| rng.gen_bool(0.5)).collect();
                if vars.is_empty() {
                    vars.push(rng.gen_range(0..nv));
                }
                vars.into_iter().map(|v| (v, rng.gen_bool(0.5))).collect()
            })
            .collect();
        let text = terms
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&(v, pos)| format!("{}{}", if pos { "" } else { "!" }, names[v]))
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect::<Vec<_>>()
            .join(" | ");
        let mut b = store(&names[..nv]);
        let f = b
            .from_propositional(&parse(&text).unwrap())
            .map_err(|e| format!("{text}: {e}"))?;
        let g = b.extract_goal(f).map_err(|e| format!("{text}: {e}"))?;
        for m in 0..1usize << nv {
            let truth = |v: usize| m >> v & 1 == 1;
            let want = terms.iter().any(|t| t.iter().all(|&(v, pos)| truth(v) == pos));
            let got = g.holds(|p| names.iter().position(|n| *n == p.as_str()).is_some_and(truth));
            check(got == want, || format!("round {round}: {text} vs {g} at {m:b}"))?;
        }
    }
    let dt = t0.elapsed();
    check(dt < Duration::from_secs(10), || format!("took {dt:?}"))?;
    Ok(format!("worked example and 200 random DNFs, {dt:.2?}"))
}

fn benchmark(b: Benchmark, sizes: std::ops::RangeInclusive<usize>, limit: Duration, astar: bool) -> Outcome {
    let mut lengths = Vec::new();
    for n in sizes {
        let g = gen_blocksworld(b, n).map_err(|e| e.to_string())?;
        let inst = load_instance(&g.domain, &g.problem).map_err(|e| e.to_string())?;
        let t0 = Instant::now();
        let len = solve_checked(&inst, &g.goal, &config(RealizationMode::BfsHierarchical))?
            .ok_or_else(|| format!("n={n}: no plan"))?;
        let dt = t0.elapsed();
        check(len == b.optimum(n), || format!("n={n}: length {len}, expected {}", b.optimum(n)))?;
        check(dt < limit, || format!("n={n}: took {dt:?}"))?;
        if astar {
            let t0 = Instant::now();
            let cfg = config(RealizationMode::Planner(PlannerSolver::Astar));
            let la = solve_checked(&inst, &g.goal, &cfg)?.ok_or_else(|| format!("n={n}: no A* plan"))?;
            let dt = t0.elapsed();
            check(la <= 2 * b.optimum(n), || format!("n={n}: A* length {la}"))?;
            check(dt < limit, || format!("n={n}: A* took {dt:?}"))?;
            lengths.push(format!("{n}:{len}/{la}"));
        } else {
            lengths.push(format!("{n}:{len}"));
        }
    }
    Ok(format!("lengths {}", lengths.join(" ")))
}

fn tower_reversal() -> Outcome {
    benchmark(Benchmark::Reversal, 3..=8, Duration::from_secs(10), true)
}

fn base_relocation() -> Outcome {
    benchmark(Benchmark::Relocation, 3..=6, Duration::from_secs(30), false)
}

fn completeness_negatives() -> Outcome {
    let inst = blocks3();
    let t0 = Instant::now();
    let r = run(&inst, "false", &TideConfig::default())?;
    let dt = t0.elapsed();
    check(r.outcome == Err(NoPlan::Proven), || format!("false gave {:?}", r.outcome))?;
    check(dt < Duration::from_secs(1), || format!("false took {dt:?}"))?;

    let inst = switches();
    let r = run(&inst, "F(c)", &TideConfig::default())?;
    check(r.outcome == Err(NoPlan::Proven), || format!("F(c) gave {:?}", r.outcome))?;
    check(r.queue.is_empty(), || format!("{} traces left", r.queue.len()))?;
    let init = r.dfa.initial();
    let edge = r
        .dfa
        .edges(init)
        .iter()
        .find(|e| e.target != init)
        .ok_or("no outgoing edge")?
        .target;
    let prov = r.costs.entry(init, edge).map(|e| e.provenance);
    check(prov == Some(CostProvenance::Pruned), || format!("edge provenance {prov:?}"))?;
    Ok(format!("false in {dt:.2?}; F(c) pruned with empty queue"))
}

fn caching_effectiveness() -> Outcome {
    let inst = orders();
    let mut calls = Vec::new();
    for caching in [true, false] {
        let cfg = TideConfig {
            caching,
            ..config(RealizationMode::Planner(PlannerSolver::Bfs))
        };
        let r = run(&inst, ORDERS_GOAL, &cfg)?;
        let p = r.plan().ok_or("no plan")?;
        validate(&inst, &parse(ORDERS_GOAL).unwrap(), &p.to_text(&inst.domain)).map_err(|v| v.to_string())?;
        check(r.stats.backtracking_steps >= 2, || {
            format!("only {} backtracks", r.stats.backtracking_steps)
        })?;
        calls.push((r.stats.solver_calls, r.stats.backtracking_steps, r.stats.cache_hits));
    }
    let ((with, bt, hits), (without, _, _)) = (calls[0], calls[1]);
    check(hits > 0, || "no cache hits".into())?;
    check(with < without, || format!("{with} calls with cache, {without} without"))?;
    Ok(format!("{with} calls with cache vs {without} without, {bt} backtracks, {hits} hits"))
}

fn mode_agreement() -> Outcome {
    let b3 = Arc::new(blocks3());
    let sw = Arc::new(switches());
    let ord = Arc::new(orders());
    let bench = |b, n| {
        let g = gen_blocksworld(b, n).unwrap();
        (Arc::new(load_instance(&g.domain, &g.problem).unwrap()), g.goal)
    };
    let (r4, r4g) = bench(Benchmark::Reversal, 4);
    let (m3, m3g) = bench(Benchmark::Relocation, 3);
    let (r3, r3g) = bench(Benchmark::Reversal, 3);
    let suite: Vec<(Arc<Instance>, String)> = vec![
        (b3.clone(), P1.into()),
        (b3.clone(), P2.into()),
        (b3.clone(), P3.into()),
        (r3, r3g),
        (r4, r4g),
        (m3, m3g),
        (b3.clone(), "G(handempty) & F(on_b2_b1)".into()),
        (b3, "!on_b2_b1 U (on_b2_b1 & X(holding_b3))".into()),
        (sw, "F(a) & G(!a | X(b))".into()),
        (ord, ORDERS_GOAL.into()),
    ];
    let mut solvable = 0;
    for (inst, goal) in &suite {
        let answers: Vec<Option<usize>> = MODES
            .iter()
            .map(|&m| solve_checked(inst, goal, &config(m)))
            .collect::<Result<_, _>>()?;
        let first = answers[0].is_some();
        check(answers.iter().all(|a| a.is_some() == first), || format!("{goal}: {answers:?}"))?;
        solvable += usize::from(first);
    }
    Ok(format!("{} problems, {solvable} solvable in every mode", suite.len()))
}

fn case_coverage() -> Outcome {
    let inst = blocks3();
    let d = &inst.domain;
    let after_first: WorldState = ["on_b2_b1", "ontable_b1", "ontable_b3", "clear_b2", "clear_b3", "handempty"]
        .into_iter()
        .collect();
    let s1 = d.state(&after_first).map_err(|e| e.to_string())?;
    let mut tags = Vec::new();
    for (goal, want) in [(P1, Case::Case1), (P2, Case::Case3), (P3, Case::Case4)] {
        let dfa = translate(&parse(goal).unwrap(), 100).map_err(|e| e.to_string())?;
        let first = create_subproblem(&dfa, d, 0, 1, &inst.start, true).map_err(|e| e.to_string())?;
        check(first.case == Case::Case1, || format!("{goal}: first edge is {}", first.case))?;
        let sp = create_subproblem(&dfa, d, 1, 2, &s1, false).map_err(|e| e.to_string())?;
        check(sp.case == want, || format!("{goal}: second edge is {}, expected {want}", sp.case))?;
        tags.push(sp.case.to_string());
    }

    let sw = switches();
    let goal = "F(a) & G(!a | X(b))";
    let cfg = TideConfig {
        record_subproblems: true,
        ..config(RealizationMode::Planner(PlannerSolver::Bfs))
    };
    let r = run(&sw, goal, &cfg)?;
    let plan = r.plan().ok_or("no plan for the fallback problem")?.to_text(&sw.domain);
    check(plan == "(set-b)\n(drop-a)\n", || format!("fallback plan {plan:?}"))?;
    let seq: Vec<Case> = r.subproblems.iter().map(|s| s.case).collect();
    let fell_back = r
        .subproblems
        .windows(2)
        .any(|w| w[0].case == Case::Case4 && !w[0].fresh && w[1].case == Case::Case3 && w[1].target == w[0].target);
    check(fell_back, || format!("no case4 -> case3 fallback in {seq:?}"))?;

    let goal = "!on_b2_b1 U (on_b2_b1 & X(holding_b3))";
    let r = run(&inst, goal, &cfg)?;
    let p = r.plan().ok_or("no plan for the one-step problem")?;
    validate(&inst, &parse(goal).unwrap(), &p.to_text(d)).map_err(|v| v.to_string())?;
    let sp = r
        .subproblems
        .iter()
        .find(|s| s.case == Case::Case2 && !s.fresh)
        .ok_or("no case2 subproblem")?;
    let step = solve_one_step(&sp.problem).map_err(|e| e.to_string())?;
    let len = step.plan().map(|p| p.len());
    check(len == Some(1), || format!("one-step plan length {len:?}"))?;
    Ok(format!("{}, case4 -> case3 fallback, case2 one-step length 1", tags.join("/")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("dfa oracle equivalence", dfa_oracle_equivalence),
        ("edge cost worked example", cost_worked_example),
        ("guard extraction", guard_extraction),
        ("tower reversal", tower_reversal),
        ("base block relocation", base_relocation),
        ("completeness negatives", completeness_negatives),
        ("caching effectiveness", caching_effectiveness),
        ("mode agreement", mode_agreement),
        ("case coverage", case_coverage),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why}", i + 1);
                failed.push(*name);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
