//! Planning with temporally extended goals.
//!
//! A goal written in LTLf is compiled into a deterministic automaton whose
//! edges carry BDD guards. Candidate automaton traces are ranked by how much
//! propositional "work" each transition needs, and every transition of the
//! selected trace is solved as a classical reach-avoid problem. Failed
//! transitions feed back into the ranking until a plan is found or every
//! trace has been ruled out.

pub mod automaton;
pub mod bdd;
pub mod domain;
pub mod ltlf;
pub mod reach_avoid;
pub mod tide;

pub use automaton::Dfa;
pub use bdd::{Bdd, BddRef, GoalExpression, Literal};
pub use domain::{GroundDomain, GroundProblem, WorldStateBits};
pub use ltlf::{Formula, Prop, Trace, WorldState};
pub use reach_avoid::{Plan, SolveOutcome, SolveReport};
pub use tide::{RealizationMode, TideConfig};
