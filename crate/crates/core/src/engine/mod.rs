//! Computing the least fixed point: on demand with memoization, naively as
//! an oracle, and stage by stage over a finite slice of the universe.

mod eval;
mod instance;
mod naive;
mod stage;
mod universe;

pub use eval::{evaluate, EvalOptions, Evaluator, Outcome, Step, TraceEvent};
pub use naive::evaluate_naive;
pub use stage::{
    crosscheck_fixpoint, iterate_stage, run_to_fixpoint, verify_monotone, Entry, FixpointRun, Mismatch,
    MonotoneViolation, StageTable,
};
pub use universe::{count_universe, enumerate_universe, for_each_element, Universe};
