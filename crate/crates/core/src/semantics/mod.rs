//! Expression evaluation, the process transition system, occurrences and
//! residuals, and trace exploration with fairness, lock-freedom and liveness
//! verdicts.

mod eval;
mod explore;
mod label;
pub mod liveness;
mod occurrence;
mod step;

pub use eval::{eval, guard, loop_count, Env, PrimFn, Primitives};
pub use explore::{
    explore, Edge, ExploreConfig, Exploration, StepJson, Trace, TraceJson, TraceKind,
    TraceSetJson, Verdict, Verdicts,
};
pub use label::{sel_of_trace, ProcLabel};
pub use occurrence::{enabled, executed, occurrences, residual, top_level, Path, Residual};
pub use step::{default_values, step, Derivation, Transition};
