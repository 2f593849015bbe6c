//! Toolkit for six classic NP-hard optimization problems: seeded instance
//! generation, exact and heuristic reference solvers, a constraint-annotated
//! stepwise solution text format (plus a flat list ablation format) with an
//! incremental validator, a best-of-N evaluation harness for externally
//! produced candidate solutions, and a small attention-pooled text classifier
//! that routes instruction text to a problem family.

pub mod codec;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod gen;
pub mod problems;
pub mod router;
pub mod samples;
pub mod solve;

pub use error::{CodecError, EvalError, GenError, ProblemError, RouterError, SolveError};
