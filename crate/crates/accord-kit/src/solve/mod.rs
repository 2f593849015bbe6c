//! Reference solvers: exact oracles at small scale plus the classic
//! construction heuristics used to label larger instances. Every result is
//! feasibility-checked by construction and ties are always broken by lowest
//! index so outputs are deterministic.

mod binpack;
mod flowshop;
mod jobshop;
mod knapsack;
mod routing;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::problems::{ProblemInstance, ProblemKind, Solution};

pub use binpack::binpack_solve;
pub use flowshop::{fssp_johnson, fssp_neh};
pub use jobshop::{jssp_dispatch, jssp_exact_tiny, DispatchRule};
pub use knapsack::knapsack_exact;
pub use routing::{tsp_exact, tsp_heuristic, vrp_heuristic};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    #[serde(flatten)]
    pub solution: Solution,
    pub method: String,
    pub elapsed: f64,
    pub optimal: bool,
}

pub(crate) fn timed<F>(method: &str, optimal: bool, f: F) -> SolveResult
where
    F: FnOnce() -> Solution,
{
    let t0 = Instant::now();
    let solution = f();
    SolveResult {
        solution,
        method: method.to_string(),
        elapsed: t0.elapsed().as_secs_f64(),
        optimal,
    }
}

/// Default labeling solver per problem kind: exact where cheap, the named
/// construction heuristic otherwise.
pub fn solve_default(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    match instance.kind() {
        ProblemKind::Tsp => {
            let r = instance.as_routing()?;
            if r.points.len() <= 12 {
                tsp_exact(instance)
            } else {
                tsp_heuristic(instance)
            }
        }
        ProblemKind::Vrp => vrp_heuristic(instance),
        ProblemKind::Knapsack => knapsack_exact(instance),
        ProblemKind::Binpack => binpack_solve(instance),
        ProblemKind::Fssp => fssp_neh(instance),
        ProblemKind::Jssp => {
            let s = instance.as_shop()?;
            if s.total_ops() <= 12 {
                jssp_exact_tiny(instance)
            } else {
                // Best of the three dispatch rules, first rule wins ties.
                let mut best: Option<SolveResult> = None;
                for rule in [DispatchRule::Spt, DispatchRule::Mwr, DispatchRule::Mor] {
                    let res = jssp_dispatch(instance, rule)?;
                    if best
                        .as_ref()
                        .is_none_or(|b| res.solution.objective < b.solution.objective)
                    {
                        best = Some(res);
                    }
                }
                Ok(best.unwrap())
            }
        }
    }
}
