//! Problem definitions: instance/solution data model, objective computation,
//! and ground-truth feasibility checking for all six problem families.

mod feasible;
mod objective;
mod types;

pub use feasible::{check_feasible, permutation_schedule};
pub use objective::{fssp_schedule, objective_value, truncated_euclidean};
pub use types::*;
