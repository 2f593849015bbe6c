use crate::error::SolveError;
use crate::problems::{ProblemInstance, Solution, SolutionBody};

use super::{timed, SolveResult};

const WORK_BOUND: u128 = 100_000_000;

/// Exact 0/1 knapsack by dynamic programming over integer weights.
/// Ties prefer not taking an item, so among equal-value picks the
/// lexicographically smallest index set wins.
pub fn knapsack_exact(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let k = instance.as_knapsack()?;
    let n = k.items.len();
    let cap = k.capacity.max(0) as usize;
    let cells = (n as u128) * (cap as u128 + 1);
    if cells > WORK_BOUND {
        return Err(SolveError::WorkBoundExceeded { cells, bound: WORK_BOUND });
    }

    Ok(timed("knapsack_dp", true, || {
        let words = cap / 64 + 1;
        let mut dp = vec![0i64; cap + 1];
        // take[i] is a bitset over weights: whether item i is taken at weight w.
        let mut take = vec![0u64; n * words];
        for (i, item) in k.items.iter().enumerate() {
            if item.weight > cap as i64 {
                continue;
            }
            let w_i = item.weight as usize;
            for w in (w_i..=cap).rev() {
                let cand = dp[w - w_i] + item.value;
                if cand > dp[w] {
                    dp[w] = cand;
                    take[i * words + w / 64] |= 1 << (w % 64);
                }
            }
        }

        let mut w = (0..=cap)
            .max_by_key(|&w| (dp[w], std::cmp::Reverse(w)))
            .unwrap_or(0);
        let mut picks = Vec::new();
        for i in (0..n).rev() {
            if take[i * words + w / 64] >> (w % 64) & 1 == 1 {
                picks.push(i);
                w -= k.items[i].weight as usize;
            }
        }
        picks.reverse();
        let objective = picks.iter().map(|&i| k.items[i].value).sum();
        Solution { body: SolutionBody::Picks(picks), objective }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{check_feasible, KnapsackInstance, KnapsackItem};
    use crate::samples;

    #[test]
    fn sample_all_items_fit() {
        let inst = samples::knapsack_instance();
        let res = knapsack_exact(&inst).unwrap();
        assert_eq!(res.solution.objective, 30);
        assert!(res.optimal);
        assert!(check_feasible(&inst, &res.solution).feasible);
    }

    #[test]
    fn zero_capacity_empty_pick() {
        let inst = ProblemInstance::Knapsack(KnapsackInstance {
            items: vec![KnapsackItem { value: 5, weight: 3 }],
            capacity: 0,
        });
        let res = knapsack_exact(&inst).unwrap();
        assert_eq!(res.solution.objective, 0);
        assert_eq!(res.solution.body, SolutionBody::Picks(vec![]));
    }

    #[test]
    fn work_bound_enforced() {
        let inst = ProblemInstance::Knapsack(KnapsackInstance {
            items: vec![KnapsackItem { value: 1, weight: 1 }; 200],
            capacity: 1_000_000_000,
        });
        assert!(matches!(
            knapsack_exact(&inst),
            Err(SolveError::WorkBoundExceeded { .. })
        ));
    }
}
