use crate::error::SolveError;
use crate::problems::{ProblemInstance, Solution, SolutionBody};

use super::{timed, SolveResult};

const EXACT_LIMIT: usize = 15;

/// First-fit decreasing, refined by an exact branch-and-bound when the
/// instance is small enough. Items are ordered by decreasing weight with
/// lowest id first on ties.
pub fn binpack_solve(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let b = instance.as_binpack()?;
    let n = b.items.len();
    let cap = b.capacity;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(b.items[i].weight), b.items[i].id));
    let weights: Vec<i64> = order.iter().map(|&i| b.items[i].weight).collect();

    let exact = n <= EXACT_LIMIT;
    Ok(timed(
        if exact { "binpack_branch_and_bound" } else { "binpack_ffd" },
        exact,
        || {
            let ffd = first_fit(&weights, cap);
            let assignment = if exact {
                let lower = lower_bound(&weights, cap);
                if ffd_bins(&ffd) == lower {
                    ffd
                } else {
                    branch_and_bound(&weights, cap, ffd)
                }
            } else {
                ffd
            };
            // Map positions in the sorted order back to item ids.
            let bins: Vec<Vec<usize>> = assignment
                .iter()
                .map(|bin| bin.iter().map(|&pos| b.items[order[pos]].id).collect())
                .collect();
            let objective = bins.len() as i64;
            Solution { body: SolutionBody::Packing(bins), objective }
        },
    ))
}

fn ffd_bins(bins: &[Vec<usize>]) -> usize {
    bins.len()
}

fn lower_bound(weights: &[i64], cap: i64) -> usize {
    let total: i64 = weights.iter().sum();
    ((total + cap - 1) / cap.max(1)).max(if weights.is_empty() { 0 } else { 1 }) as usize
}

fn first_fit(weights: &[i64], cap: i64) -> Vec<Vec<usize>> {
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut loads: Vec<i64> = Vec::new();
    for (pos, &w) in weights.iter().enumerate() {
        match loads.iter().position(|&l| l + w <= cap) {
            Some(bi) => {
                bins[bi].push(pos);
                loads[bi] += w;
            }
            None => {
                bins.push(vec![pos]);
                loads.push(w);
            }
        }
    }
    bins
}

/// Exhaustive packing search over decreasing-weight order. Each item goes
/// into an existing bin or the single next empty bin, which enumerates all
/// packings up to bin relabeling.
fn branch_and_bound(weights: &[i64], cap: i64, incumbent: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    struct Search<'a> {
        weights: &'a [i64],
        cap: i64,
        best: Vec<Vec<usize>>,
        loads: Vec<i64>,
        bins: Vec<Vec<usize>>,
    }
    impl Search<'_> {
        fn go(&mut self, pos: usize) {
            if self.bins.len() >= self.best.len() {
                return; // cannot improve
            }
            if pos == self.weights.len() {
                self.best = self.bins.clone();
                return;
            }
            let w = self.weights[pos];
            for bi in 0..self.bins.len() {
                if self.loads[bi] + w <= self.cap {
                    self.bins[bi].push(pos);
                    self.loads[bi] += w;
                    self.go(pos + 1);
                    self.loads[bi] -= w;
                    self.bins[bi].pop();
                }
            }
            self.bins.push(vec![pos]);
            self.loads.push(w);
            self.go(pos + 1);
            self.bins.pop();
            self.loads.pop();
        }
    }
    let mut s = Search { weights, cap, best: incumbent, loads: Vec::new(), bins: Vec::new() };
    s.go(0);
    s.best
}
