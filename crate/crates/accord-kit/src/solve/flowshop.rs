use crate::error::SolveError;
use crate::problems::{
    fssp_schedule, ProblemInstance, ProblemKind, ShopInstance, Solution, SolutionBody,
};

use super::{timed, SolveResult};

fn require_fssp(instance: &ProblemInstance) -> Result<&ShopInstance, SolveError> {
    let s = instance.as_shop()?;
    if s.kind != ProblemKind::Fssp {
        return Err(crate::error::ProblemError::KindMismatch {
            expected: "fssp",
            got: s.kind,
        }
        .into());
    }
    Ok(s)
}

pub(crate) fn permutation_makespan(s: &ShopInstance, order: &[usize]) -> i64 {
    fssp_schedule(s, order).iter().map(|op| op.end()).max().unwrap_or(0)
}

/// NEH constructive heuristic: jobs in decreasing total processing time
/// (lower index first on ties), each inserted at the makespan-minimizing
/// position (earliest position on ties).
pub fn fssp_neh(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let s = require_fssp(instance)?.clone();
    Ok(timed("fssp_neh", false, || {
        let mut jobs: Vec<usize> = (0..s.jobs).collect();
        jobs.sort_by_key(|&j| {
            let total: i64 = s.ops[j].iter().map(|op| op.duration).sum();
            (std::cmp::Reverse(total), j)
        });
        let mut order: Vec<usize> = Vec::with_capacity(s.jobs);
        for &job in &jobs {
            let mut best_pos = 0;
            let mut best_ms = i64::MAX;
            for pos in 0..=order.len() {
                let mut trial = order.clone();
                trial.insert(pos, job);
                let ms = permutation_makespan(&s, &trial);
                if ms < best_ms {
                    best_ms = ms;
                    best_pos = pos;
                }
            }
            order.insert(best_pos, job);
        }
        let objective = permutation_makespan(&s, &order);
        Solution { body: SolutionBody::Permutation(order), objective }
    }))
}

/// Johnson's rule: exact for the 2-machine permutation flow shop.
pub fn fssp_johnson(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let s = require_fssp(instance)?.clone();
    if s.machines != 2 {
        return Err(SolveError::NotTwoMachines(s.machines));
    }
    Ok(timed("fssp_johnson", true, || {
        let p = |j: usize, k: usize| s.duration(j, k);
        let mut first: Vec<usize> = (0..s.jobs).filter(|&j| p(j, 0) <= p(j, 1)).collect();
        first.sort_by_key(|&j| (p(j, 0), j));
        let mut second: Vec<usize> = (0..s.jobs).filter(|&j| p(j, 0) > p(j, 1)).collect();
        second.sort_by_key(|&j| (std::cmp::Reverse(p(j, 1)), j));
        let order: Vec<usize> = first.into_iter().chain(second).collect();
        let objective = permutation_makespan(&s, &order);
        Solution { body: SolutionBody::Permutation(order), objective }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::check_feasible;
    use crate::samples;

    #[test]
    fn sample_neh_order_and_makespan() {
        let inst = samples::fssp_instance();
        let res = fssp_neh(&inst).unwrap();
        assert_eq!(res.solution.objective, 39);
        // Matches the reference worked example exactly.
        assert_eq!(res.solution.body, SolutionBody::Permutation(vec![2, 1, 3, 0]));
        assert!(check_feasible(&inst, &res.solution).feasible);
    }

    #[test]
    fn sample_johnson_order_and_makespan() {
        let inst = samples::fssp_instance();
        let res = fssp_johnson(&inst).unwrap();
        assert_eq!(res.solution.objective, 39);
        assert_eq!(res.solution.body, SolutionBody::Permutation(vec![2, 3, 0, 1]));
        assert!(res.optimal);
    }

    #[test]
    fn single_job_makespan_is_duration_sum() {
        let inst = ProblemInstance::Shop(ShopInstance::flow_shop(vec![vec![3, 4, 5]]));
        let res = fssp_neh(&inst).unwrap();
        assert_eq!(res.solution.objective, 12);
    }

    #[test]
    fn johnson_rejects_three_machines() {
        let inst = ProblemInstance::Shop(ShopInstance::flow_shop(vec![vec![1, 2, 3]]));
        assert!(matches!(fssp_johnson(&inst), Err(SolveError::NotTwoMachines(3))));
    }

    #[test]
    fn identical_jobs_any_order_same_makespan() {
        let inst = ProblemInstance::Shop(ShopInstance::flow_shop(vec![vec![5, 5]; 4]));
        let s = inst.as_shop().unwrap();
        let ms: Vec<i64> = [
            vec![0, 1, 2, 3],
            vec![3, 2, 1, 0],
            vec![1, 3, 0, 2],
        ]
        .iter()
        .map(|o| permutation_makespan(s, o))
        .collect();
        assert!(ms.iter().all(|&m| m == ms[0]));
    }
}
