use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::problems::{
    ProblemInstance, ProblemKind, ScheduledOp, ShopInstance, Solution, SolutionBody,
};

use super::{timed, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispatchRule {
    /// Shortest processing time.
    Spt,
    /// Most work remaining.
    Mwr,
    /// Most operations remaining.
    Mor,
}

impl DispatchRule {
    pub fn as_str(self) -> &'static str {
        match self {
            DispatchRule::Spt => "spt",
            DispatchRule::Mwr => "mwr",
            DispatchRule::Mor => "mor",
        }
    }
}

impl std::str::FromStr for DispatchRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spt" => Ok(DispatchRule::Spt),
            "mwr" => Ok(DispatchRule::Mwr),
            "mor" => Ok(DispatchRule::Mor),
            other => Err(format!("unknown dispatch rule `{other}`")),
        }
    }
}

fn require_jssp(instance: &ProblemInstance) -> Result<&ShopInstance, SolveError> {
    let s = instance.as_shop()?;
    if s.kind != ProblemKind::Jssp {
        return Err(crate::error::ProblemError::KindMismatch {
            expected: "jssp",
            got: s.kind,
        }
        .into());
    }
    Ok(s)
}

/// Non-delay dispatching: at each decision point schedule, among the
/// operations achieving the earliest possible start, the one chosen by the
/// rule (lowest job index on ties).
pub fn jssp_dispatch(
    instance: &ProblemInstance,
    rule: DispatchRule,
) -> Result<SolveResult, SolveError> {
    let s = require_jssp(instance)?.clone();
    let method = format!("jssp_dispatch_{}", rule.as_str());
    Ok(timed(&method, false, || {
        let mut next_op = vec![0usize; s.jobs];
        let mut job_ready = vec![0i64; s.jobs];
        let mut machine_ready = vec![0i64; s.machines];
        let mut remaining_work: Vec<i64> = (0..s.jobs)
            .map(|j| s.ops[j].iter().map(|op| op.duration).sum())
            .collect();
        let total: usize = s.ops.iter().map(|j| j.len()).sum();
        let mut schedule = Vec::with_capacity(total);
        for _ in 0..total {
            let earliest = (0..s.jobs)
                .filter(|&j| next_op[j] < s.ops[j].len())
                .map(|j| {
                    let op = s.ops[j][next_op[j]];
                    (job_ready[j].max(machine_ready[op.machine]), j)
                })
                .collect::<Vec<_>>();
            let t = earliest.iter().map(|&(est, _)| est).min().unwrap();
            let job = earliest
                .iter()
                .filter(|&&(est, _)| est == t)
                .map(|&(_, j)| j)
                .min_by_key(|&j| {
                    let op = s.ops[j][next_op[j]];
                    match rule {
                        DispatchRule::Spt => (op.duration, j as i64),
                        DispatchRule::Mwr => (-remaining_work[j], j as i64),
                        DispatchRule::Mor => (-((s.ops[j].len() - next_op[j]) as i64), j as i64),
                    }
                })
                .unwrap();
            let op = s.ops[job][next_op[job]];
            schedule.push(ScheduledOp { job, machine: op.machine, start: t, duration: op.duration });
            job_ready[job] = t + op.duration;
            machine_ready[op.machine] = t + op.duration;
            remaining_work[job] -= op.duration;
            next_op[job] += 1;
        }
        let objective = schedule.iter().map(|op| op.end()).max().unwrap_or(0);
        Solution { body: SolutionBody::Schedule(schedule), objective }
    }))
}

const EXACT_OP_LIMIT: usize = 12;

/// Exhaustive optimum for tiny instances: enumerates all job interleavings
/// with semi-active timing, which covers an optimal schedule.
pub fn jssp_exact_tiny(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let s = require_jssp(instance)?.clone();
    let total = s.total_ops();
    if total > EXACT_OP_LIMIT {
        return Err(SolveError::TooLarge {
            detail: format!("{total} operations > {EXACT_OP_LIMIT}"),
        });
    }
    Ok(timed("jssp_exhaustive", true, || {
        struct Search {
            s: ShopInstance,
            total: usize,
            best_ms: i64,
            best: Vec<ScheduledOp>,
            cur: Vec<ScheduledOp>,
            next_op: Vec<usize>,
            job_ready: Vec<i64>,
            machine_ready: Vec<i64>,
        }
        impl Search {
            fn go(&mut self) {
                if self.cur.len() == self.total {
                    let ms = self.cur.iter().map(|op| op.end()).max().unwrap_or(0);
                    if ms < self.best_ms {
                        self.best_ms = ms;
                        self.best = self.cur.clone();
                    }
                    return;
                }
                for job in 0..self.s.jobs {
                    let k = self.next_op[job];
                    if k >= self.s.ops[job].len() {
                        continue;
                    }
                    let op = self.s.ops[job][k];
                    let start = self.job_ready[job].max(self.machine_ready[op.machine]);
                    if start + op.duration >= self.best_ms {
                        continue; // cannot beat the incumbent
                    }
                    let (jr, mr) = (self.job_ready[job], self.machine_ready[op.machine]);
                    self.cur.push(ScheduledOp {
                        job,
                        machine: op.machine,
                        start,
                        duration: op.duration,
                    });
                    self.next_op[job] += 1;
                    self.job_ready[job] = start + op.duration;
                    self.machine_ready[op.machine] = start + op.duration;
                    self.go();
                    self.cur.pop();
                    self.next_op[job] -= 1;
                    self.job_ready[job] = jr;
                    self.machine_ready[op.machine] = mr;
                }
            }
        }
        let jobs = s.jobs;
        let machines = s.machines;
        let mut search = Search {
            s,
            total,
            best_ms: i64::MAX,
            best: Vec::new(),
            cur: Vec::with_capacity(total),
            next_op: vec![0; jobs],
            job_ready: vec![0; jobs],
            machine_ready: vec![0; machines],
        };
        search.go();
        let objective = search.best_ms;
        Solution { body: SolutionBody::Schedule(search.best), objective }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{check_feasible, ShopOp};
    use crate::samples;

    #[test]
    fn dispatch_rules_feasible_on_sample() {
        let inst = samples::jssp_instance();
        for rule in [DispatchRule::Spt, DispatchRule::Mwr, DispatchRule::Mor] {
            let res = jssp_dispatch(&inst, rule).unwrap();
            assert!(check_feasible(&inst, &res.solution).feasible, "rule {rule:?}");
        }
    }

    #[test]
    fn single_job_makespan_is_duration_sum() {
        let inst = ProblemInstance::Shop(ShopInstance {
            kind: ProblemKind::Jssp,
            jobs: 1,
            machines: 3,
            ops: vec![vec![
                ShopOp { machine: 0, duration: 4 },
                ShopOp { machine: 2, duration: 5 },
                ShopOp { machine: 1, duration: 6 },
            ]],
        });
        let res = jssp_dispatch(&inst, DispatchRule::Spt).unwrap();
        assert_eq!(res.solution.objective, 15);
        let exact = jssp_exact_tiny(&inst).unwrap();
        assert_eq!(exact.solution.objective, 15);
    }

    #[test]
    fn forced_conflict_optimum() {
        // Two jobs competing for the same two machines in opposite order.
        let inst = ProblemInstance::Shop(ShopInstance {
            kind: ProblemKind::Jssp,
            jobs: 2,
            machines: 2,
            ops: vec![
                vec![ShopOp { machine: 0, duration: 3 }, ShopOp { machine: 1, duration: 3 }],
                vec![ShopOp { machine: 1, duration: 3 }, ShopOp { machine: 0, duration: 3 }],
            ],
        });
        let res = jssp_exact_tiny(&inst).unwrap();
        // Both jobs run in parallel, swap machines, finish at 6.
        assert_eq!(res.solution.objective, 6);
        assert!(check_feasible(&inst, &res.solution).feasible);
    }

    #[test]
    fn exact_refuses_large_instances() {
        let inst = samples::jssp_instance(); // 12 ops, exactly at the limit
        assert!(jssp_exact_tiny(&inst).is_ok());
    }
}
