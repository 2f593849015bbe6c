//! Reader for the standard Taillard benchmark text layout.
//!
//! Job-shop files carry a header line (jobs, machines, seeds, bounds), a
//! `Times` block of jobs x machines durations in processing order, and a
//! `Machines` block of 1-based machine numbers for each operation. Flow-shop
//! files carry a header line and a `processing times` matrix stored
//! machine-major: one row per machine, one column per job.

use std::path::Path;

use crate::error::EvalError;
use crate::problems::{ProblemKind, ShopInstance, ShopOp};

pub fn read_taillard(path: &Path, kind: ProblemKind) -> Result<ShopInstance, EvalError> {
    let content = std::fs::read_to_string(path)?;
    parse_taillard(&content, kind)
}

pub fn parse_taillard(content: &str, kind: ProblemKind) -> Result<ShopInstance, EvalError> {
    // Numeric tokens line by line; label lines ("Times", "Machines", ...)
    // separate the blocks and are skipped. The header line may carry seeds
    // and bounds after the two counts; those extras are ignored.
    let mut numbers: Vec<(usize, i64)> = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    for (lineno, line) in content.lines().enumerate() {
        let mut values = Vec::new();
        let mut numeric = !line.trim().is_empty();
        for tok in line.split_whitespace() {
            match tok.parse::<i64>() {
                Ok(v) => values.push(v),
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            continue;
        }
        if header.is_none() {
            if values.len() < 2 || values[0] <= 0 || values[1] <= 0 {
                return Err(EvalError::Malformed {
                    line: lineno + 1,
                    detail: "expected a header line starting with job and machine counts"
                        .to_string(),
                });
            }
            header = Some((values[0] as usize, values[1] as usize));
        } else {
            numbers.extend(values.into_iter().map(|v| (lineno + 1, v)));
        }
    }
    let (jobs, machines) = header.ok_or(EvalError::Malformed {
        line: content.lines().count(),
        detail: "no header line found".to_string(),
    })?;
    let need = match kind {
        ProblemKind::Jssp => 2 * jobs * machines,
        ProblemKind::Fssp => jobs * machines,
        other => {
            return Err(EvalError::Malformed {
                line: 1,
                detail: format!("{other} is not a shop problem"),
            })
        }
    };
    if numbers.len() < need {
        return Err(EvalError::Malformed {
            line: content.lines().count(),
            detail: format!("expected {need} values after the header, found {}", numbers.len()),
        });
    }
    if numbers.len() > need {
        let (line, _) = numbers[need];
        return Err(EvalError::Malformed {
            line,
            detail: format!("{} trailing values beyond the expected {need}", numbers.len() - need),
        });
    }

    match kind {
        ProblemKind::Jssp => {
            let (times, mach) = numbers.split_at(jobs * machines);
            let mut ops = Vec::with_capacity(jobs);
            for j in 0..jobs {
                let mut job = Vec::with_capacity(machines);
                for k in 0..machines {
                    let (line, duration) = times[j * machines + k];
                    let (mline, m) = mach[j * machines + k];
                    if duration < 0 {
                        return Err(EvalError::Malformed {
                            line,
                            detail: format!("negative duration {duration}"),
                        });
                    }
                    if m < 1 || m as usize > machines {
                        return Err(EvalError::Malformed {
                            line: mline,
                            detail: format!("machine number {m} outside 1..={machines}"),
                        });
                    }
                    job.push(ShopOp { machine: m as usize - 1, duration });
                }
                ops.push(job);
            }
            Ok(ShopInstance { kind, jobs, machines, ops })
        }
        ProblemKind::Fssp => {
            let mut durations = vec![vec![0i64; machines]; jobs];
            for m in 0..machines {
                for j in 0..jobs {
                    let (line, d) = numbers[m * jobs + j];
                    if d < 0 {
                        return Err(EvalError::Malformed {
                            line,
                            detail: format!("negative duration {d}"),
                        });
                    }
                    durations[j][m] = d;
                }
            }
            Ok(ShopInstance::flow_shop(durations))
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOW_SHOP_5X4: &str = "\
number of jobs, number of machines, initial seed, upper bound and lower bound :
          5           4   873654221        1278        1232
processing times :
 54 83 15 71 77
 79  3 11 99 56
 16 89 49 15 89
 66 58 31 68 78
";

    const JOB_SHOP_2X3: &str = "\
Nb of jobs, Nb of Machines, Time seed, Machine seed, UB, LB
2 3 840612802 398197754 100 90
Times
10 20 30
5 15 25
Machines
2 1 3
3 2 1
";

    #[test]
    fn flow_shop_matrix_is_machine_major() {
        let inst = parse_taillard(FLOW_SHOP_5X4, ProblemKind::Fssp).unwrap();
        assert_eq!(inst.jobs, 5);
        assert_eq!(inst.machines, 4);
        assert_eq!(inst.duration(0, 0), 54);
        assert_eq!(inst.duration(0, 1), 79);
        assert_eq!(inst.duration(4, 0), 77);
        assert_eq!(inst.duration(4, 3), 78);
    }

    #[test]
    fn job_shop_blocks_pair_times_with_machines() {
        let inst = parse_taillard(JOB_SHOP_2X3, ProblemKind::Jssp).unwrap();
        assert_eq!(inst.jobs, 2);
        assert_eq!(inst.machines, 3);
        assert_eq!(inst.ops[0][0], ShopOp { machine: 1, duration: 10 });
        assert_eq!(inst.ops[0][2], ShopOp { machine: 2, duration: 30 });
        assert_eq!(inst.ops[1][0], ShopOp { machine: 2, duration: 5 });
        assert_eq!(inst.ops[1][2], ShopOp { machine: 0, duration: 25 });
    }

    #[test]
    fn truncated_file_is_malformed() {
        let cut = &JOB_SHOP_2X3[..JOB_SHOP_2X3.len() - 10];
        assert!(matches!(
            parse_taillard(cut, ProblemKind::Jssp),
            Err(EvalError::Malformed { .. })
        ));
    }

    #[test]
    fn json_round_trip_preserves_instance() {
        let inst = parse_taillard(JOB_SHOP_2X3, ProblemKind::Jssp).unwrap();
        let wrapped = crate::problems::ProblemInstance::Shop(inst.clone());
        let json = serde_json::to_string(&wrapped).unwrap();
        let back: crate::problems::ProblemInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(back.as_shop().unwrap(), &inst);
    }
}
