use crate::error::ProblemError;

use super::types::*;

/// Integer routing metric: floor of the Euclidean distance. Round-to-nearest
/// would not reproduce the reference leg values, truncation does.
pub fn truncated_euclidean(a: Point, b: Point) -> i64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).isqrt()
}

/// Total length of a closed route `depot -> nodes... -> depot`.
fn route_length(points: &[Point], route: &[usize]) -> i64 {
    let depot = points[0];
    let mut total = 0;
    let mut prev = depot;
    for &n in route {
        total += truncated_euclidean(prev, points[n]);
        prev = points[n];
    }
    total + truncated_euclidean(prev, depot)
}

/// Computes the FSSP schedule induced by a job permutation via the two
/// standard flow-shop recurrences. Returns ops in permutation-major,
/// machine-minor order.
pub fn fssp_schedule(inst: &ShopInstance, order: &[usize]) -> Vec<ScheduledOp> {
    let m = inst.machines;
    let mut machine_free = vec![0i64; m];
    let mut schedule = Vec::with_capacity(order.len() * m);
    for &job in order {
        let mut job_free = 0i64;
        for (k, free) in machine_free.iter_mut().enumerate() {
            let p = inst.duration(job, k);
            let start = job_free.max(*free);
            schedule.push(ScheduledOp { job, machine: k, start, duration: p });
            job_free = start + p;
            *free = start + p;
        }
    }
    schedule
}

/// Recomputes the objective from the solution structure alone. The stored
/// objective field is ignored.
pub fn objective_value(instance: &ProblemInstance, body: &SolutionBody) -> Result<i64, ProblemError> {
    match (instance, body) {
        (ProblemInstance::Routing(r), SolutionBody::Tour(order)) => {
            for &n in order {
                check_index(n, r.points.len(), "node")?;
            }
            // A tour is a cycle; the depot legs are the first/last hops.
            if order.is_empty() {
                return Ok(0);
            }
            let mut total = 0;
            for w in order.windows(2) {
                total += truncated_euclidean(r.points[w[0]], r.points[w[1]]);
            }
            total += truncated_euclidean(r.points[*order.last().unwrap()], r.points[order[0]]);
            Ok(total)
        }
        (ProblemInstance::Routing(r), SolutionBody::Routes(routes)) => {
            let mut total = 0;
            for route in routes {
                for &n in route {
                    check_index(n, r.points.len(), "node")?;
                }
                total += route_length(&r.points, route);
            }
            Ok(total)
        }
        (ProblemInstance::Knapsack(k), SolutionBody::Picks(picks)) => {
            let mut total = 0;
            for &i in picks {
                check_index(i, k.items.len(), "item")?;
                total += k.items[i].value;
            }
            Ok(total)
        }
        (ProblemInstance::BinPack(b), SolutionBody::Packing(bins)) => {
            for bin in bins {
                for &id in bin {
                    check_index(id, b.items.len(), "item")?;
                }
            }
            Ok(bins.iter().filter(|bin| !bin.is_empty()).count() as i64)
        }
        (ProblemInstance::Shop(s), SolutionBody::Schedule(ops)) if s.kind == ProblemKind::Jssp => {
            Ok(ops.iter().map(|op| op.end()).max().unwrap_or(0))
        }
        (ProblemInstance::Shop(s), SolutionBody::Permutation(order)) if s.kind == ProblemKind::Fssp => {
            for &j in order {
                check_index(j, s.jobs, "job")?;
            }
            Ok(fssp_schedule(s, order)
                .iter()
                .map(|op| op.end())
                .max()
                .unwrap_or(0))
        }
        _ => Err(ProblemError::KindMismatch {
            expected: "matching solution variant",
            got: instance.kind(),
        }),
    }
}

fn check_index(index: usize, len: usize, what: &'static str) -> Result<(), ProblemError> {
    if index < len {
        Ok(())
    } else {
        Err(ProblemError::InvalidIndex { what, index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point { x, y }
    }

    #[test]
    fn distance_matches_reference_legs() {
        assert_eq!(truncated_euclidean(p(34, 42), p(39, 58)), 16);
        assert_eq!(truncated_euclidean(p(17, 22), p(7, 12)), 14);
        assert_eq!(truncated_euclidean(p(0, 0), p(0, 0)), 0);
    }

    #[test]
    fn distance_symmetric() {
        let a = p(3, 29);
        let b = p(22, 60);
        assert_eq!(truncated_euclidean(a, b), truncated_euclidean(b, a));
        assert_eq!(truncated_euclidean(a, b), 36);
    }
}
