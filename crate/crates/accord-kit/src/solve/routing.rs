use crate::error::SolveError;
use crate::problems::{
    truncated_euclidean, Point, ProblemInstance, Solution, SolutionBody,
};

use super::{timed, SolveResult};

fn dist_matrix(points: &[Point]) -> Vec<Vec<i64>> {
    points
        .iter()
        .map(|&a| points.iter().map(|&b| truncated_euclidean(a, b)).collect())
        .collect()
}

fn tour_length(d: &[Vec<i64>], order: &[usize]) -> i64 {
    let mut total = 0;
    for w in order.windows(2) {
        total += d[w[0]][w[1]];
    }
    total + d[*order.last().unwrap()][order[0]]
}

/// Exact TSP via Held-Karp dynamic programming; bounded at n <= 15.
pub fn tsp_exact(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let r = instance.as_routing()?;
    let n = r.points.len();
    if n > 15 {
        return Err(SolveError::TooLarge { detail: format!("{n} nodes > 15") });
    }
    let d = dist_matrix(&r.points);
    Ok(timed("tsp_held_karp", true, || {
        if n == 1 {
            return Solution { body: SolutionBody::Tour(vec![0]), objective: 0 };
        }
        // dp[mask][last]: cheapest path 0 -> ... -> last visiting exactly
        // the nodes in mask (node 0 always in mask).
        let full = 1usize << n;
        const INF: i64 = i64::MAX / 4;
        let mut dp = vec![vec![INF; n]; full];
        let mut parent = vec![vec![usize::MAX; n]; full];
        dp[1][0] = 0;
        for mask in 1..full {
            if mask & 1 == 0 {
                continue;
            }
            for last in 0..n {
                if mask >> last & 1 == 0 || dp[mask][last] == INF {
                    continue;
                }
                for next in 1..n {
                    if mask >> next & 1 == 1 {
                        continue;
                    }
                    let nm = mask | 1 << next;
                    let cand = dp[mask][last] + d[last][next];
                    if cand < dp[nm][next] {
                        dp[nm][next] = cand;
                        parent[nm][next] = last;
                    }
                }
            }
        }
        let all = full - 1;
        let best_last = (1..n)
            .min_by_key(|&last| (dp[all][last] + d[last][0], last))
            .unwrap();
        let mut order = Vec::with_capacity(n);
        let (mut mask, mut node) = (all, best_last);
        while node != usize::MAX {
            order.push(node);
            let p = parent[mask][node];
            mask &= !(1 << node);
            node = p;
        }
        order.reverse();
        debug_assert_eq!(order[0], 0);
        let objective = tour_length(&d, &order);
        Solution { body: SolutionBody::Tour(order), objective }
    }))
}

/// Greedy cheapest-arc construction from the depot followed by 2-opt
/// improvement. 2-opt passes are first-improvement in index order and never
/// increase the tour length.
pub fn tsp_heuristic(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let r = instance.as_routing()?;
    let n = r.points.len();
    let d = dist_matrix(&r.points);
    Ok(timed("tsp_cheapest_arc_2opt", false, || {
        let mut order = vec![0usize];
        let mut visited = vec![false; n];
        visited[0] = true;
        while order.len() < n {
            let last = *order.last().unwrap();
            let next = (0..n)
                .filter(|&i| !visited[i])
                .min_by_key(|&i| (d[last][i], i))
                .unwrap();
            visited[next] = true;
            order.push(next);
        }
        two_opt(&d, &mut order);
        let objective = tour_length(&d, &order);
        Solution { body: SolutionBody::Tour(order), objective }
    }))
}

fn two_opt(d: &[Vec<i64>], order: &mut [usize]) {
    let n = order.len();
    if n < 4 {
        return;
    }
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                // reversing order[i+1..=j] replaces edges (i,i+1) and (j,j+1)
                let a = order[i];
                let b = order[i + 1];
                let c = order[j];
                let e = order[(j + 1) % n];
                if i == (j + 1) % n {
                    continue;
                }
                let before = d[a][b] + d[c][e];
                let after = d[a][c] + d[b][e];
                if after < before {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Greedy cheapest feasible insertion VRP construction. Unused vehicles keep
/// empty (depot-only) routes. Ties break on lowest customer, route, and
/// position index.
pub fn vrp_heuristic(instance: &ProblemInstance) -> Result<SolveResult, SolveError> {
    let r = instance.as_routing()?;
    let n = r.points.len();
    let q = r.capacity.unwrap_or(i64::MAX);
    let total_demand: i64 = r.demands.iter().sum();
    if total_demand > q.saturating_mul(r.vehicle_count as i64) {
        return Err(SolveError::InfeasibleInstance(format!(
            "total demand {total_demand} exceeds fleet capacity"
        )));
    }
    if let Some(&worst) = r.demands.iter().max() {
        if worst > q {
            return Err(SolveError::InfeasibleInstance(format!(
                "demand {worst} exceeds vehicle capacity {q}"
            )));
        }
    }
    let d = dist_matrix(&r.points);
    let t0 = std::time::Instant::now();
    let all: Vec<usize> = (1..n).collect();
    let routes = insert_all(&d, &r.demands, r.vehicle_count, q, all.clone(), false)
        .or_else(|| {
            // Cheapest-first can strand a large customer once every vehicle
            // is nearly full; retry committing the largest demands first.
            let mut by_demand = all;
            by_demand.sort_by_key(|&c| (std::cmp::Reverse(r.demands[c]), c));
            insert_all(&d, &r.demands, r.vehicle_count, q, by_demand, true)
        })
        .ok_or_else(|| {
            SolveError::InfeasibleInstance(
                "no capacity-feasible insertion order found".to_string(),
            )
        })?;
    let objective = routes
        .iter()
        .map(|route| {
            let mut total = 0;
            let mut prev = 0;
            for &c in route {
                total += d[prev][c];
                prev = c;
            }
            total + d[prev][0]
        })
        .sum();
    Ok(SolveResult {
        solution: Solution { body: SolutionBody::Routes(routes), objective },
        method: "vrp_cheapest_insertion".to_string(),
        elapsed: t0.elapsed().as_secs_f64(),
        optimal: false,
    })
}

/// Inserts every customer at its cheapest feasible (route, position). With
/// `fixed_order` only the first unrouted customer is considered each round;
/// otherwise the globally cheapest customer goes next. Returns None when a
/// customer no longer fits anywhere.
fn insert_all(
    d: &[Vec<i64>],
    demands: &[i64],
    vehicles: usize,
    q: i64,
    mut unrouted: Vec<usize>,
    fixed_order: bool,
) -> Option<Vec<Vec<usize>>> {
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); vehicles];
    let mut loads = vec![0i64; vehicles];
    while !unrouted.is_empty() {
        let span = if fixed_order { 1 } else { unrouted.len() };
        let mut best: Option<(i64, usize, usize, usize)> = None; // (delta, cust_pos, route, pos)
        for (ci, &c) in unrouted[..span].iter().enumerate() {
            for (ri, route) in routes.iter().enumerate() {
                if loads[ri] + demands[c] > q {
                    continue;
                }
                for pos in 0..=route.len() {
                    let prev = if pos == 0 { 0 } else { route[pos - 1] };
                    let next = if pos == route.len() { 0 } else { route[pos] };
                    let delta = d[prev][c] + d[c][next] - d[prev][next];
                    if best.is_none_or(|(bd, bc, br, bp)| (delta, ci, ri, pos) < (bd, bc, br, bp))
                    {
                        best = Some((delta, ci, ri, pos));
                    }
                }
            }
        }
        let (_, ci, ri, pos) = best?;
        let c = unrouted.remove(ci);
        routes[ri].insert(pos, c);
        loads[ri] += demands[c];
    }
    Some(routes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{check_feasible, ProblemKind, RoutingInstance};
    use crate::samples;

    #[test]
    fn sample_tsp_optimum_is_181() {
        let inst = samples::tsp_instance();
        let res = tsp_exact(&inst).unwrap();
        assert_eq!(res.solution.objective, 181);
        assert!(check_feasible(&inst, &res.solution).feasible);
    }

    #[test]
    fn two_node_tour() {
        let inst = ProblemInstance::Routing(RoutingInstance {
            kind: ProblemKind::Tsp,
            points: vec![Point { x: 0, y: 0 }, Point { x: 3, y: 4 }],
            demands: vec![0, 0],
            vehicle_count: 1,
            capacity: None,
        });
        let res = tsp_exact(&inst).unwrap();
        assert_eq!(res.solution.objective, 10);
    }

    #[test]
    fn heuristic_never_beats_exact() {
        let inst = samples::tsp_instance();
        let exact = tsp_exact(&inst).unwrap();
        let heur = tsp_heuristic(&inst).unwrap();
        assert!(heur.solution.objective >= exact.solution.objective);
        assert!(check_feasible(&inst, &heur.solution).feasible);
    }

    #[test]
    fn vrp_sample_is_feasible() {
        let inst = samples::vrp_instance();
        let res = vrp_heuristic(&inst).unwrap();
        assert!(check_feasible(&inst, &res.solution).feasible);
    }

    #[test]
    fn single_customer_route() {
        let inst = ProblemInstance::Routing(RoutingInstance {
            kind: ProblemKind::Vrp,
            points: vec![Point { x: 0, y: 0 }, Point { x: 6, y: 8 }],
            demands: vec![0, 5],
            vehicle_count: 1,
            capacity: Some(10),
        });
        let res = vrp_heuristic(&inst).unwrap();
        assert_eq!(res.solution.objective, 20);
    }

    #[test]
    fn vrp_rejects_oversized_demand() {
        let inst = ProblemInstance::Routing(RoutingInstance {
            kind: ProblemKind::Vrp,
            points: vec![Point { x: 0, y: 0 }, Point { x: 1, y: 1 }],
            demands: vec![0, 50],
            vehicle_count: 2,
            capacity: Some(10),
        });
        assert!(matches!(
            vrp_heuristic(&inst),
            Err(SolveError::InfeasibleInstance(_))
        ));
    }
}
