use std::collections::HashMap;

use super::objective::{fssp_schedule, objective_value};
use super::types::*;

/// Verifies every hard constraint of the instance against the solution,
/// including that the declared objective equals the recomputed one.
/// Infeasibility is a verdict, never an error.
pub fn check_feasible(instance: &ProblemInstance, solution: &Solution) -> FeasibilityVerdict {
    let mut v = Vec::new();
    match (instance, &solution.body) {
        (ProblemInstance::Routing(r), SolutionBody::Tour(order)) if r.kind == ProblemKind::Tsp => {
            check_tour(r, order, &mut v);
        }
        (ProblemInstance::Routing(r), SolutionBody::Routes(routes)) if r.kind == ProblemKind::Vrp => {
            check_routes(r, routes, &mut v);
        }
        (ProblemInstance::Knapsack(k), SolutionBody::Picks(picks)) => {
            check_picks(k, picks, &mut v);
        }
        (ProblemInstance::BinPack(b), SolutionBody::Packing(bins)) => {
            check_packing(b, bins, &mut v);
        }
        (ProblemInstance::Shop(s), SolutionBody::Schedule(ops)) if s.kind == ProblemKind::Jssp => {
            check_schedule(s, ops, &mut v);
        }
        (ProblemInstance::Shop(s), SolutionBody::Permutation(order)) if s.kind == ProblemKind::Fssp => {
            check_permutation(s, order, &mut v);
        }
        _ => {
            v.push(violation(
                "kind",
                format!("solution variant does not match {} instance", instance.kind()),
            ));
            return FeasibilityVerdict::from_violations(v);
        }
    }
    if v.is_empty() {
        match objective_value(instance, &solution.body) {
            Ok(obj) if obj == solution.objective => {}
            Ok(obj) => v.push(violation(
                "objective",
                format!("declared objective {} != recomputed {}", solution.objective, obj),
            )),
            Err(e) => v.push(violation("objective", e.to_string())),
        }
    }
    FeasibilityVerdict::from_violations(v)
}

fn check_tour(r: &RoutingInstance, order: &[usize], v: &mut Vec<Violation>) {
    let n = r.points.len();
    let mut seen = vec![false; n];
    for &node in order {
        if node >= n {
            v.push(violation("node_index", format!("node {node} does not exist")));
            return;
        }
        if seen[node] {
            v.push(violation("visit_count", format!("node {node} visited more than once")));
        }
        seen[node] = true;
    }
    for (node, seen) in seen.iter().enumerate() {
        if !seen {
            v.push(violation("visit_count", format!("node {node} never visited")));
        }
    }
}

fn check_routes(r: &RoutingInstance, routes: &[Vec<usize>], v: &mut Vec<Violation>) {
    let n = r.points.len();
    if routes.len() > r.vehicle_count {
        v.push(violation(
            "vehicle_count",
            format!("{} routes exceed {} vehicles", routes.len(), r.vehicle_count),
        ));
    }
    let mut seen = vec![false; n];
    seen[0] = true; // depot is not a customer
    for (ri, route) in routes.iter().enumerate() {
        let mut load = 0i64;
        for &node in route {
            if node >= n {
                v.push(violation("node_index", format!("node {node} does not exist")));
                return;
            }
            if node == 0 {
                v.push(violation("depot", format!("route {ri} revisits the depot mid-route")));
                continue;
            }
            if seen[node] {
                v.push(violation("visit_count", format!("customer {node} served more than once")));
            }
            seen[node] = true;
            load += r.demands[node];
        }
        if let Some(q) = r.capacity {
            if load > q {
                v.push(violation(
                    "capacity",
                    format!("route {ri} carries {load} > capacity {q}"),
                ));
            }
        }
    }
    for (node, seen) in seen.iter().enumerate() {
        if !seen {
            v.push(violation("visit_count", format!("customer {node} never served")));
        }
    }
}

fn check_picks(k: &KnapsackInstance, picks: &[usize], v: &mut Vec<Violation>) {
    let mut seen = vec![false; k.items.len()];
    let mut weight = 0i64;
    for &i in picks {
        if i >= k.items.len() {
            v.push(violation("item_index", format!("item {i} does not exist")));
            return;
        }
        if seen[i] {
            v.push(violation("duplicate_item", format!("item {i} picked more than once")));
        }
        seen[i] = true;
        weight += k.items[i].weight;
    }
    if weight > k.capacity {
        v.push(violation(
            "capacity",
            format!("total weight {weight} > capacity {}", k.capacity),
        ));
    }
}

fn check_packing(b: &BinPackInstance, bins: &[Vec<usize>], v: &mut Vec<Violation>) {
    let by_id: HashMap<usize, i64> = b.items.iter().map(|it| (it.id, it.weight)).collect();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (bi, bin) in bins.iter().enumerate() {
        let mut load = 0i64;
        for &id in bin {
            match by_id.get(&id) {
                None => {
                    v.push(violation("item_index", format!("item {id} does not exist")));
                    return;
                }
                Some(w) => load += w,
            }
            *seen.entry(id).or_insert(0) += 1;
        }
        if load > b.capacity {
            v.push(violation(
                "bin_capacity",
                format!("bin {bi} holds {load} > capacity {}", b.capacity),
            ));
        }
    }
    for it in &b.items {
        match seen.get(&it.id) {
            None => v.push(violation("assignment", format!("item {} never assigned", it.id))),
            Some(1) => {}
            Some(c) => v.push(violation(
                "assignment",
                format!("item {} assigned {c} times", it.id),
            )),
        }
    }
}

fn check_schedule(s: &ShopInstance, ops: &[ScheduledOp], v: &mut Vec<Violation>) {
    // Per-job: operations appear in job order with matching machine/duration,
    // each start at or after the previous completion.
    let mut next_op = vec![0usize; s.jobs];
    let mut job_ready = vec![0i64; s.jobs];
    let mut per_machine: HashMap<usize, Vec<(i64, i64)>> = HashMap::new();
    for op in ops {
        if op.job >= s.jobs {
            v.push(violation("job_index", format!("job {} does not exist", op.job)));
            return;
        }
        if op.machine >= s.machines {
            v.push(violation("machine_index", format!("machine {} does not exist", op.machine)));
            return;
        }
        let k = next_op[op.job];
        if k >= s.ops[op.job].len() {
            v.push(violation(
                "precedence",
                format!("job {} has extra operations", op.job),
            ));
            return;
        }
        let expected = s.ops[op.job][k];
        if expected.machine != op.machine {
            v.push(violation(
                "precedence",
                format!(
                    "job {} operation {k} must run on machine {}, got {}",
                    op.job, expected.machine, op.machine
                ),
            ));
            return;
        }
        if expected.duration != op.duration {
            v.push(violation(
                "duration",
                format!(
                    "job {} on machine {}: duration {} != instance duration {}",
                    op.job, op.machine, op.duration, expected.duration
                ),
            ));
        }
        if op.start < job_ready[op.job] {
            v.push(violation(
                "precedence",
                format!(
                    "job {} starts at {} before previous operation ends at {}",
                    op.job, op.start, job_ready[op.job]
                ),
            ));
        }
        if op.start < 0 {
            v.push(violation("readiness", format!("negative start {}", op.start)));
        }
        job_ready[op.job] = op.start + op.duration;
        next_op[op.job] += 1;
        per_machine
            .entry(op.machine)
            .or_default()
            .push((op.start, op.start + op.duration));
    }
    for (job, &done) in next_op.iter().enumerate() {
        if done != s.ops[job].len() {
            v.push(violation(
                "completeness",
                format!("job {job} has {done} of {} operations scheduled", s.ops[job].len()),
            ));
        }
    }
    for (machine, mut ivs) in per_machine {
        ivs.sort_unstable();
        for w in ivs.windows(2) {
            if w[1].0 < w[0].1 {
                v.push(violation(
                    "machine_conflict",
                    format!(
                        "machine {machine}: intervals [{}, {}) and [{}, {}) overlap",
                        w[0].0, w[0].1, w[1].0, w[1].1
                    ),
                ));
            }
        }
    }
}

fn check_permutation(s: &ShopInstance, order: &[usize], v: &mut Vec<Violation>) {
    let mut seen = vec![false; s.jobs];
    for &j in order {
        if j >= s.jobs {
            v.push(violation("job_index", format!("job {j} does not exist")));
            return;
        }
        if seen[j] {
            v.push(violation("job_sequence", format!("job {j} appears more than once")));
        }
        seen[j] = true;
    }
    for (j, seen) in seen.iter().enumerate() {
        if !seen {
            v.push(violation("job_sequence", format!("job {j} missing from permutation")));
        }
    }
}

/// The schedule a feasible FSSP permutation realizes; exported for
/// renderers and validators.
pub fn permutation_schedule(s: &ShopInstance, order: &[usize]) -> Vec<ScheduledOp> {
    fssp_schedule(s, order)
}
