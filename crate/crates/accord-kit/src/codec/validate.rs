use crate::problems::*;

use super::*;

/// Replays a parsed trace as a state machine against the instance. Every
/// declared number is checked: arithmetic must hold exactly and chain from
/// the replayed state, every stepwise constraint must hold at its step, and
/// the declared final totals must equal the replayed totals. Findings land in
/// the report; this function never errors.
pub fn validate_trace(trace: &AccordTrace, instance: &ProblemInstance) -> ValidationReport {
    if trace.kind() != instance.kind() {
        return ValidationReport {
            status: Status::Infeasible,
            errors: vec![StepError {
                step: 0,
                code: ErrorCode::KindMismatch,
                detail: format!(
                    "trace is {}, instance is {}",
                    trace.kind(),
                    instance.kind()
                ),
            }],
            objective: None,
        };
    }
    let mut ctx = Ctx::default();
    match (trace, instance) {
        (AccordTrace::Knapsack { steps, total_value, total_weight, total_bound }, ProblemInstance::Knapsack(k)) => {
            knapsack(&mut ctx, k, steps, *total_value, *total_weight, *total_bound)
        }
        (AccordTrace::Binpack { bins, total_bins }, ProblemInstance::BinPack(b)) => {
            binpack(&mut ctx, b, bins, *total_bins)
        }
        (AccordTrace::Routing { routes, total_distance, .. }, ProblemInstance::Routing(r)) => {
            routing(&mut ctx, r, routes, *total_distance)
        }
        (AccordTrace::Jssp { steps, makespan }, ProblemInstance::Shop(s)) => {
            jssp(&mut ctx, s, steps, *makespan)
        }
        (AccordTrace::Fssp { jobs, makespan }, ProblemInstance::Shop(s)) => {
            fssp(&mut ctx, s, jobs, *makespan)
        }
        _ => unreachable!("kind equality checked above"),
    };
    ctx.finish()
}

#[derive(Default)]
struct Ctx {
    errors: Vec<StepError>,
    objective: Option<i64>,
}

impl Ctx {
    fn err(&mut self, step: usize, code: ErrorCode, detail: impl Into<String>) {
        self.errors.push(StepError { step, code, detail: detail.into() });
    }

    fn finish(self) -> ValidationReport {
        let status = if self.errors.is_empty() { Status::Feasible } else { Status::Infeasible };
        ValidationReport { status, errors: self.errors, objective: self.objective }
    }
}

fn knapsack(
    ctx: &mut Ctx,
    k: &KnapsackInstance,
    steps: &[KnapsackStep],
    total_value: i64,
    total_weight: i64,
    total_bound: i64,
) {
    let mut used = vec![false; k.items.len()];
    let mut value = 0i64;
    let mut weight = 0i64;
    for (i, st) in steps.iter().enumerate() {
        // The named item must exist in the instance and be unused; match the
        // lowest-index free item with this (value, weight) pair.
        match k
            .items
            .iter()
            .enumerate()
            .position(|(idx, it)| !used[idx] && it.value == st.value && it.weight == st.weight)
        {
            Some(idx) => used[idx] = true,
            None => {
                let dup = k
                    .items
                    .iter()
                    .any(|it| it.value == st.value && it.weight == st.weight);
                let code = if dup { ErrorCode::DuplicateItem } else { ErrorCode::ItemMismatch };
                ctx.err(i, code, format!("no unused item ({}, {})", st.value, st.weight));
            }
        }
        if st.add_value != st.value || st.add_weight != st.weight {
            ctx.err(
                i,
                ErrorCode::ItemMismatch,
                format!(
                    "declared addends ({}, {}) differ from item ({}, {})",
                    st.add_value, st.add_weight, st.value, st.weight
                ),
            );
        }
        if st.prev_value != value || st.prev_weight != weight {
            ctx.err(
                i,
                ErrorCode::ArithmeticMismatch,
                format!(
                    "declared previous totals ({}, {}) differ from replayed ({value}, {weight})",
                    st.prev_value, st.prev_weight
                ),
            );
        }
        if st.new_value != st.prev_value + st.add_value {
            ctx.err(
                i,
                ErrorCode::ArithmeticMismatch,
                format!("{}+{}={} does not hold", st.prev_value, st.add_value, st.new_value),
            );
        }
        if st.new_weight != st.prev_weight + st.add_weight {
            ctx.err(
                i,
                ErrorCode::ArithmeticMismatch,
                format!("{}+{}={} does not hold", st.prev_weight, st.add_weight, st.new_weight),
            );
        }
        if st.bound != k.capacity {
            ctx.err(
                i,
                ErrorCode::BoundMismatch,
                format!("declared bound {} != capacity {}", st.bound, k.capacity),
            );
        }
        value += st.value;
        weight += st.weight;
        if weight > k.capacity {
            ctx.err(
                i,
                ErrorCode::CapacityViolation,
                format!("running weight {weight} > capacity {}", k.capacity),
            );
        }
    }
    let end = steps.len();
    if total_value != value {
        ctx.err(
            end,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared total value {total_value} != replayed {value}"),
        );
    }
    if total_weight != weight {
        ctx.err(
            end,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared total weight {total_weight} != replayed {weight}"),
        );
    }
    if total_bound != k.capacity {
        ctx.err(
            end,
            ErrorCode::BoundMismatch,
            format!("declared bound {total_bound} != capacity {}", k.capacity),
        );
    }
    ctx.objective = Some(value);
}

fn binpack(ctx: &mut Ctx, b: &BinPackInstance, bins: &[BinTrace], total_bins: i64) {
    let mut used = vec![false; b.items.len()];
    let mut step = 0usize;
    for (bi, bin) in bins.iter().enumerate() {
        if bin.label != bi as i64 + 1 {
            ctx.err(
                step,
                ErrorCode::BinLabel,
                format!("bin labeled {} at position {}", bin.label, bi + 1),
            );
        }
        let mut load = 0i64;
        for st in &bin.items {
            match b.items.iter().position(|it| it.id == st.id) {
                None => ctx.err(step, ErrorCode::ItemMismatch, format!("item {} does not exist", st.id)),
                Some(idx) => {
                    if used[idx] {
                        ctx.err(step, ErrorCode::DuplicateItem, format!("item {} assigned twice", st.id));
                    }
                    used[idx] = true;
                    if b.items[idx].weight != st.weight {
                        ctx.err(
                            step,
                            ErrorCode::ItemMismatch,
                            format!(
                                "item {} weighs {}, declared {}",
                                st.id, b.items[idx].weight, st.weight
                            ),
                        );
                    }
                }
            }
            load += st.weight;
            if st.cumulative != load {
                ctx.err(
                    step,
                    ErrorCode::ArithmeticMismatch,
                    format!("declared cumulative {} != replayed {load}", st.cumulative),
                );
            }
            // The bound is surfaced only on the final item, but the capacity
            // constraint is checked at every step.
            if load > b.capacity {
                ctx.err(
                    step,
                    ErrorCode::CapacityViolation,
                    format!("bin load {load} > capacity {}", b.capacity),
                );
            }
            if let Some(bound) = st.bound {
                if bound != b.capacity {
                    ctx.err(
                        step,
                        ErrorCode::BoundMismatch,
                        format!("declared bound {bound} != capacity {}", b.capacity),
                    );
                }
            }
            step += 1;
        }
    }
    for (idx, &u) in used.iter().enumerate() {
        if !u {
            ctx.err(
                step,
                ErrorCode::Incomplete,
                format!("item {} never assigned", b.items[idx].id),
            );
        }
    }
    if total_bins != bins.len() as i64 {
        ctx.err(
            step,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared bin count {total_bins} != replayed {}", bins.len()),
        );
    }
    ctx.objective = Some(bins.len() as i64);
}

fn check_route_node(ctx: &mut Ctx, r: &RoutingInstance, step: usize, node: &RouteNode) -> bool {
    if node.id >= r.points.len() {
        ctx.err(step, ErrorCode::UnknownNode, format!("node {} does not exist", node.id));
        return false;
    }
    let p = r.points[node.id];
    if p.x != node.x || p.y != node.y {
        ctx.err(
            step,
            ErrorCode::CoordMismatch,
            format!(
                "node {} is at ({}, {}), declared ({}, {})",
                node.id, p.x, p.y, node.x, node.y
            ),
        );
        return false;
    }
    true
}

fn routing(ctx: &mut Ctx, r: &RoutingInstance, routes: &[RouteTrace], total_distance: i64) {
    if routes.len() > r.vehicle_count {
        ctx.err(
            0,
            ErrorCode::VehicleCount,
            format!("{} routes exceed {} vehicles", routes.len(), r.vehicle_count),
        );
    }
    let mut visited = vec![false; r.points.len()];
    visited[0] = true;
    let mut total = 0i64;
    let mut step = 0usize;
    for route in routes {
        if check_route_node(ctx, r, step, &route.start) && route.start.id != 0 {
            ctx.err(step, ErrorCode::DepotViolation, "route does not start at the depot");
        }
        let mut prev = route.start;
        let mut load = 0i64;
        for (li, leg) in route.legs.iter().enumerate() {
            let last = li + 1 == route.legs.len();
            if check_route_node(ctx, r, step, &leg.node) {
                if last {
                    if leg.node.id != 0 {
                        ctx.err(step, ErrorCode::DepotViolation, "route does not end at the depot");
                    }
                } else if leg.node.id == 0 {
                    ctx.err(step, ErrorCode::DepotViolation, "depot revisited mid-route");
                } else {
                    if visited[leg.node.id] {
                        ctx.err(
                            step,
                            ErrorCode::DuplicateVisit,
                            format!("customer {} visited more than once", leg.node.id),
                        );
                    }
                    visited[leg.node.id] = true;
                    load += r.demands[leg.node.id];
                    if let Some(q) = r.capacity {
                        if load > q {
                            ctx.err(
                                step,
                                ErrorCode::CapacityViolation,
                                format!("route load {load} > capacity {q}"),
                            );
                        }
                    }
                }
            }
            let expected = truncated_euclidean(
                Point { x: prev.x, y: prev.y },
                Point { x: leg.node.x, y: leg.node.y },
            );
            if leg.distance != expected {
                ctx.err(
                    step,
                    ErrorCode::DistanceMismatch,
                    format!("declared leg distance {} != {expected}", leg.distance),
                );
            }
            total += leg.distance;
            prev = leg.node;
            step += 1;
        }
    }
    for (node, &v) in visited.iter().enumerate() {
        if !v {
            ctx.err(step, ErrorCode::Incomplete, format!("customer {node} never visited"));
        }
    }
    if total_distance != total {
        ctx.err(
            step,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared total distance {total_distance} != replayed {total}"),
        );
    }
    ctx.objective = Some(total);
}

fn jssp(ctx: &mut Ctx, s: &ShopInstance, steps: &[JsspStep], makespan: i64) {
    let mut next_op = vec![0usize; s.jobs];
    let mut job_ready = vec![0i64; s.jobs];
    let mut machine_ready = vec![0i64; s.machines];
    let mut max_end = 0i64;
    for (i, st) in steps.iter().enumerate() {
        if st.job >= s.jobs {
            ctx.err(i, ErrorCode::UnknownJob, format!("job {} does not exist", st.job));
            continue;
        }
        if st.machine >= s.machines {
            ctx.err(i, ErrorCode::UnknownMachine, format!("machine {} does not exist", st.machine));
            continue;
        }
        let k = next_op[st.job];
        if k >= s.ops[st.job].len() {
            ctx.err(i, ErrorCode::DuplicateOperation, format!("job {} has extra operations", st.job));
            continue;
        }
        let expected = s.ops[st.job][k];
        if expected.machine != st.machine {
            ctx.err(
                i,
                ErrorCode::MachineOrder,
                format!(
                    "job {} operation {k} belongs on machine {}, declared {}",
                    st.job, expected.machine, st.machine
                ),
            );
            continue;
        }
        if expected.duration != st.duration {
            ctx.err(
                i,
                ErrorCode::DurationMismatch,
                format!(
                    "job {} on machine {}: declared duration {} != instance {}",
                    st.job, st.machine, st.duration, expected.duration
                ),
            );
        }
        if st.end != st.start + st.duration {
            ctx.err(
                i,
                ErrorCode::ArithmeticMismatch,
                format!("{}+{} -> {} does not hold", st.start, st.duration, st.end),
            );
        }
        // Readiness is recomputed from the replayed state; starts may exceed
        // it but never precede it.
        let ready = job_ready[st.job].max(machine_ready[st.machine]);
        if st.start < ready {
            ctx.err(
                i,
                ErrorCode::ReadinessViolation,
                format!("start {} precedes readiness {ready}", st.start),
            );
        }
        job_ready[st.job] = st.start + st.duration;
        machine_ready[st.machine] = st.start + st.duration;
        next_op[st.job] += 1;
        max_end = max_end.max(st.start + st.duration);
    }
    let end = steps.len();
    for (job, &done) in next_op.iter().enumerate() {
        if done != s.ops[job].len() {
            ctx.err(
                end,
                ErrorCode::Incomplete,
                format!("job {job} has {done} of {} operations scheduled", s.ops[job].len()),
            );
        }
    }
    if makespan != max_end {
        ctx.err(
            end,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared makespan {makespan} != replayed {max_end}"),
        );
    }
    ctx.objective = Some(max_end);
}

fn fssp(ctx: &mut Ctx, s: &ShopInstance, jobs: &[FsspJobTrace], makespan: i64) {
    let mut seen = vec![false; s.jobs];
    let mut machine_ready = vec![0i64; s.machines];
    let mut max_end = 0i64;
    let mut step = 0usize;
    for jt in jobs {
        if jt.job >= s.jobs {
            ctx.err(step, ErrorCode::UnknownJob, format!("job {} does not exist", jt.job + 1));
            step += jt.ops.len();
            continue;
        }
        if seen[jt.job] {
            ctx.err(step, ErrorCode::JobSequence, format!("job {} appears twice", jt.job + 1));
        }
        seen[jt.job] = true;
        if jt.ops.len() != s.machines
            || jt.ops.iter().enumerate().any(|(k, op)| op.machine != k)
        {
            ctx.err(
                step,
                ErrorCode::MachineOrder,
                format!("job {} must visit machines 1..{} in order", jt.job + 1, s.machines),
            );
            step += jt.ops.len();
            continue;
        }
        let mut job_ready = 0i64;
        for (k, op) in jt.ops.iter().enumerate() {
            let p = s.duration(jt.job, k);
            if op.duration != p {
                ctx.err(
                    step,
                    ErrorCode::DurationMismatch,
                    format!(
                        "job {} on machine {}: declared duration {} != instance {}",
                        jt.job + 1, k + 1, op.duration, p
                    ),
                );
            }
            if op.end != op.start + op.duration {
                ctx.err(
                    step,
                    ErrorCode::ArithmeticMismatch,
                    format!("{}+{}={} does not hold", op.start, op.duration, op.end),
                );
            }
            let ready = job_ready.max(machine_ready[k]);
            if op.start < ready {
                ctx.err(
                    step,
                    ErrorCode::ReadinessViolation,
                    format!("start {} precedes readiness {ready}", op.start),
                );
            }
            job_ready = op.start + op.duration;
            machine_ready[k] = op.start + op.duration;
            max_end = max_end.max(op.start + op.duration);
            step += 1;
        }
    }
    for (job, &v) in seen.iter().enumerate() {
        if !v {
            ctx.err(step, ErrorCode::Incomplete, format!("job {} missing", job + 1));
        }
    }
    if makespan != max_end {
        ctx.err(
            step,
            ErrorCode::DeclaredTotalMismatch,
            format!("declared makespan {makespan} != replayed {max_end}"),
        );
    }
    ctx.objective = Some(max_end);
}
