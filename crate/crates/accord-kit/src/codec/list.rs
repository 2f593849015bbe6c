//! The flat list-of-lists solution format: same payload as the stepwise
//! format but without per-step constraint annotations.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{CodecError, ProblemError};
use crate::problems::*;

use super::scan::Scanner;
use super::{ErrorCode, Status, StepError, ValidationReport};

/// Parsed list-format text with every declared number kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ListTrace {
    Knapsack {
        pairs: Vec<(i64, i64)>,
        value_terms: Vec<i64>,
        total_value: i64,
        weight_terms: Vec<i64>,
        total_weight: i64,
        bound: i64,
    },
    Binpack {
        declared_bins: i64,
        bins: Vec<Vec<usize>>,
    },
    Routing {
        #[serde(rename = "problem")]
        kind: ProblemKind,
        routes: Vec<Vec<super::RouteNode>>,
        total_distance: i64,
    },
    /// Job/machine/start/duration quadruples; shared by both shop problems
    /// (flow-shop labels are shifted to 0-based during parsing).
    Shop {
        #[serde(rename = "problem")]
        kind: ProblemKind,
        ops: Vec<ScheduledOp>,
        makespan: i64,
    },
}

impl ListTrace {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ListTrace::Knapsack { .. } => ProblemKind::Knapsack,
            ListTrace::Binpack { .. } => ProblemKind::Binpack,
            ListTrace::Routing { kind, .. } | ListTrace::Shop { kind, .. } => *kind,
        }
    }
}

pub fn render_list(instance: &ProblemInstance, solution: &Solution) -> Result<String, CodecError> {
    match (instance, &solution.body) {
        (ProblemInstance::Knapsack(k), SolutionBody::Picks(picks)) => Ok(knapsack(k, picks)),
        (ProblemInstance::BinPack(b), SolutionBody::Packing(bins)) => Ok(binpack(b, bins)),
        (ProblemInstance::Routing(r), SolutionBody::Tour(order)) if r.kind == ProblemKind::Tsp => {
            Ok(routing(r, &[super::render::normalize_tour(order)]))
        }
        (ProblemInstance::Routing(r), SolutionBody::Routes(routes)) if r.kind == ProblemKind::Vrp => {
            Ok(routing(r, routes))
        }
        (ProblemInstance::Shop(s), SolutionBody::Schedule(ops)) if s.kind == ProblemKind::Jssp => {
            Ok(shop(ops, 0))
        }
        (ProblemInstance::Shop(s), SolutionBody::Permutation(order)) if s.kind == ProblemKind::Fssp => {
            Ok(shop(&fssp_list_order(s, order), 1))
        }
        _ => Err(ProblemError::KindMismatch {
            expected: "matching solution variant",
            got: instance.kind(),
        }
        .into()),
    }
}

/// Flow-shop ops in list order: by start time, ties by the job's position in
/// the permutation, then by machine.
fn fssp_list_order(s: &ShopInstance, order: &[usize]) -> Vec<ScheduledOp> {
    let mut ops = fssp_schedule(s, order);
    let pos_of = |job: usize| order.iter().position(|&j| j == job).unwrap_or(usize::MAX);
    ops.sort_by_key(|op| (op.start, pos_of(op.job), op.machine));
    ops
}

fn knapsack(k: &KnapsackInstance, picks: &[usize]) -> String {
    let pairs: Vec<String> = picks
        .iter()
        .map(|&i| format!("({}, {})", k.items[i].value, k.items[i].weight))
        .collect();
    let sum_line = |take: fn(KnapsackItem) -> i64| {
        let terms: Vec<String> = picks.iter().map(|&i| take(k.items[i]).to_string()).collect();
        let total: i64 = picks.iter().map(|&i| take(k.items[i])).sum();
        if terms.is_empty() {
            total.to_string()
        } else {
            format!("{}={total}", terms.join("+"))
        }
    };
    format!(
        "Solution: [{}]\n  Value: {}\n  Weight: {}<={}",
        pairs.join(", "),
        sum_line(|it| it.value),
        sum_line(|it| it.weight),
        k.capacity
    )
}

fn binpack(_b: &BinPackInstance, bins: &[Vec<usize>]) -> String {
    let nonempty: Vec<String> = bins
        .iter()
        .filter(|bin| !bin.is_empty())
        .map(|bin| {
            let ids: Vec<String> = bin.iter().map(|id| id.to_string()).collect();
            format!("[{}]", ids.join(", "))
        })
        .collect();
    format!(
        "The minimum number of bins required is {}. The bin assignments are: [{}].",
        nonempty.len(),
        nonempty.join(", ")
    )
}

fn routing(r: &RoutingInstance, routes: &[Vec<usize>]) -> String {
    let depot = r.points[0];
    let mut out = String::new();
    let mut total = 0i64;
    for route in routes {
        let mut nodes = vec![format!("(0): ({}, {})", depot.x, depot.y)];
        let mut prev = depot;
        for &node in route {
            let p = r.points[node];
            total += truncated_euclidean(prev, p);
            nodes.push(format!("({node}): ({}, {})", p.x, p.y));
            prev = p;
        }
        total += truncated_euclidean(prev, depot);
        nodes.push(format!("(0): ({}, {})", depot.x, depot.y));
        let _ = writeln!(out, "[{}]", nodes.join(", "));
    }
    let _ = write!(out, "Overall Total Distance: {total}");
    out
}

fn shop(ops: &[ScheduledOp], label_base: usize) -> String {
    let mut makespan = 0i64;
    let quads: Vec<String> = ops
        .iter()
        .map(|op| {
            makespan = makespan.max(op.end());
            format!(
                "[{}, {}, {}, {}]",
                op.job + label_base,
                op.machine + label_base,
                op.start,
                op.duration
            )
        })
        .collect();
    format!(
        "[{}]\nMaximum end completion time or Makespan: {makespan}",
        quads.join(", ")
    )
}

pub fn parse_list(text: &str, kind: ProblemKind) -> Result<ListTrace, CodecError> {
    let mut s = Scanner::new(text);
    let trace = match kind {
        ProblemKind::Knapsack => parse_knapsack(&mut s)?,
        ProblemKind::Binpack => parse_binpack(&mut s)?,
        ProblemKind::Tsp | ProblemKind::Vrp => parse_routing(&mut s, kind)?,
        ProblemKind::Jssp => parse_shop(&mut s, kind, 0)?,
        ProblemKind::Fssp => parse_shop(&mut s, kind, 1)?,
    };
    if !s.at_end() {
        return Err(s.malformed("end of text"));
    }
    Ok(trace)
}

/// `a+b+...=total`, or a bare total when there are no terms.
fn sum_expr(s: &mut Scanner) -> Result<(Vec<i64>, i64), CodecError> {
    let first = s.uint()?;
    let mut terms = vec![first];
    while s.eat("+") {
        terms.push(s.uint()?);
    }
    if s.eat("=") {
        Ok((terms, s.uint()?))
    } else if terms.len() == 1 {
        Ok((Vec::new(), first))
    } else {
        Err(s.malformed("`=` after sum terms"))
    }
}

fn parse_knapsack(s: &mut Scanner) -> Result<ListTrace, CodecError> {
    s.expect("Solution:")?;
    s.expect("[")?;
    let mut pairs = Vec::new();
    if !s.eat("]") {
        loop {
            s.expect("(")?;
            let v = s.uint()?;
            s.expect(",")?;
            let w = s.uint()?;
            s.expect(")")?;
            pairs.push((v, w));
            if !s.eat(",") {
                break;
            }
        }
        s.expect("]")?;
    }
    s.expect("Value:")?;
    let (value_terms, total_value) = sum_expr(s)?;
    s.expect("Weight:")?;
    let (weight_terms, total_weight) = sum_expr(s)?;
    s.expect("<=")?;
    let bound = s.uint()?;
    Ok(ListTrace::Knapsack { pairs, value_terms, total_value, weight_terms, total_weight, bound })
}

fn parse_binpack(s: &mut Scanner) -> Result<ListTrace, CodecError> {
    s.expect("The minimum number of bins required is")?;
    let declared_bins = s.uint()?;
    s.expect(".")?;
    s.expect("The bin assignments are:")?;
    s.expect("[")?;
    let mut bins = Vec::new();
    if !s.eat("]") {
        loop {
            s.expect("[")?;
            let mut ids = Vec::new();
            if !s.eat("]") {
                loop {
                    ids.push(s.uindex()?);
                    if !s.eat(",") {
                        break;
                    }
                }
                s.expect("]")?;
            }
            bins.push(ids);
            if !s.eat(",") {
                break;
            }
        }
        s.expect("]")?;
    }
    s.expect(".")?;
    Ok(ListTrace::Binpack { declared_bins, bins })
}

fn parse_routing(s: &mut Scanner, kind: ProblemKind) -> Result<ListTrace, CodecError> {
    let mut routes = Vec::new();
    while s.eat("[") {
        let mut nodes = Vec::new();
        loop {
            s.expect("(")?;
            let id = s.uindex()?;
            s.expect(")")?;
            s.expect(":")?;
            s.expect("(")?;
            let x = s.uint()?;
            s.expect(",")?;
            let y = s.uint()?;
            s.expect(")")?;
            nodes.push(super::RouteNode { id, x, y });
            if !s.eat(",") {
                break;
            }
        }
        s.expect("]")?;
        if nodes.len() < 2 {
            return Err(s.malformed("route with at least depot start and end"));
        }
        routes.push(nodes);
    }
    s.expect("Overall Total Distance:")?;
    let total_distance = s.uint()?;
    Ok(ListTrace::Routing { kind, routes, total_distance })
}

fn parse_shop(s: &mut Scanner, kind: ProblemKind, label_base: usize) -> Result<ListTrace, CodecError> {
    s.expect("[")?;
    let mut ops = Vec::new();
    if !s.eat("]") {
        loop {
            s.expect("[")?;
            let job = s.uindex()?;
            s.expect(",")?;
            let machine = s.uindex()?;
            s.expect(",")?;
            let start = s.uint()?;
            s.expect(",")?;
            let duration = s.uint()?;
            s.expect("]")?;
            if job < label_base || machine < label_base {
                return Err(s.malformed("label >= 1"));
            }
            ops.push(ScheduledOp { job: job - label_base, machine: machine - label_base, start, duration });
            if !s.eat(",") {
                break;
            }
        }
        s.expect("]")?;
    }
    s.expect("Maximum end completion time or Makespan:")?;
    let makespan = s.uint()?;
    Ok(ListTrace::Shop { kind, ops, makespan })
}

pub fn validate_list(trace: &ListTrace, instance: &ProblemInstance) -> ValidationReport {
    if trace.kind() != instance.kind() {
        return ValidationReport {
            status: Status::Infeasible,
            errors: vec![StepError {
                step: 0,
                code: ErrorCode::KindMismatch,
                detail: format!("trace is {}, instance is {}", trace.kind(), instance.kind()),
            }],
            objective: None,
        };
    }
    let mut v = Validator::default();
    match (trace, instance) {
        (
            ListTrace::Knapsack { pairs, value_terms, total_value, weight_terms, total_weight, bound },
            ProblemInstance::Knapsack(k),
        ) => v.knapsack(k, pairs, value_terms, *total_value, weight_terms, *total_weight, *bound),
        (ListTrace::Binpack { declared_bins, bins }, ProblemInstance::BinPack(b)) => {
            v.binpack(b, *declared_bins, bins)
        }
        (ListTrace::Routing { routes, total_distance, .. }, ProblemInstance::Routing(r)) => {
            v.routing(r, routes, *total_distance)
        }
        (ListTrace::Shop { kind, ops, makespan }, ProblemInstance::Shop(s)) => {
            v.shop(s, *kind, ops, *makespan)
        }
        _ => unreachable!("kind equality checked above"),
    }
    v.finish()
}

#[derive(Default)]
struct Validator {
    errors: Vec<StepError>,
    objective: Option<i64>,
}

impl Validator {
    fn err(&mut self, step: usize, code: ErrorCode, detail: impl Into<String>) {
        self.errors.push(StepError { step, code, detail: detail.into() });
    }

    fn finish(self) -> ValidationReport {
        let status = if self.errors.is_empty() { Status::Feasible } else { Status::Infeasible };
        ValidationReport { status, errors: self.errors, objective: self.objective }
    }

    #[allow(clippy::too_many_arguments)]
    fn knapsack(
        &mut self,
        k: &KnapsackInstance,
        pairs: &[(i64, i64)],
        value_terms: &[i64],
        total_value: i64,
        weight_terms: &[i64],
        total_weight: i64,
        bound: i64,
    ) {
        let mut used = vec![false; k.items.len()];
        let mut value = 0i64;
        let mut weight = 0i64;
        for (i, &(v, w)) in pairs.iter().enumerate() {
            match k
                .items
                .iter()
                .enumerate()
                .position(|(idx, it)| !used[idx] && it.value == v && it.weight == w)
            {
                Some(idx) => used[idx] = true,
                None => {
                    let dup = k.items.iter().any(|it| it.value == v && it.weight == w);
                    let code = if dup { ErrorCode::DuplicateItem } else { ErrorCode::ItemMismatch };
                    self.err(i, code, format!("no unused item ({v}, {w})"));
                }
            }
            value += v;
            weight += w;
        }
        if value_terms.len() != pairs.len() {
            self.err(
                pairs.len(),
                ErrorCode::ArithmeticMismatch,
                format!("{} value terms for {} picks", value_terms.len(), pairs.len()),
            );
        }
        if weight_terms.len() != pairs.len() {
            self.err(
                pairs.len(),
                ErrorCode::ArithmeticMismatch,
                format!("{} weight terms for {} picks", weight_terms.len(), pairs.len()),
            );
        }
        for (i, (&term, &(v, _))) in value_terms.iter().zip(pairs).enumerate() {
            if term != v {
                self.err(i, ErrorCode::ArithmeticMismatch, format!("value term {term} != pick value {v}"));
            }
        }
        for (i, (&term, &(_, w))) in weight_terms.iter().zip(pairs).enumerate() {
            if term != w {
                self.err(i, ErrorCode::ArithmeticMismatch, format!("weight term {term} != pick weight {w}"));
            }
        }
        let end = pairs.len();
        if total_value != value {
            self.err(end, ErrorCode::DeclaredTotalMismatch, format!("declared value {total_value} != replayed {value}"));
        }
        if total_weight != weight {
            self.err(end, ErrorCode::DeclaredTotalMismatch, format!("declared weight {total_weight} != replayed {weight}"));
        }
        if bound != k.capacity {
            self.err(end, ErrorCode::BoundMismatch, format!("declared bound {bound} != capacity {}", k.capacity));
        }
        if weight > k.capacity {
            self.err(end, ErrorCode::CapacityViolation, format!("total weight {weight} > capacity {}", k.capacity));
        }
        self.objective = Some(value);
    }

    fn binpack(&mut self, b: &BinPackInstance, declared_bins: i64, bins: &[Vec<usize>]) {
        let mut used = vec![false; b.items.len()];
        let mut step = 0usize;
        for bin in bins {
            let mut load = 0i64;
            for &id in bin {
                match b.items.iter().position(|it| it.id == id) {
                    None => self.err(step, ErrorCode::ItemMismatch, format!("item {id} does not exist")),
                    Some(idx) => {
                        if used[idx] {
                            self.err(step, ErrorCode::DuplicateItem, format!("item {id} assigned twice"));
                        }
                        used[idx] = true;
                        load += b.items[idx].weight;
                    }
                }
                step += 1;
            }
            if load > b.capacity {
                self.err(step, ErrorCode::CapacityViolation, format!("bin load {load} > capacity {}", b.capacity));
            }
        }
        for (idx, &u) in used.iter().enumerate() {
            if !u {
                self.err(step, ErrorCode::Incomplete, format!("item {} never assigned", b.items[idx].id));
            }
        }
        if declared_bins != bins.len() as i64 {
            self.err(
                step,
                ErrorCode::DeclaredTotalMismatch,
                format!("declared bin count {declared_bins} != listed {}", bins.len()),
            );
        }
        self.objective = Some(bins.len() as i64);
    }

    fn routing(&mut self, r: &RoutingInstance, routes: &[Vec<super::RouteNode>], total_distance: i64) {
        if routes.len() > r.vehicle_count {
            self.err(0, ErrorCode::VehicleCount, format!("{} routes exceed {} vehicles", routes.len(), r.vehicle_count));
        }
        let mut visited = vec![false; r.points.len()];
        visited[0] = true;
        let mut total = 0i64;
        let mut step = 0usize;
        for route in routes {
            let mut load = 0i64;
            let mut prev: Option<super::RouteNode> = None;
            for (ni, node) in route.iter().enumerate() {
                let endpoint = ni == 0 || ni + 1 == route.len();
                if node.id >= r.points.len() {
                    self.err(step, ErrorCode::UnknownNode, format!("node {} does not exist", node.id));
                } else {
                    let p = r.points[node.id];
                    if p.x != node.x || p.y != node.y {
                        self.err(
                            step,
                            ErrorCode::CoordMismatch,
                            format!("node {} is at ({}, {}), declared ({}, {})", node.id, p.x, p.y, node.x, node.y),
                        );
                    }
                    if endpoint {
                        if node.id != 0 {
                            self.err(step, ErrorCode::DepotViolation, "route must start and end at the depot");
                        }
                    } else if node.id == 0 {
                        self.err(step, ErrorCode::DepotViolation, "depot revisited mid-route");
                    } else {
                        if visited[node.id] {
                            self.err(step, ErrorCode::DuplicateVisit, format!("customer {} visited more than once", node.id));
                        }
                        visited[node.id] = true;
                        load += r.demands[node.id];
                        if let Some(q) = r.capacity {
                            if load > q {
                                self.err(step, ErrorCode::CapacityViolation, format!("route load {load} > capacity {q}"));
                            }
                        }
                    }
                }
                if let Some(p) = prev {
                    total += truncated_euclidean(
                        Point { x: p.x, y: p.y },
                        Point { x: node.x, y: node.y },
                    );
                }
                prev = Some(*node);
                step += 1;
            }
        }
        for (node, &vis) in visited.iter().enumerate() {
            if !vis {
                self.err(step, ErrorCode::Incomplete, format!("customer {node} never visited"));
            }
        }
        if total_distance != total {
            self.err(
                step,
                ErrorCode::DeclaredTotalMismatch,
                format!("declared total distance {total_distance} != replayed {total}"),
            );
        }
        self.objective = Some(total);
    }

    fn shop(&mut self, s: &ShopInstance, kind: ProblemKind, ops: &[ScheduledOp], makespan: i64) {
        let base = if kind == ProblemKind::Fssp { 1 } else { 0 };
        let mut next_op = vec![0usize; s.jobs];
        let mut job_end = vec![0i64; s.jobs];
        let mut by_machine: Vec<Vec<(i64, i64)>> = vec![Vec::new(); s.machines];
        let mut max_end = 0i64;
        for (i, op) in ops.iter().enumerate() {
            if op.job >= s.jobs {
                self.err(i, ErrorCode::UnknownJob, format!("job {} does not exist", op.job + base));
                continue;
            }
            if op.machine >= s.machines {
                self.err(i, ErrorCode::UnknownMachine, format!("machine {} does not exist", op.machine + base));
                continue;
            }
            let k = next_op[op.job];
            if k >= s.ops[op.job].len() {
                self.err(i, ErrorCode::DuplicateOperation, format!("job {} has extra operations", op.job + base));
                continue;
            }
            let expected = s.ops[op.job][k];
            if expected.machine != op.machine {
                self.err(
                    i,
                    ErrorCode::MachineOrder,
                    format!(
                        "job {} operation {} belongs on machine {}, declared {}",
                        op.job + base,
                        k,
                        expected.machine + base,
                        op.machine + base
                    ),
                );
                continue;
            }
            if expected.duration != op.duration {
                self.err(
                    i,
                    ErrorCode::DurationMismatch,
                    format!(
                        "job {} on machine {}: declared duration {} != instance {}",
                        op.job + base, op.machine + base, op.duration, expected.duration
                    ),
                );
            }
            if k > 0 && op.start < job_end[op.job] {
                self.err(
                    i,
                    ErrorCode::ReadinessViolation,
                    format!("start {} precedes job readiness {}", op.start, job_end[op.job]),
                );
            }
            next_op[op.job] += 1;
            job_end[op.job] = op.end();
            by_machine[op.machine].push((op.start, op.end()));
            max_end = max_end.max(op.end());
        }
        let end = ops.len();
        for intervals in &mut by_machine {
            intervals.sort_unstable();
            for w in intervals.windows(2) {
                if w[1].0 < w[0].1 {
                    self.err(
                        end,
                        ErrorCode::ReadinessViolation,
                        format!("machine busy: [{}, {}) overlaps [{}, {})", w[0].0, w[0].1, w[1].0, w[1].1),
                    );
                }
            }
        }
        for (job, &done) in next_op.iter().enumerate() {
            if done != s.ops[job].len() {
                self.err(
                    end,
                    ErrorCode::Incomplete,
                    format!("job {} has {done} of {} operations scheduled", job + base, s.ops[job].len()),
                );
            }
        }
        if kind == ProblemKind::Fssp {
            // A flow-shop schedule must process jobs in the same order on
            // every machine.
            let mut orders: Vec<Vec<usize>> = Vec::new();
            for m in 0..s.machines {
                let mut jobs: Vec<(i64, usize)> =
                    ops.iter().filter(|op| op.machine == m).map(|op| (op.start, op.job)).collect();
                jobs.sort_unstable();
                orders.push(jobs.into_iter().map(|(_, j)| j).collect());
            }
            if orders.windows(2).any(|w| w[0] != w[1]) {
                self.err(end, ErrorCode::JobSequence, "job order differs across machines");
            }
        }
        if makespan != max_end {
            self.err(
                end,
                ErrorCode::DeclaredTotalMismatch,
                format!("declared makespan {makespan} != replayed {max_end}"),
            );
        }
        self.objective = Some(max_end);
    }
}
