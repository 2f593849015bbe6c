use std::fmt::Write as _;

use crate::error::{CodecError, ProblemError};
use crate::problems::*;

/// Renders the stepwise constraint-annotated text for a solution. The output
/// is canonical: one fixed byte sequence per (instance, solution) pair.
/// Rendering an infeasible solution is permitted (useful for negative tests);
/// the validator is the authority on feasibility.
pub fn render_accord(instance: &ProblemInstance, solution: &Solution) -> Result<String, CodecError> {
    match (instance, &solution.body) {
        (ProblemInstance::Knapsack(k), SolutionBody::Picks(picks)) => Ok(knapsack(k, picks)),
        (ProblemInstance::BinPack(b), SolutionBody::Packing(bins)) => Ok(binpack(b, bins)),
        (ProblemInstance::Routing(r), SolutionBody::Tour(order)) if r.kind == ProblemKind::Tsp => {
            Ok(routing(r, &[normalize_tour(order)]))
        }
        (ProblemInstance::Routing(r), SolutionBody::Routes(routes)) if r.kind == ProblemKind::Vrp => {
            Ok(routing(r, routes))
        }
        (ProblemInstance::Shop(s), SolutionBody::Schedule(ops)) if s.kind == ProblemKind::Jssp => {
            Ok(jssp(ops))
        }
        (ProblemInstance::Shop(s), SolutionBody::Permutation(order)) if s.kind == ProblemKind::Fssp => {
            Ok(fssp(s, order))
        }
        _ => Err(ProblemError::KindMismatch {
            expected: "matching solution variant",
            got: instance.kind(),
        }
        .into()),
    }
}

/// Rotates a tour to start at the depot and drops that leading depot, leaving
/// just the customer visit order (routes implicitly start and end at node 0).
pub(super) fn normalize_tour(order: &[usize]) -> Vec<usize> {
    match order.iter().position(|&n| n == 0) {
        Some(i) => order[i + 1..].iter().chain(&order[..i]).copied().collect(),
        None => order.to_vec(),
    }
}

fn knapsack(k: &KnapsackInstance, picks: &[usize]) -> String {
    let mut out = String::from("Solution:\n");
    let mut value = 0i64;
    let mut weight = 0i64;
    for (i, &idx) in picks.iter().enumerate() {
        let item = k.items[idx];
        let sep = if i + 1 == picks.len() { "" } else { "," };
        let _ = writeln!(
            out,
            "[[{}, {}] -> value:{}+{}={}, weight:{}+{}={}<={}]{}",
            item.value,
            item.weight,
            value,
            item.value,
            value + item.value,
            weight,
            item.weight,
            weight + item.weight,
            k.capacity,
            sep
        );
        value += item.value;
        weight += item.weight;
    }
    let _ = write!(
        out,
        "\nTotal Value: {value}\nTotal Weight: {weight}<={}",
        k.capacity
    );
    out
}

fn binpack(b: &BinPackInstance, bins: &[Vec<usize>]) -> String {
    let weight_of = |id: usize| {
        b.items
            .iter()
            .find(|it| it.id == id)
            .map_or(0, |it| it.weight)
    };
    let mut out = String::new();
    let nonempty: Vec<&Vec<usize>> = bins.iter().filter(|bin| !bin.is_empty()).collect();
    for (bi, bin) in nonempty.iter().enumerate() {
        let _ = writeln!(out, "Bin {}:", bi + 1);
        let mut load = 0i64;
        for (ii, &id) in bin.iter().enumerate() {
            let w = weight_of(id);
            load += w;
            let _ = write!(out, "({id}, {w})->{load}");
            if ii + 1 == bin.len() {
                let _ = write!(out, "<={}", b.capacity);
            } else {
                out.push(' ');
            }
        }
        out.push('\n');
    }
    let _ = write!(out, "Total bins required: {}", nonempty.len());
    out
}

fn routing(r: &RoutingInstance, routes: &[Vec<usize>]) -> String {
    let depot = r.points[0];
    let mut out = String::new();
    let mut total = 0i64;
    for route in routes {
        let _ = write!(out, "Vehicle Route: (0): ({}, {})", depot.x, depot.y);
        let mut prev = depot;
        for &node in route {
            let p = r.points[node];
            let d = truncated_euclidean(prev, p);
            total += d;
            let _ = write!(out, " -> ({node}): ({}, {}) + {d}", p.x, p.y);
            prev = p;
        }
        let d = truncated_euclidean(prev, depot);
        total += d;
        let _ = writeln!(out, " -> (0): ({}, {}) + {d}", depot.x, depot.y);
    }
    let _ = write!(out, "Overall Total Distance: {total}");
    out
}

fn jssp(ops: &[ScheduledOp]) -> String {
    let mut out = String::from("Solution:\n");
    let mut makespan = 0i64;
    for op in ops {
        makespan = makespan.max(op.end());
        let _ = writeln!(
            out,
            "J{}-M{}: {}+{} -> {},",
            op.job,
            op.machine,
            op.start,
            op.duration,
            op.end()
        );
    }
    let _ = write!(out, "Maximum end completion time or Makespan: {makespan}");
    out
}

fn fssp(s: &ShopInstance, order: &[usize]) -> String {
    let schedule = fssp_schedule(s, order);
    let mut out = String::new();
    let mut makespan = 0i64;
    // Job and machine labels are 1-based in this format.
    for (pos, &job) in order.iter().enumerate() {
        let _ = write!(out, "J{}:", job + 1);
        for k in 0..s.machines {
            let op = schedule[pos * s.machines + k];
            makespan = makespan.max(op.end());
            if k > 0 {
                let _ = write!(out, " ->");
            }
            let _ = write!(out, " M{}({}+{}={})", k + 1, op.start, op.duration, op.end());
        }
        out.push('\n');
    }
    let _ = write!(out, "\nMaximum end completion time or Makespan: {makespan}");
    out
}
