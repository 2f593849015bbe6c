use crate::error::CodecError;
use crate::problems::ProblemKind;

use super::scan::Scanner;
use super::*;

/// Parses stepwise solution text into a trace, preserving every declared
/// number verbatim. Whitespace (including line breaks) between tokens is
/// flexible; token structure is strict.
pub fn parse_accord(text: &str, kind: ProblemKind) -> Result<AccordTrace, CodecError> {
    let mut s = Scanner::new(text);
    let trace = match kind {
        ProblemKind::Knapsack => knapsack(&mut s)?,
        ProblemKind::Binpack => binpack(&mut s)?,
        ProblemKind::Tsp | ProblemKind::Vrp => routing(&mut s, kind)?,
        ProblemKind::Jssp => jssp(&mut s)?,
        ProblemKind::Fssp => fssp(&mut s)?,
    };
    if !s.at_end() {
        return Err(s.malformed("end of text"));
    }
    Ok(trace)
}

fn knapsack(s: &mut Scanner) -> Result<AccordTrace, CodecError> {
    s.expect("Solution:")?;
    let mut steps = Vec::new();
    while s.eat("[[") {
        let value = s.uint()?;
        s.expect(",")?;
        let weight = s.uint()?;
        s.expect("]")?;
        s.expect("->")?;
        s.expect("value:")?;
        let prev_value = s.uint()?;
        s.expect("+")?;
        let add_value = s.uint()?;
        s.expect("=")?;
        let new_value = s.uint()?;
        s.expect(",")?;
        s.expect("weight:")?;
        let prev_weight = s.uint()?;
        s.expect("+")?;
        let add_weight = s.uint()?;
        s.expect("=")?;
        let new_weight = s.uint()?;
        s.expect("<=")?;
        let bound = s.uint()?;
        s.expect("]")?;
        s.eat_comma();
        steps.push(KnapsackStep {
            value,
            weight,
            add_value,
            add_weight,
            prev_value,
            new_value,
            prev_weight,
            new_weight,
            bound,
        });
    }
    s.expect("Total Value:")?;
    let total_value = s.uint()?;
    s.expect("Total Weight:")?;
    let total_weight = s.uint()?;
    s.expect("<=")?;
    let total_bound = s.uint()?;
    Ok(AccordTrace::Knapsack { steps, total_value, total_weight, total_bound })
}

fn binpack(s: &mut Scanner) -> Result<AccordTrace, CodecError> {
    let mut bins = Vec::new();
    while s.eat("Bin") {
        let label = s.uint()?;
        s.expect(":")?;
        let mut items = Vec::new();
        while s.eat("(") {
            let id = s.uindex()?;
            s.expect(",")?;
            let weight = s.uint()?;
            s.expect(")")?;
            s.expect("->")?;
            let cumulative = s.uint()?;
            let bound = if s.eat("<=") { Some(s.uint()?) } else { None };
            items.push(BinStep { id, weight, cumulative, bound });
        }
        if items.is_empty() {
            return Err(s.malformed("at least one `(id, weight)` item in bin"));
        }
        if items.last().unwrap().bound.is_none() {
            return Err(s.malformed("`<=capacity` after the bin's final item"));
        }
        bins.push(BinTrace { label, items });
    }
    s.expect("Total bins required:")?;
    let total_bins = s.uint()?;
    Ok(AccordTrace::Binpack { bins, total_bins })
}

fn route_node(s: &mut Scanner) -> Result<RouteNode, CodecError> {
    s.expect("(")?;
    let id = s.uindex()?;
    s.expect(")")?;
    s.expect(":")?;
    s.expect("(")?;
    let x = s.uint()?;
    s.expect(",")?;
    let y = s.uint()?;
    s.expect(")")?;
    Ok(RouteNode { id, x, y })
}

fn routing(s: &mut Scanner, kind: ProblemKind) -> Result<AccordTrace, CodecError> {
    let mut routes = Vec::new();
    while s.eat("Vehicle Route:") {
        let start = route_node(s)?;
        let mut legs = Vec::new();
        while s.eat("->") {
            let node = route_node(s)?;
            s.expect("+")?;
            let distance = s.uint()?;
            legs.push(RouteLeg { node, distance });
        }
        if legs.is_empty() {
            return Err(s.malformed("`->` leg after route start"));
        }
        routes.push(RouteTrace { start, legs });
    }
    s.expect("Overall Total Distance:")?;
    let total_distance = s.uint()?;
    Ok(AccordTrace::Routing { kind, routes, total_distance })
}

fn jssp(s: &mut Scanner) -> Result<AccordTrace, CodecError> {
    s.expect("Solution:")?;
    let mut steps = Vec::new();
    while s.eat("J") {
        let job = s.uindex()?;
        s.expect("-")?;
        s.expect("M")?;
        let machine = s.uindex()?;
        s.expect(":")?;
        let start = s.uint()?;
        s.expect("+")?;
        let duration = s.uint()?;
        s.expect("->")?;
        let end = s.uint()?;
        s.eat_comma();
        steps.push(JsspStep { job, machine, start, duration, end });
    }
    s.expect("Maximum end completion time or Makespan:")?;
    let makespan = s.uint()?;
    Ok(AccordTrace::Jssp { steps, makespan })
}

fn fssp(s: &mut Scanner) -> Result<AccordTrace, CodecError> {
    let mut jobs = Vec::new();
    loop {
        if s.peek("Maximum") || s.at_end() {
            break;
        }
        s.expect("J")?;
        // 1-based labels on the wire, 0-based internally.
        let label = s.uindex()?;
        if label == 0 {
            return Err(s.malformed("job label >= 1"));
        }
        s.expect(":")?;
        let mut ops = Vec::new();
        loop {
            s.expect("M")?;
            let mlabel = s.uindex()?;
            if mlabel == 0 {
                return Err(s.malformed("machine label >= 1"));
            }
            s.expect("(")?;
            let start = s.uint()?;
            s.expect("+")?;
            let duration = s.uint()?;
            s.expect("=")?;
            let end = s.uint()?;
            s.expect(")")?;
            ops.push(FsspOp { machine: mlabel - 1, start, duration, end });
            if !s.eat("->") {
                break;
            }
        }
        jobs.push(FsspJobTrace { job: label - 1, ops });
    }
    s.expect("Maximum end completion time or Makespan:")?;
    let makespan = s.uint()?;
    Ok(AccordTrace::Fssp { jobs, makespan })
}
