//! Rendering, parsing, and incremental feasibility validation of the two
//! solution text formats: the constraint-annotated stepwise format (every
//! step carries explicit running totals and bound checks) and the flat
//! list-of-lists ablation format. Renderers emit one canonical byte sequence
//! per solution; parsers tolerate flexible whitespace but are strict about
//! token structure; validators replay every declared number against the
//! instance.

mod list;
mod parse;
mod render;
mod scan;
mod validate;

use serde::{Deserialize, Serialize};

pub use list::{parse_list, render_list, validate_list, ListTrace};
pub use parse::parse_accord;
pub use render::render_accord;
pub use validate::validate_trace;

use crate::problems::ProblemKind;

/// One knapsack step with all declared running totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackStep {
    /// The `[value, weight]` pair naming the picked item.
    pub value: i64,
    pub weight: i64,
    /// Declared addends of the running-total updates; must equal the pair.
    pub add_value: i64,
    pub add_weight: i64,
    pub prev_value: i64,
    pub new_value: i64,
    pub prev_weight: i64,
    pub new_weight: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinStep {
    pub id: usize,
    pub weight: i64,
    pub cumulative: i64,
    /// Declared capacity bound; present at least on a bin's final item.
    pub bound: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinTrace {
    pub label: i64,
    pub items: Vec<BinStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteNode {
    pub id: usize,
    pub x: i64,
    pub y: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteLeg {
    pub node: RouteNode,
    pub distance: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteTrace {
    pub start: RouteNode,
    pub legs: Vec<RouteLeg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsspStep {
    pub job: usize,
    pub machine: usize,
    pub start: i64,
    pub duration: i64,
    pub end: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsspOp {
    pub machine: usize,
    pub start: i64,
    pub duration: i64,
    pub end: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsspJobTrace {
    pub job: usize,
    pub ops: Vec<FsspOp>,
}

/// Which of the two text formats a candidate text is expected to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionFormat {
    #[default]
    Accord,
    List,
}

impl std::str::FromStr for SolutionFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accord" => Ok(SolutionFormat::Accord),
            "list" => Ok(SolutionFormat::List),
            other => Err(format!("unknown format `{other}` (accord|list)")),
        }
    }
}

impl std::fmt::Display for SolutionFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolutionFormat::Accord => "accord",
            SolutionFormat::List => "list",
        })
    }
}

/// Parses and validates one candidate text in the given format. Parse errors
/// become a `Malformed` report instead of an error.
pub fn validate_text(
    text: &str,
    instance: &crate::problems::ProblemInstance,
    format: SolutionFormat,
) -> ValidationReport {
    match format {
        SolutionFormat::Accord => match parse_accord(text, instance.kind()) {
            Ok(trace) => validate_trace(&trace, instance),
            Err(e) => ValidationReport::malformed(&e),
        },
        SolutionFormat::List => match parse_list(text, instance.kind()) {
            Ok(trace) => validate_list(&trace, instance),
            Err(e) => ValidationReport::malformed(&e),
        },
    }
}

/// Parsed stepwise solution text. Declared numbers are stored verbatim as
/// parsed; nothing is normalized before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AccordTrace {
    Knapsack {
        steps: Vec<KnapsackStep>,
        total_value: i64,
        total_weight: i64,
        total_bound: i64,
    },
    Binpack {
        bins: Vec<BinTrace>,
        total_bins: i64,
    },
    Routing {
        #[serde(rename = "problem")]
        kind: ProblemKind,
        routes: Vec<RouteTrace>,
        total_distance: i64,
    },
    Jssp {
        steps: Vec<JsspStep>,
        makespan: i64,
    },
    Fssp {
        jobs: Vec<FsspJobTrace>,
        makespan: i64,
    },
}

impl AccordTrace {
    pub fn kind(&self) -> ProblemKind {
        match self {
            AccordTrace::Knapsack { .. } => ProblemKind::Knapsack,
            AccordTrace::Binpack { .. } => ProblemKind::Binpack,
            AccordTrace::Routing { kind, .. } => *kind,
            AccordTrace::Jssp { .. } => ProblemKind::Jssp,
            AccordTrace::Fssp { .. } => ProblemKind::Fssp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    Infeasible,
    Malformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    ArithmeticMismatch,
    BoundMismatch,
    CapacityViolation,
    ItemMismatch,
    DuplicateItem,
    BinLabel,
    UnknownNode,
    CoordMismatch,
    DistanceMismatch,
    DuplicateVisit,
    DepotViolation,
    VehicleCount,
    UnknownJob,
    UnknownMachine,
    MachineOrder,
    DurationMismatch,
    ReadinessViolation,
    DuplicateOperation,
    JobSequence,
    Incomplete,
    DeclaredTotalMismatch,
    KindMismatch,
    ParseError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepError {
    /// Step index within the trace (0-based); usize::MAX-free: totals and
    /// end-of-trace findings use the step count.
    pub step: usize,
    pub code: ErrorCode,
    pub detail: String,
}

/// Result of validating one candidate text against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub status: Status,
    pub errors: Vec<StepError>,
    pub objective: Option<i64>,
}

impl ValidationReport {
    pub fn feasible(objective: i64) -> Self {
        ValidationReport { status: Status::Feasible, errors: Vec::new(), objective: Some(objective) }
    }

    pub fn malformed(err: &crate::error::CodecError) -> Self {
        ValidationReport {
            status: Status::Malformed,
            errors: vec![StepError {
                step: 0,
                code: ErrorCode::ParseError,
                detail: err.to_string(),
            }],
            objective: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn stepwise_round_trip_is_feasible_for_all_samples() {
        for (instance, solution) in samples::all() {
            let text = render_accord(&instance, &solution).unwrap();
            let trace = parse_accord(&text, instance.kind()).unwrap();
            let report = validate_trace(&trace, &instance);
            assert!(
                report.is_feasible(),
                "{}: {:?}",
                instance.kind(),
                report.errors
            );
            assert_eq!(report.objective, Some(solution.objective));
            // Rendering is canonical: a reparse of the render reproduces it.
            assert_eq!(render_accord(&instance, &solution).unwrap(), text);
        }
    }

    #[test]
    fn list_round_trip_is_feasible_for_all_samples() {
        for (instance, solution) in samples::all() {
            let text = render_list(&instance, &solution).unwrap();
            let trace = parse_list(&text, instance.kind()).unwrap();
            let report = validate_list(&trace, &instance);
            assert!(
                report.is_feasible(),
                "{}: {:?}",
                instance.kind(),
                report.errors
            );
            assert_eq!(report.objective, Some(solution.objective));
        }
    }

    #[test]
    fn trailing_garbage_is_malformed() {
        for (instance, solution) in samples::all() {
            let mut text = render_accord(&instance, &solution).unwrap();
            text.push_str(" extra");
            assert!(parse_accord(&text, instance.kind()).is_err(), "{}", instance.kind());
        }
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let (knap, sol) = samples::all().remove(0);
        let text = render_accord(&knap, &sol).unwrap();
        let trace = parse_accord(&text, knap.kind()).unwrap();
        let (other, _) = samples::all().remove(1);
        let report = validate_trace(&trace, &other);
        assert_eq!(report.status, Status::Infeasible);
        assert_eq!(report.errors[0].code, ErrorCode::KindMismatch);
    }
}
