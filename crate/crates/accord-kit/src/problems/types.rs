use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::ProblemError;

/// The six supported problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Tsp,
    Vrp,
    Knapsack,
    Binpack,
    Jssp,
    Fssp,
}

/// Optimization sense. Knapsack maximizes value, everything else minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::Tsp,
        ProblemKind::Vrp,
        ProblemKind::Knapsack,
        ProblemKind::Binpack,
        ProblemKind::Jssp,
        ProblemKind::Fssp,
    ];

    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::Knapsack => Sense::Max,
            _ => Sense::Min,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Tsp => "tsp",
            ProblemKind::Vrp => "vrp",
            ProblemKind::Knapsack => "knapsack",
            ProblemKind::Binpack => "binpack",
            ProblemKind::Jssp => "jssp",
            ProblemKind::Fssp => "fssp",
        }
    }

    /// Stable class index used by the router head.
    pub fn class_index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsp" => Ok(ProblemKind::Tsp),
            "vrp" => Ok(ProblemKind::Vrp),
            "knapsack" => Ok(ProblemKind::Knapsack),
            "binpack" | "bin_pack" | "bpp" => Ok(ProblemKind::Binpack),
            "jssp" => Ok(ProblemKind::Jssp),
            "fssp" => Ok(ProblemKind::Fssp),
            other => Err(ProblemError::UnknownProblem(other.to_string())),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Integer grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Point { x, y }
    }
}

impl From<Point> for (i64, i64) {
    fn from(p: Point) -> Self {
        (p.x, p.y)
    }
}

/// TSP/VRP instance. Node 0 is the depot. TSP is the single-vehicle,
/// uncapacitated case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingInstance {
    pub kind: ProblemKind,
    pub points: Vec<Point>,
    pub demands: Vec<i64>,
    pub vehicle_count: usize,
    pub capacity: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct KnapsackItem {
    pub value: i64,
    pub weight: i64,
}

impl From<(i64, i64)> for KnapsackItem {
    fn from((value, weight): (i64, i64)) -> Self {
        KnapsackItem { value, weight }
    }
}

impl From<KnapsackItem> for (i64, i64) {
    fn from(it: KnapsackItem) -> Self {
        (it.value, it.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    pub items: Vec<KnapsackItem>,
    pub capacity: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, i64)", into = "(usize, i64)")]
pub struct BinItem {
    pub id: usize,
    pub weight: i64,
}

impl From<(usize, i64)> for BinItem {
    fn from((id, weight): (usize, i64)) -> Self {
        BinItem { id, weight }
    }
}

impl From<BinItem> for (usize, i64) {
    fn from(it: BinItem) -> Self {
        (it.id, it.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPackInstance {
    pub items: Vec<BinItem>,
    pub capacity: i64,
}

/// One operation of a shop-scheduling job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, i64)", into = "(usize, i64)")]
pub struct ShopOp {
    pub machine: usize,
    pub duration: i64,
}

impl From<(usize, i64)> for ShopOp {
    fn from((machine, duration): (usize, i64)) -> Self {
        ShopOp { machine, duration }
    }
}

impl From<ShopOp> for (usize, i64) {
    fn from(op: ShopOp) -> Self {
        (op.machine, op.duration)
    }
}

/// JSSP or permutation-flow-shop instance. For FSSP every job visits
/// machines 0..m in the same order, so `ops[j][k].machine == k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShopInstance {
    pub kind: ProblemKind,
    pub jobs: usize,
    pub machines: usize,
    pub ops: Vec<Vec<ShopOp>>,
}

impl ShopInstance {
    /// Builds a permutation flow shop from an n x m duration matrix.
    pub fn flow_shop(durations: Vec<Vec<i64>>) -> Self {
        let jobs = durations.len();
        let machines = durations.first().map_or(0, |r| r.len());
        let ops = durations
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .map(|(k, d)| ShopOp { machine: k, duration: d })
                    .collect()
            })
            .collect();
        ShopInstance { kind: ProblemKind::Fssp, jobs, machines, ops }
    }

    /// FSSP duration of job `j` on machine `k`.
    pub fn duration(&self, job: usize, machine: usize) -> i64 {
        self.ops[job][machine].duration
    }

    pub fn total_ops(&self) -> usize {
        self.ops.iter().map(|j| j.len()).sum()
    }
}

/// Tagged union over the six problem kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemInstance {
    Routing(RoutingInstance),
    Knapsack(KnapsackInstance),
    BinPack(BinPackInstance),
    Shop(ShopInstance),
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::Routing(r) => r.kind,
            ProblemInstance::Knapsack(_) => ProblemKind::Knapsack,
            ProblemInstance::BinPack(_) => ProblemKind::Binpack,
            ProblemInstance::Shop(s) => s.kind,
        }
    }

    pub fn as_routing(&self) -> Result<&RoutingInstance, ProblemError> {
        match self {
            ProblemInstance::Routing(r) => Ok(r),
            _ => Err(ProblemError::KindMismatch { expected: "tsp/vrp", got: self.kind() }),
        }
    }

    pub fn as_knapsack(&self) -> Result<&KnapsackInstance, ProblemError> {
        match self {
            ProblemInstance::Knapsack(k) => Ok(k),
            _ => Err(ProblemError::KindMismatch { expected: "knapsack", got: self.kind() }),
        }
    }

    pub fn as_binpack(&self) -> Result<&BinPackInstance, ProblemError> {
        match self {
            ProblemInstance::BinPack(b) => Ok(b),
            _ => Err(ProblemError::KindMismatch { expected: "binpack", got: self.kind() }),
        }
    }

    pub fn as_shop(&self) -> Result<&ShopInstance, ProblemError> {
        match self {
            ProblemInstance::Shop(s) => Ok(s),
            _ => Err(ProblemError::KindMismatch { expected: "jssp/fssp", got: self.kind() }),
        }
    }
}

/// Flat JSON shape shared by all instance kinds. Field names are the
/// canonical wire schema used everywhere in the toolkit.
#[derive(Serialize, Deserialize)]
struct RawInstance {
    problem: ProblemKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Point>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    demands: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vehicle_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    items: Option<Vec<(i64, i64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    machines: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ops: Option<Vec<Vec<(usize, i64)>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    durations: Option<Vec<Vec<i64>>>,
}

impl Serialize for ProblemInstance {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut raw = RawInstance {
            problem: self.kind(),
            points: None,
            demands: None,
            vehicle_count: None,
            capacity: None,
            items: None,
            jobs: None,
            machines: None,
            ops: None,
            durations: None,
        };
        match self {
            ProblemInstance::Routing(r) => {
                raw.points = Some(r.points.clone());
                raw.demands = Some(r.demands.clone());
                raw.vehicle_count = Some(r.vehicle_count);
                raw.capacity = r.capacity;
            }
            ProblemInstance::Knapsack(k) => {
                raw.items = Some(k.items.iter().map(|&i| i.into()).collect());
                raw.capacity = Some(k.capacity);
            }
            ProblemInstance::BinPack(b) => {
                raw.items = Some(b.items.iter().map(|i| (i.id as i64, i.weight)).collect());
                raw.capacity = Some(b.capacity);
            }
            ProblemInstance::Shop(s) => {
                raw.jobs = Some(s.jobs);
                raw.machines = Some(s.machines);
                if s.kind == ProblemKind::Jssp {
                    raw.ops = Some(
                        s.ops
                            .iter()
                            .map(|job| job.iter().map(|&op| op.into()).collect())
                            .collect(),
                    );
                } else {
                    raw.durations = Some(
                        s.ops
                            .iter()
                            .map(|job| job.iter().map(|op| op.duration).collect())
                            .collect(),
                    );
                }
            }
        }
        raw.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ProblemInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(de)?;
        let missing = |f: &str| D::Error::custom(format!("missing field `{f}`"));
        match raw.problem {
            ProblemKind::Tsp | ProblemKind::Vrp => {
                let points = raw.points.ok_or_else(|| missing("points"))?;
                let demands = raw.demands.unwrap_or_else(|| vec![0; points.len()]);
                let vehicle_count = raw
                    .vehicle_count
                    .unwrap_or(if raw.problem == ProblemKind::Tsp { 1 } else { 0 });
                if demands.len() != points.len() {
                    return Err(D::Error::custom("demands length must match points"));
                }
                Ok(ProblemInstance::Routing(RoutingInstance {
                    kind: raw.problem,
                    points,
                    demands,
                    vehicle_count,
                    capacity: raw.capacity,
                }))
            }
            ProblemKind::Knapsack => Ok(ProblemInstance::Knapsack(KnapsackInstance {
                items: raw
                    .items
                    .ok_or_else(|| missing("items"))?
                    .into_iter()
                    .map(KnapsackItem::from)
                    .collect(),
                capacity: raw.capacity.ok_or_else(|| missing("capacity"))?,
            })),
            ProblemKind::Binpack => Ok(ProblemInstance::BinPack(BinPackInstance {
                items: raw
                    .items
                    .ok_or_else(|| missing("items"))?
                    .into_iter()
                    .map(|(id, w)| BinItem { id: id as usize, weight: w })
                    .collect(),
                capacity: raw.capacity.ok_or_else(|| missing("capacity"))?,
            })),
            ProblemKind::Jssp => {
                let ops: Vec<Vec<ShopOp>> = raw
                    .ops
                    .ok_or_else(|| missing("ops"))?
                    .into_iter()
                    .map(|job| job.into_iter().map(ShopOp::from).collect())
                    .collect();
                let jobs = raw.jobs.unwrap_or(ops.len());
                let machines = raw
                    .machines
                    .or_else(|| {
                        ops.iter()
                            .flat_map(|j| j.iter().map(|o| o.machine + 1))
                            .max()
                    })
                    .ok_or_else(|| missing("machines"))?;
                Ok(ProblemInstance::Shop(ShopInstance {
                    kind: ProblemKind::Jssp,
                    jobs,
                    machines,
                    ops,
                }))
            }
            ProblemKind::Fssp => {
                let durations = raw.durations.ok_or_else(|| missing("durations"))?;
                Ok(ProblemInstance::Shop(ShopInstance::flow_shop(durations)))
            }
        }
    }
}

/// One scheduled operation: (job, machine, start, duration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, i64, i64)", into = "(usize, usize, i64, i64)")]
pub struct ScheduledOp {
    pub job: usize,
    pub machine: usize,
    pub start: i64,
    pub duration: i64,
}

impl ScheduledOp {
    pub fn end(&self) -> i64 {
        self.start + self.duration
    }
}

impl From<(usize, usize, i64, i64)> for ScheduledOp {
    fn from((job, machine, start, duration): (usize, usize, i64, i64)) -> Self {
        ScheduledOp { job, machine, start, duration }
    }
}

impl From<ScheduledOp> for (usize, usize, i64, i64) {
    fn from(op: ScheduledOp) -> Self {
        (op.job, op.machine, op.start, op.duration)
    }
}

/// Problem-specific solution structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionBody {
    /// Visit order for TSP, starting at the depot; the return leg is implicit.
    Tour(Vec<usize>),
    /// Per-vehicle customer sequences (depot endpoints implicit).
    Routes(Vec<Vec<usize>>),
    /// Picked knapsack item indices.
    Picks(Vec<usize>),
    /// Bins of item ids.
    Packing(Vec<Vec<usize>>),
    /// JSSP schedule.
    Schedule(Vec<ScheduledOp>),
    /// FSSP job permutation.
    Permutation(Vec<usize>),
}

/// A solution together with its declared objective value. The objective is
/// always re-derivable from the structure; `objective_value` never trusts it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    #[serde(rename = "solution")]
    pub body: SolutionBody,
    pub objective: i64,
}

/// Outcome of a ground-truth feasibility check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl FeasibilityVerdict {
    pub fn feasible() -> Self {
        FeasibilityVerdict { feasible: true, violations: Vec::new() }
    }

    pub fn from_violations(violations: Vec<Violation>) -> Self {
        FeasibilityVerdict { feasible: violations.is_empty(), violations }
    }
}

pub(crate) fn violation(constraint: &str, detail: impl Into<String>) -> Violation {
    Violation { constraint: constraint.to_string(), detail: detail.into() }
}
