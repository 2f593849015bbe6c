//! Small worked examples used across tests, docs, and CLI demos.

use crate::problems::*;

pub fn knapsack_instance() -> ProblemInstance {
    ProblemInstance::Knapsack(KnapsackInstance {
        items: vec![
            KnapsackItem { value: 6, weight: 5 },
            KnapsackItem { value: 10, weight: 8 },
            KnapsackItem { value: 7, weight: 4 },
            KnapsackItem { value: 6, weight: 2 },
            KnapsackItem { value: 1, weight: 1 },
        ],
        capacity: 20,
    })
}

pub fn knapsack_solution() -> Solution {
    Solution { body: SolutionBody::Picks(vec![0, 1, 2, 3, 4]), objective: 30 }
}

pub fn binpack_instance() -> ProblemInstance {
    ProblemInstance::BinPack(BinPackInstance {
        items: vec![
            BinItem { id: 0, weight: 17 },
            BinItem { id: 1, weight: 24 },
            BinItem { id: 2, weight: 19 },
            BinItem { id: 3, weight: 11 },
            BinItem { id: 4, weight: 27 },
        ],
        capacity: 77,
    })
}

pub fn binpack_solution() -> Solution {
    Solution {
        body: SolutionBody::Packing(vec![vec![0, 1, 2, 3], vec![4]]),
        objective: 2,
    }
}

pub fn tsp_instance() -> ProblemInstance {
    ProblemInstance::Routing(RoutingInstance {
        kind: ProblemKind::Tsp,
        points: vec![
            Point { x: 17, y: 22 },
            Point { x: 63, y: 8 },
            Point { x: 22, y: 60 },
            Point { x: 3, y: 29 },
            Point { x: 7, y: 12 },
        ],
        demands: vec![0; 5],
        vehicle_count: 1,
        capacity: None,
    })
}

pub fn tsp_solution() -> Solution {
    Solution { body: SolutionBody::Tour(vec![0, 4, 3, 2, 1]), objective: 181 }
}

/// The VRP example states vehicle capacity 85 but no demands; the demands
/// below are a fixture choice that keeps the one loaded route feasible.
pub fn vrp_instance() -> ProblemInstance {
    ProblemInstance::Routing(RoutingInstance {
        kind: ProblemKind::Vrp,
        points: vec![
            Point { x: 34, y: 42 },
            Point { x: 39, y: 58 },
            Point { x: 46, y: 48 },
            Point { x: 57, y: 49 },
            Point { x: 45, y: 16 },
        ],
        demands: vec![0, 20, 20, 20, 20],
        vehicle_count: 5,
        capacity: Some(85),
    })
}

pub fn vrp_solution() -> Solution {
    Solution {
        body: SolutionBody::Routes(vec![
            vec![],
            vec![],
            vec![],
            vec![],
            vec![1, 2, 3, 4],
        ]),
        objective: 102,
    }
}

pub fn jssp_instance() -> ProblemInstance {
    ProblemInstance::Shop(ShopInstance {
        kind: ProblemKind::Jssp,
        jobs: 2,
        machines: 6,
        ops: vec![
            vec![
                ShopOp { machine: 2, duration: 205 },
                ShopOp { machine: 1, duration: 157 },
                ShopOp { machine: 0, duration: 198 },
                ShopOp { machine: 5, duration: 79 },
                ShopOp { machine: 3, duration: 110 },
                ShopOp { machine: 4, duration: 32 },
            ],
            vec![
                ShopOp { machine: 3, duration: 179 },
                ShopOp { machine: 4, duration: 108 },
                ShopOp { machine: 2, duration: 82 },
                ShopOp { machine: 5, duration: 112 },
                ShopOp { machine: 1, duration: 136 },
                ShopOp { machine: 0, duration: 27 },
            ],
        ],
    })
}

pub fn jssp_solution() -> Solution {
    Solution {
        body: SolutionBody::Schedule(vec![
            ScheduledOp { job: 0, machine: 2, start: 0, duration: 205 },
            ScheduledOp { job: 1, machine: 3, start: 0, duration: 179 },
            ScheduledOp { job: 1, machine: 4, start: 179, duration: 108 },
            ScheduledOp { job: 0, machine: 1, start: 205, duration: 157 },
            ScheduledOp { job: 1, machine: 2, start: 287, duration: 82 },
            ScheduledOp { job: 0, machine: 0, start: 362, duration: 198 },
            ScheduledOp { job: 1, machine: 5, start: 369, duration: 112 },
            ScheduledOp { job: 1, machine: 1, start: 481, duration: 136 },
            ScheduledOp { job: 0, machine: 5, start: 560, duration: 79 },
            ScheduledOp { job: 1, machine: 0, start: 617, duration: 27 },
            ScheduledOp { job: 0, machine: 3, start: 639, duration: 110 },
            ScheduledOp { job: 0, machine: 4, start: 749, duration: 32 },
        ]),
        objective: 781,
    }
}

pub fn fssp_instance() -> ProblemInstance {
    ProblemInstance::Shop(ShopInstance::flow_shop(vec![
        vec![12, 7],
        vec![8, 4],
        vec![4, 15],
        vec![5, 9],
    ]))
}

pub fn fssp_solution() -> Solution {
    Solution { body: SolutionBody::Permutation(vec![2, 1, 3, 0]), objective: 39 }
}

/// All six (instance, solution) sample pairs.
pub fn all() -> Vec<(ProblemInstance, Solution)> {
    vec![
        (knapsack_instance(), knapsack_solution()),
        (binpack_instance(), binpack_solution()),
        (tsp_instance(), tsp_solution()),
        (vrp_instance(), vrp_solution()),
        (jssp_instance(), jssp_solution()),
        (fssp_instance(), fssp_solution()),
    ]
}
