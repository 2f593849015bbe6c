//! Acceptance suite: one test per release criterion, so `cargo test` prints
//! one pass/fail line for each. Each test also prints a `criterion NN: ...`
//! summary (visible with `--nocapture`).
//!
//! 01 worked-example texts round-trip byte-exactly with the documented objectives
//! 02 every annotated routing leg equals the truncated Euclidean distance
//! 03 exact solvers match independent brute-force enumeration
//! 04 flow-shop heuristics hit the provable optimum on the worked example
//! 05 single-digit mutations of stepwise texts are always rejected
//! 06 oracle-echo evaluation closes at gap 0 / feasibility 100
//! 07 optimality-gap arithmetic matches hand-computed values
//! 08 analytic classifier gradients match finite differences
//! 09 the trained classifier routes held-out instructions at >= 99%
//! 10 Taillard 15x15 job-shop files parse and dispatch feasibly
//! 11 generated dataset records self-validate in both text formats

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use accord_kit::codec::{self, SolutionFormat, Status};
use accord_kit::dataset;
use accord_kit::eval::{self, CandidateSource, EvalConfig};
use accord_kit::gen::{self, GenSpec};
use accord_kit::problems::{
    check_feasible, permutation_schedule, truncated_euclidean, Point, ProblemInstance,
    ProblemKind, Sense,
};
use accord_kit::router::{self, RouterConfig, RouterModel, Tokenizer};
use accord_kit::samples;
use accord_kit::solve::{self, DispatchRule};

fn sample_pairs() -> Vec<(
    &'static str,
    ProblemInstance,
    accord_kit::problems::Solution,
    &'static str,
    &'static str,
    i64,
)> {
    vec![
        (
            "knapsack",
            samples::knapsack_instance(),
            samples::knapsack_solution(),
            include_str!("fixtures/knapsack.accord.txt"),
            include_str!("fixtures/knapsack.list.txt"),
            30,
        ),
        (
            "binpack",
            samples::binpack_instance(),
            samples::binpack_solution(),
            include_str!("fixtures/binpack.accord.txt"),
            include_str!("fixtures/binpack.list.txt"),
            2,
        ),
        (
            "tsp",
            samples::tsp_instance(),
            samples::tsp_solution(),
            include_str!("fixtures/tsp.accord.txt"),
            include_str!("fixtures/tsp.list.txt"),
            181,
        ),
        (
            "vrp",
            samples::vrp_instance(),
            samples::vrp_solution(),
            include_str!("fixtures/vrp.accord.txt"),
            include_str!("fixtures/vrp.list.txt"),
            102,
        ),
        (
            "jssp",
            samples::jssp_instance(),
            samples::jssp_solution(),
            include_str!("fixtures/jssp.accord.txt"),
            include_str!("fixtures/jssp.list.txt"),
            781,
        ),
        (
            "fssp",
            samples::fssp_instance(),
            samples::fssp_solution(),
            include_str!("fixtures/fssp.accord.txt"),
            include_str!("fixtures/fssp.list.txt"),
            39,
        ),
    ]
}

#[test]
fn criterion_01_worked_examples_round_trip_byte_exactly() {
    for (name, instance, solution, accord, list, objective) in sample_pairs() {
        let rendered = codec::render_accord(&instance, &solution).unwrap();
        assert_eq!(rendered, accord, "{name} stepwise text differs");
        let rendered = codec::render_list(&instance, &solution).unwrap();
        assert_eq!(rendered, list, "{name} list text differs");
        for (format, text) in
            [(SolutionFormat::Accord, accord), (SolutionFormat::List, list)]
        {
            let report = codec::validate_text(text, &instance, format);
            assert_eq!(report.status, Status::Feasible, "{name} {format}: {:?}", report.errors);
            assert_eq!(report.objective, Some(objective), "{name} {format} objective");
        }
    }
    println!("criterion 01: six worked examples byte-exact and feasible: pass");
}

#[test]
fn criterion_02_annotated_legs_are_truncated_euclidean() {
    let legs = [
        // tour of the single-vehicle worked example
        ((17, 22), (7, 12), 14),
        ((7, 12), (3, 29), 17),
        ((3, 29), (22, 60), 36),
        ((22, 60), (63, 8), 66),
        ((63, 8), (17, 22), 48),
        // loaded route of the multi-vehicle worked example
        ((34, 42), (39, 58), 16),
        ((39, 58), (46, 48), 12),
        ((46, 48), (57, 49), 11),
        ((57, 49), (45, 16), 35),
        ((45, 16), (34, 42), 28),
    ];
    for ((ax, ay), (bx, by), want) in legs {
        let got = truncated_euclidean(Point { x: ax, y: ay }, Point { x: bx, y: by });
        assert_eq!(got, want, "({ax},{ay})->({bx},{by})");
    }
    println!("criterion 02: all 10 annotated leg distances exact: pass");
}

fn brute_knapsack(items: &[(i64, i64)], capacity: i64) -> i64 {
    let mut best = 0;
    for mask in 0u32..1 << items.len() {
        let (mut v, mut w) = (0, 0);
        for (i, &(value, weight)) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v += value;
                w += weight;
            }
        }
        if w <= capacity {
            best = best.max(v);
        }
    }
    best
}

fn brute_tsp(points: &[Point]) -> i64 {
    fn go(points: &[Point], rest: &mut Vec<usize>, at: usize, len: i64, best: &mut i64) {
        if rest.is_empty() {
            *best = (*best).min(len + truncated_euclidean(points[at], points[0]));
            return;
        }
        for i in 0..rest.len() {
            let next = rest.swap_remove(i);
            go(points, rest, next, len + truncated_euclidean(points[at], points[next]), best);
            rest.push(next);
            let last = rest.len() - 1;
            rest.swap(i, last);
        }
    }
    let mut rest: Vec<usize> = (1..points.len()).collect();
    let mut best = i64::MAX;
    go(points, &mut rest, 0, 0, &mut best);
    best
}

fn brute_binpack(weights: &[i64], cap: i64) -> usize {
    fn go(weights: &[i64], cap: i64, pos: usize, loads: &mut Vec<i64>, best: &mut usize) {
        if loads.len() >= *best {
            return;
        }
        if pos == weights.len() {
            *best = loads.len();
            return;
        }
        for i in 0..loads.len() {
            if loads[i] + weights[pos] <= cap {
                loads[i] += weights[pos];
                go(weights, cap, pos + 1, loads, best);
                loads[i] -= weights[pos];
            }
        }
        loads.push(weights[pos]);
        go(weights, cap, pos + 1, loads, best);
        loads.pop();
    }
    let mut best = weights.len().max(1);
    go(weights, cap, 0, &mut Vec::new(), &mut best);
    best
}

fn brute_fssp(shop: &accord_kit::problems::ShopInstance) -> i64 {
    fn go(shop: &accord_kit::problems::ShopInstance, order: &mut Vec<usize>, rest: &mut Vec<usize>, best: &mut i64) {
        if rest.is_empty() {
            let makespan = permutation_schedule(shop, order)
                .iter()
                .map(|op| op.end())
                .max()
                .unwrap_or(0);
            *best = (*best).min(makespan);
            return;
        }
        for i in 0..rest.len() {
            let job = rest.swap_remove(i);
            order.push(job);
            go(shop, order, rest, best);
            order.pop();
            rest.push(job);
            let last = rest.len() - 1;
            rest.swap(i, last);
        }
    }
    let mut rest: Vec<usize> = (0..shop.jobs).collect();
    let mut best = i64::MAX;
    go(shop, &mut Vec::new(), &mut rest, &mut best);
    best
}

/// Minimum makespan over every semi-active job-shop schedule: depth-first
/// over the choice of which job's next operation to append.
fn brute_jssp(shop: &accord_kit::problems::ShopInstance) -> i64 {
    struct Search<'a> {
        shop: &'a accord_kit::problems::ShopInstance,
        next_op: Vec<usize>,
        job_ready: Vec<i64>,
        machine_ready: Vec<i64>,
        best: i64,
    }
    impl Search<'_> {
        fn go(&mut self, remaining: usize, makespan: i64) {
            if makespan >= self.best {
                return;
            }
            if remaining == 0 {
                self.best = makespan;
                return;
            }
            for job in 0..self.shop.jobs {
                let k = self.next_op[job];
                if k == self.shop.ops[job].len() {
                    continue;
                }
                let op = self.shop.ops[job][k];
                let start = self.job_ready[job].max(self.machine_ready[op.machine]);
                let end = start + op.duration;
                let (jr, mr) = (self.job_ready[job], self.machine_ready[op.machine]);
                self.next_op[job] += 1;
                self.job_ready[job] = end;
                self.machine_ready[op.machine] = end;
                self.go(remaining - 1, makespan.max(end));
                self.next_op[job] -= 1;
                self.job_ready[job] = jr;
                self.machine_ready[op.machine] = mr;
            }
        }
    }
    let mut s = Search {
        shop,
        next_op: vec![0; shop.jobs],
        job_ready: vec![0; shop.jobs],
        machine_ready: vec![0; shop.machines],
        best: i64::MAX,
    };
    s.go(shop.total_ops(), 0);
    s.best
}

#[test]
fn criterion_03_exact_solvers_match_brute_force() {
    for seed in 0..100u64 {
        let n = 5 + (seed as usize % 8); // 5..=12
        let inst = gen::gen_knapsack(n, gen::Difficulty::Medium, seed);
        let items: Vec<(i64, i64)> = inst.items.iter().map(|it| (it.value, it.weight)).collect();
        let want = brute_knapsack(&items, inst.capacity);
        let got = solve::knapsack_exact(&ProblemInstance::Knapsack(inst)).unwrap();
        assert_eq!(got.solution.objective, want, "knapsack seed {seed}");
    }
    for seed in 0..100u64 {
        let n = 5 + (seed as usize % 4); // 5..=8
        let inst = gen::gen_routing(n, 1, seed);
        let want = brute_tsp(&inst.points);
        let got = solve::tsp_exact(&ProblemInstance::Routing(inst)).unwrap();
        assert_eq!(got.solution.objective, want, "tsp seed {seed}");
    }
    for seed in 0..100u64 {
        let n = 5 + (seed as usize % 6); // 5..=10
        let inst = gen::gen_binpack(n, 20, 3, seed).unwrap();
        let weights: Vec<i64> = inst.items.iter().map(|it| it.weight).collect();
        let want = brute_binpack(&weights, inst.capacity) as i64;
        let got = solve::binpack_solve(&ProblemInstance::BinPack(inst)).unwrap();
        assert!(got.optimal, "binpack seed {seed} did not take the exact branch");
        assert_eq!(got.solution.objective, want, "binpack seed {seed}");
    }
    for seed in 0..100u64 {
        let jobs = 4 + (seed as usize % 5); // 4..=8
        let shop = gen::gen_shop(ProblemKind::Fssp, jobs, 2, seed).unwrap();
        let want = brute_fssp(&shop);
        let got = solve::fssp_johnson(&ProblemInstance::Shop(shop)).unwrap();
        assert_eq!(got.solution.objective, want, "fssp seed {seed}");
    }
    for seed in 0..100u64 {
        let shop = gen::gen_shop(ProblemKind::Jssp, 4, 3, seed).unwrap();
        let want = brute_jssp(&shop);
        let got = solve::jssp_exact_tiny(&ProblemInstance::Shop(shop)).unwrap();
        assert_eq!(got.solution.objective, want, "jssp seed {seed}");
    }
    println!("criterion 03: 500 brute-force comparisons across five exact solvers: pass");
}

#[test]
fn criterion_04_flow_shop_heuristics_hit_the_provable_optimum() {
    let instance = samples::fssp_instance();
    let shop = instance.as_shop().unwrap();
    // Every job still has to cross the last machine after the earliest
    // possible hand-off, so sum(m2 durations) + min(m1 durations) bounds
    // the makespan from below.
    let bound: i64 = (0..shop.jobs).map(|j| shop.duration(j, 1)).sum::<i64>()
        + (0..shop.jobs).map(|j| shop.duration(j, 0)).min().unwrap();
    assert_eq!(bound, 39);
    let neh = solve::fssp_neh(&instance).unwrap();
    let johnson = solve::fssp_johnson(&instance).unwrap();
    assert_eq!(neh.solution.objective, 39);
    assert_eq!(johnson.solution.objective, 39);
    println!("criterion 04: NEH and the 2-machine rule both reach the bound 39: pass");
}

#[test]
fn criterion_05_digit_mutations_never_validate() {
    let mut texts: Vec<(ProblemInstance, String)> = sample_pairs()
        .into_iter()
        .map(|(_, instance, solution, ..)| {
            let text = codec::render_accord(&instance, &solution).unwrap();
            (instance, text)
        })
        .collect();
    for kind in ProblemKind::ALL {
        let mut spec = GenSpec::new(kind, 8, 0xacc0);
        spec.machines = 3;
        if kind == ProblemKind::Jssp {
            spec.n = 4;
        }
        for i in 0..10 {
            let instance = spec.gen_instance(spec.record_seed(i)).unwrap();
            let solution = solve::solve_default(&instance).unwrap().solution;
            let text = codec::render_accord(&instance, &solution).unwrap();
            texts.push((instance, text));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mutations = 0usize;
    for (instance, text) in &texts {
        let digits: Vec<usize> = text
            .char_indices()
            .filter(|(_, c)| c.is_ascii_digit())
            .map(|(i, _)| i)
            .collect();
        for &pos in &digits {
            let old = text.as_bytes()[pos] - b'0';
            for offset in [rng.gen_range(1..5), rng.gen_range(5..10)] {
                let new = (old + offset) % 10;
                let mut mutated = text.clone().into_bytes();
                mutated[pos] = b'0' + new;
                let mutated = String::from_utf8(mutated).unwrap();
                let report =
                    codec::validate_text(&mutated, instance, SolutionFormat::Accord);
                assert_ne!(
                    report.status,
                    Status::Feasible,
                    "mutation {old}->{new} survived at byte {pos} of:\n{text}"
                );
                mutations += 1;
            }
        }
    }
    assert!(mutations >= 10_000, "only {mutations} mutations exercised");
    println!("criterion 05: {mutations} single-digit mutations all rejected: pass");
}

fn benchmark_specs(count: usize) -> Vec<GenSpec> {
    ProblemKind::ALL
        .into_iter()
        .map(|kind| {
            let mut spec = GenSpec::new(kind, 8, 0xeba1 + kind.class_index() as u64);
            match kind {
                ProblemKind::Knapsack => spec.n = 10,
                ProblemKind::Jssp => {
                    spec.n = 4;
                    spec.machines = 3;
                }
                ProblemKind::Fssp => {
                    spec.n = 5;
                    spec.machines = 3;
                }
                _ => {}
            }
            spec.count = count;
            spec
        })
        .collect()
}

#[test]
fn criterion_06_oracle_echo_closes_the_harness_loop() {
    let mut records = Vec::new();
    for spec in benchmark_specs(100) {
        for i in 0..spec.count {
            records.push(dataset::build_record(&spec, i).unwrap());
        }
    }
    assert_eq!(records.len(), 600);
    for format in [SolutionFormat::Accord, SolutionFormat::List] {
        let config = EvalConfig { samples: 8, format, ..EvalConfig::default() };
        let report = eval::run_benchmark(&records, &CandidateSource::OracleEcho, &config);
        for row in &report.rows {
            assert_eq!(row.mean_gap_pct, Some(0.0), "{} gap ({format})", row.problem);
            assert_eq!(row.feasibility_pct, 100.0, "{} feasibility ({format})", row.problem);
            assert_eq!(row.n_na, 0, "{} N/A count ({format})", row.problem);
        }
    }
    println!("criterion 06: 600-instance oracle echo at gap 0.00% / feasibility 100.0%: pass");
}

#[test]
fn criterion_07_gap_arithmetic_matches_hand_computation() {
    let gap = eval::optimality_gap(103.9, 100.0, Sense::Min).unwrap();
    assert!((gap - 0.039).abs() < 1e-12, "min-sense gap {gap}");
    let gap = eval::optimality_gap(28.0, 30.0, Sense::Max).unwrap();
    assert!((gap - 2.0 / 30.0).abs() < 1e-12, "max-sense gap {gap}");
    println!("criterion 07: hand-computed gaps reproduced to 1e-12: pass");
}

fn tiny_router() -> RouterModel {
    let texts = [
        "pack the most valuable items under the weight cap",
        "serve all customers with the fewest kilometers",
        "assign operations to machines without overlap",
    ];
    let tokenizer = Tokenizer::fit(texts.iter().copied());
    let config = RouterConfig {
        vocab_size: tokenizer.len(),
        d_embed: 8,
        d_hidden: 16,
        heads: 2,
        max_len: 16,
        dropout: 0.0,
        seed: 11,
        ..RouterConfig::default()
    };
    RouterModel::init(config, tokenizer).unwrap()
}

#[test]
fn criterion_08_gradients_match_finite_differences() {
    let model = tiny_router();
    let cases = [
        ("pack the most valuable items", ProblemKind::Knapsack),
        ("serve all customers with the fewest kilometers", ProblemKind::Vrp),
        ("assign operations to machines", ProblemKind::Jssp),
        ("weight cap items", ProblemKind::Binpack),
        ("fewest machines overlap customers", ProblemKind::Fssp),
    ];
    let mut worst = 0.0f64;
    for (text, kind) in cases {
        worst = worst.max(router::gradient_check(&model, text, kind));
    }
    assert!(worst <= 1e-4, "max relative gradient error {worst}");
    println!("criterion 08: max relative gradient error {worst:.2e} <= 1e-4: pass");
}

#[test]
fn criterion_09_router_reaches_99_percent_on_held_out_instructions() {
    let mut train_set = Vec::new();
    let mut held_out = Vec::new();
    for kind in ProblemKind::ALL {
        let sizes: &[usize] = match kind {
            ProblemKind::Tsp | ProblemKind::Vrp => &[5, 8, 10, 12, 15, 20],
            ProblemKind::Knapsack => &[5, 8, 10, 12, 15, 20, 25, 30],
            ProblemKind::Binpack => &[5, 8, 12, 15, 20],
            ProblemKind::Jssp | ProblemKind::Fssp => &[3, 4, 5, 6],
        };
        let mut spec = GenSpec::new(kind, sizes[0], 0x70_0000 + kind.class_index() as u64);
        for i in 0..1200usize {
            spec.n = sizes[i % sizes.len()];
            spec.machines = 2 + i % 3;
            // One vehicle literally is the single-vehicle problem, so the
            // multi-vehicle class starts at two.
            spec.vehicles = if kind == ProblemKind::Tsp { 1 } else { 2 + i % 5 };
            spec.target_bins = 2 + i % 3;
            let instance = spec.gen_instance(spec.record_seed(i)).unwrap();
            let pair = (dataset::instruction_text(&instance), kind);
            if i < 1000 {
                train_set.push(pair);
            } else {
                held_out.push(pair);
            }
        }
    }
    assert_eq!(train_set.len(), 6000);
    assert_eq!(held_out.len(), 1200);
    let config = RouterConfig { epochs: 2, seed: 17, ..RouterConfig::default() };
    let (model, curve) = router::train(config, &train_set).unwrap();
    let acc = router::accuracy(&model, &held_out);
    assert!(acc >= 0.99, "held-out accuracy {acc} (loss curve {curve:?})");
    println!("criterion 09: held-out routing accuracy {:.2}% >= 99%: pass", acc * 100.0);
}

#[test]
fn criterion_10_taillard_job_shop_ingestion() {
    // 15x15 file in the published benchmark layout: a header line, the
    // processing-time matrix, then the 1-based machine-order matrix.
    let (jobs, machines) = (15usize, 15usize);
    let mut rng = ChaCha8Rng::seed_from_u64(1515);
    let mut content = String::from("15 15 0 0\nTimes\n");
    let times: Vec<Vec<i64>> =
        (0..jobs).map(|_| (0..machines).map(|_| rng.gen_range(1..100)).collect()).collect();
    for row in &times {
        let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
        content.push_str(&cells.join(" "));
        content.push('\n');
    }
    content.push_str("Machines\n");
    for _ in 0..jobs {
        let mut order: Vec<usize> = (1..=machines).collect();
        for i in (1..machines).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let cells: Vec<String> = order.iter().map(|m| m.to_string()).collect();
        content.push_str(&cells.join(" "));
        content.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tai15x15.txt");
    std::fs::write(&path, content).unwrap();

    let shop = eval::read_taillard(&path, ProblemKind::Jssp).unwrap();
    assert_eq!((shop.jobs, shop.machines), (15, 15));
    let instance = ProblemInstance::Shop(shop);
    for rule in [DispatchRule::Spt, DispatchRule::Mwr, DispatchRule::Mor] {
        let res = solve::jssp_dispatch(&instance, rule).unwrap();
        let verdict = check_feasible(&instance, &res.solution);
        assert!(verdict.feasible, "{rule:?}: {:?}", verdict.violations);
    }
    println!("criterion 10: 15x15 benchmark file parsed and dispatched feasibly: pass");
}

#[test]
fn criterion_11_dataset_records_self_validate() {
    let mut ids = HashSet::new();
    let mut total = 0usize;
    for spec in benchmark_specs(200) {
        for i in 0..spec.count {
            let record = dataset::build_record(&spec, i).unwrap();
            assert!(ids.insert(record.id.clone()), "duplicate id {}", record.id);
            for (format, text) in [
                (SolutionFormat::Accord, &record.output_accord),
                (SolutionFormat::List, &record.output_list),
            ] {
                let report = codec::validate_text(text, &record.instance, format);
                assert_eq!(report.status, Status::Feasible, "{} {format}", record.id);
                assert_eq!(
                    report.objective,
                    Some(record.oracle_objective),
                    "{} {format} objective",
                    record.id
                );
            }
            total += 1;
        }
    }
    assert_eq!(total, 1200);
    println!("criterion 11: 1200 records self-validate in both formats: pass");
}
