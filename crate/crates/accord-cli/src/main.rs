//! `accord` — command-line front end wiring the toolkit into one pipeline:
//! generate instances, solve them, render solution texts, validate candidate
//! texts, evaluate candidate sources, and train/run the instruction router.
//!
//! Exit codes: 0 success, 1 operational failure, 2 usage error; `validate`
//! additionally exits 3 when the text is infeasible and 4 when malformed.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use accord_kit::codec::{SolutionFormat, Status};
use accord_kit::dataset::{self, DatasetRecord};
use accord_kit::eval::{self, CandidateSource, EvalConfig, HttpSource};
use accord_kit::gen::{Difficulty, GenSpec};
use accord_kit::problems::{ProblemInstance, ProblemKind, Solution};
use accord_kit::router::{self, RouterConfig, RouterModel};
use accord_kit::solve;

#[derive(Parser)]
#[command(name = "accord", version, about = "Toolkit for six classic optimization problems: instance generation, reference solvers, solution-text codecs, evaluation, and an instruction router")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug, -vvv trace)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance dataset (JSONL, one labeled record per line)
    Gen(GenArgs),
    /// Solve a JSON instance with the default reference solver
    Solve(SolveArgs),
    /// Render a solution as text in either format
    Render(RenderArgs),
    /// Validate a solution text against its instance (exit 3 infeasible, 4 malformed)
    Validate(ValidateArgs),
    /// Run the best-of-N evaluation harness over a dataset
    Eval(EvalArgs),
    /// Train the instruction router on a dataset's instruction texts
    RouteTrain(RouteTrainArgs),
    /// Classify instruction text with a trained router checkpoint
    Route(RouteArgs),
    /// Convert a Taillard benchmark file to a JSON instance
    TaillardImport(TaillardArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Problem kind: tsp|vrp|knapsack|binpack|jssp|fssp
    #[arg(long, value_parser = parse_kind)]
    problem: ProblemKind,
    /// Items / nodes / jobs, depending on the problem
    #[arg(long)]
    n: usize,
    /// Vehicle count (VRP)
    #[arg(long)]
    v: Option<usize>,
    /// Machine count (JSSP/FSSP)
    #[arg(long)]
    machines: Option<usize>,
    /// Largest item weight (bin packing)
    #[arg(long)]
    weight_max: Option<i64>,
    /// Bin count the capacity is sized for (bin packing)
    #[arg(long)]
    target_bins: Option<usize>,
    /// Knapsack difficulty tier: easy|medium|hard
    #[arg(long, value_parser = parse_difficulty)]
    difficulty: Option<Difficulty>,
    /// Number of records to generate
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Base seed (falls back to ACCORD_KIT_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Reject sizes outside the published size grids instead of warning
    #[arg(long)]
    strict: bool,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON path, or `-` for stdin
    instance: PathBuf,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Instance JSON path
    #[arg(long)]
    instance: PathBuf,
    /// Solution JSON path (e.g. `solve` output), or `-` for stdin
    #[arg(long)]
    solution: PathBuf,
    /// Text format: accord|list
    #[arg(long, default_value = "accord", value_parser = parse_format)]
    format: SolutionFormat,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance JSON path
    #[arg(long)]
    instance: PathBuf,
    /// Solution text path, or `-` for stdin
    text: PathBuf,
    /// Text format: accord|list
    #[arg(long, default_value = "accord", value_parser = parse_format)]
    format: SolutionFormat,
    /// Output path for the JSON report (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset JSONL path (from `gen`)
    #[arg(long)]
    dataset: PathBuf,
    /// Candidate source: oracle-echo|file|http
    #[arg(long, default_value = "oracle-echo")]
    source: String,
    /// Candidate JSONL path ({"id", "text"} lines; required for --source file)
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Chat-completion endpoint URL (required for --source http)
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name sent to the endpoint
    #[arg(long)]
    model: Option<String>,
    /// Sampling temperature sent to the endpoint
    #[arg(long)]
    temperature: Option<f64>,
    /// JSONL request/response log for reproducible replay
    #[arg(long)]
    replay_log: Option<PathBuf>,
    /// Candidates per instance
    #[arg(long, default_value_t = 60)]
    samples: usize,
    /// Text format candidates are expected in: accord|list
    #[arg(long, default_value = "accord", value_parser = parse_format)]
    format: SolutionFormat,
    /// Worker threads (default: all cores)
    #[arg(long)]
    parallelism: Option<usize>,
    /// Per-request timeout in seconds for remote sources
    #[arg(long, default_value_t = 120)]
    timeout: u64,
    /// CSV report path (default: stdout)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write per-instance records as JSON to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RouteTrainArgs {
    /// Dataset JSONL path; instruction texts and problem kinds form the corpus
    #[arg(long)]
    dataset: PathBuf,
    /// Checkpoint output path
    #[arg(long)]
    out: PathBuf,
    /// Training epochs
    #[arg(long, default_value_t = 3)]
    epochs: usize,
    /// Mini-batch size
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Adam learning rate
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    /// Training seed (falls back to ACCORD_KIT_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RouteArgs {
    /// Trained checkpoint path
    #[arg(long)]
    model: PathBuf,
    /// Instruction text; `-` or omitted reads stdin
    text: Option<String>,
}

#[derive(Args)]
struct TaillardArgs {
    /// Problem kind: jssp|fssp
    #[arg(long, value_parser = parse_kind)]
    problem: ProblemKind,
    /// Taillard-format file path
    file: PathBuf,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: accord_kit::ProblemError| e.to_string())
}

fn parse_difficulty(s: &str) -> Result<Difficulty, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<SolutionFormat, String> {
    s.parse()
}

/// --seed flag, then ACCORD_KIT_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("ACCORD_KIT_SEED") {
        Ok(raw) => raw
            .parse()
            .with_context(|| format!("ACCORD_KIT_SEED is not a u64: `{raw}`")),
        Err(_) => Ok(0),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).context("reading stdin")?;
        Ok(buf)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<ProblemInstance> {
    let raw = read_input(path)?;
    serde_json::from_str(&raw).with_context(|| format!("parsing instance {}", path.display()))
}

fn read_records(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(dataset::read_dataset(io::BufReader::new(file))?)
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Render(args) => cmd_render(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::RouteTrain(args) => cmd_route_train(args),
        Command::Route(args) => cmd_route(args),
        Command::TaillardImport(args) => cmd_taillard(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let mut spec = GenSpec::new(args.problem, args.n, resolve_seed(args.seed)?);
    if let Some(v) = args.v {
        spec.vehicles = v;
    }
    if let Some(m) = args.machines {
        spec.machines = m;
    }
    if let Some(w) = args.weight_max {
        spec.weight_max = w;
    }
    if let Some(b) = args.target_bins {
        spec.target_bins = b;
    }
    if let Some(d) = args.difficulty {
        spec.difficulty = d;
    }
    spec.count = args.count;
    spec.strict = args.strict;
    let mut buf = Vec::new();
    let written = dataset::emit_dataset(&spec, &mut buf)?;
    write_output(args.out.as_deref(), std::str::from_utf8(&buf)?)?;
    log::info!("wrote {written} records");
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let result = solve::solve_default(&instance)?;
    let mut rendered = serde_json::to_string_pretty(&result)?;
    rendered.push('\n');
    write_output(args.out.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_render(args: RenderArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let raw = read_input(&args.solution)?;
    let solution: Solution = serde_json::from_str(&raw)
        .with_context(|| format!("parsing solution {}", args.solution.display()))?;
    let text = match args.format {
        SolutionFormat::Accord => accord_kit::codec::render_accord(&instance, &solution)?,
        SolutionFormat::List => accord_kit::codec::render_list(&instance, &solution)?,
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let instance = read_instance(&args.instance)?;
    let text = read_input(&args.text)?;
    let report = accord_kit::codec::validate_text(&text, &instance, args.format);
    let mut rendered = serde_json::to_string_pretty(&report)?;
    rendered.push('\n');
    write_output(args.out.as_deref(), &rendered)?;
    Ok(match report.status {
        Status::Feasible => 0,
        Status::Infeasible => 3,
        Status::Malformed => 4,
    })
}

fn cmd_eval(args: EvalArgs) -> Result<i32> {
    if let Some(threads) = args.parallelism {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let records = read_records(&args.dataset)?;
    let source = match args.source.as_str() {
        "oracle-echo" => CandidateSource::OracleEcho,
        "file" => {
            let Some(path) = args.candidates.as_deref() else {
                eprintln!("error: --source file requires --candidates");
                return Ok(2);
            };
            CandidateSource::from_file(path)?
        }
        "http" => {
            let Some(url) = args.endpoint else {
                eprintln!("error: --source http requires --endpoint");
                return Ok(2);
            };
            let mut http = HttpSource { url, ..HttpSource::default() };
            if let Some(model) = args.model {
                http.model = model;
            }
            if let Some(t) = args.temperature {
                http.temperature = t;
            }
            http.replay_log = args.replay_log;
            CandidateSource::Http(http)
        }
        other => {
            eprintln!("error: unknown source `{other}` (oracle-echo|file|http)");
            return Ok(2);
        }
    };
    let config = EvalConfig {
        samples: args.samples,
        format: args.format,
        timeout_secs: args.timeout,
    };
    let report = eval::run_benchmark(&records, &source, &config);
    if let Some(path) = &args.out {
        let mut rendered = serde_json::to_string_pretty(&report.records)?;
        rendered.push('\n');
        fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    write_output(args.report.as_deref(), std::str::from_utf8(&csv)?)?;
    Ok(0)
}

fn cmd_route_train(args: RouteTrainArgs) -> Result<i32> {
    let records = read_records(&args.dataset)?;
    let corpus = router::corpus_from_dataset(&records);
    let config = RouterConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        seed: resolve_seed(args.seed)?,
        ..RouterConfig::default()
    };
    let (model, curve) = router::train(config, &corpus)?;
    model.save(&args.out)?;
    let summary = serde_json::json!({
        "checkpoint": args.out,
        "examples": corpus.len(),
        "epoch_mean_loss": curve,
        "train_accuracy": router::accuracy(&model, &corpus),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

fn cmd_route(args: RouteArgs) -> Result<i32> {
    let model = RouterModel::load(&args.model)?;
    let text = match args.text.as_deref() {
        Some("-") | None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            buf
        }
        Some(text) => text.to_string(),
    };
    let mut out = io::stdout().lock();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (kind, confidence) = model.classify(line);
        writeln!(
            out,
            "{}",
            serde_json::json!({ "problem": kind, "confidence": confidence })
        )?;
    }
    Ok(0)
}

fn cmd_taillard(args: TaillardArgs) -> Result<i32> {
    if !matches!(args.problem, ProblemKind::Jssp | ProblemKind::Fssp) {
        bail!("taillard-import supports jssp and fssp only");
    }
    let shop = eval::read_taillard(&args.file, args.problem)?;
    let instance = ProblemInstance::Shop(shop);
    let mut rendered = serde_json::to_string_pretty(&instance)?;
    rendered.push('\n');
    write_output(args.out.as_deref(), &rendered)?;
    Ok(0)
}
