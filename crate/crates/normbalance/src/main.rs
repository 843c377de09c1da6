//! Command-line harness: generate instances, run solvers, check the norm
//! layer, and emit benchmark CSVs.
//!
//! All subcommands are deterministic for fixed flags (timing columns in
//! benchmark CSVs aside). Results go to stdout; logs go to stderr and are
//! controlled by the `NB_LOG` environment variable (error|info|debug).
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use normbalance::baseline::solve_greedy;
use normbalance::exact::{solve_glb_exact, solve_normlin_exact, ExactCaps};
use normbalance::glb::{self, GlbConfig};
use normbalance::instance::{gen_from_set_cover, gen_random, load_instance, NormProfile};
use normbalance::maxtopk;
use normbalance::normlin::{solve_ptas, NormLinInstance};
use normbalance::norms::NormSpec;
use normbalance::oracle::NormLinStrategy;
use normbalance::verify::{run_all, DefaultEval};

#[derive(Parser)]
#[command(
    name = "normbalance",
    version,
    about = "Load balancing on unrelated machines under monotone symmetric norms"
)]
struct Cli {
    /// Worker threads for parallel guess evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a solver on an instance file; the result JSON goes to stdout.
    Solve(SolveArgs),
    /// Run the randomized norm-layer self-checks.
    Verify(VerifyArgs),
    /// Run a benchmark suite and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random instance with a chosen norm profile.
    Random(GenRandomArgs),
    /// Set-cover reduction: machines are sets, jobs are elements.
    Setcover(GenSetcoverArgs),
}

#[derive(Args)]
struct GenRandomArgs {
    /// Number of machines.
    #[arg(long)]
    m: usize,
    /// Number of jobs.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that a machine/job pair is forbidden.
    #[arg(long, default_value_t = 0.1)]
    forbidden_prob: f64,
    /// Norm profile: l1-linf, linf-l1, topk-linf, l2-l2 or mixed.
    #[arg(long, default_value = "mixed")]
    norms: String,
    /// Processing-time range.
    #[arg(long, default_value_t = 0.1)]
    lo: f64,
    #[arg(long, default_value_t = 10.0)]
    hi: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenSetcoverArgs {
    /// JSON file holding a list of sets, each a list of 1-indexed elements.
    #[arg(long)]
    sets: PathBuf,
    /// Universe size; defaults to the largest element mentioned.
    #[arg(long)]
    n: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    GlbDirect,
    GlbRoc,
    Maxtopk,
    NormlinPtas,
    NormlinExact,
    Greedy,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::GlbDirect => "glb-direct",
            Algo::GlbRoc => "glb-roc",
            Algo::Maxtopk => "maxtopk",
            Algo::NormlinPtas => "normlin-ptas",
            Algo::NormlinExact => "normlin-exact",
            Algo::Greedy => "greedy",
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Instance file; a selection file ({"p": [...], "z": [...], "Z": t,
    /// "psi": ...}) for the normlin-* algorithms.
    #[arg(long = "in")]
    input: PathBuf,
    /// Seed for randomized rounding (glb-direct, glb-roc).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accuracy parameter: default 0.2 for maxtopk, 0.5 for normlin-ptas.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Guess budget for normlin-ptas (unbounded when omitted).
    #[arg(long)]
    budget: Option<u64>,
    /// Also run the exact oracle and report exact_opt and ratio_vs_exact.
    #[arg(long)]
    compare_exact: bool,
    /// Exact-oracle caps as ASSIGNMENTS,SUBSETS.
    #[arg(long, value_parser = parse_caps)]
    caps: Option<ExactCaps>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trials per property suite.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    /// Random mixed-norm instances solved end to end vs. the exact oracle.
    Ratios,
    /// Set-cover reductions: brute-force optimum vs. minimum cover size.
    Setcover,
    /// Norm-constrained selection: the approximation scheme vs. exact.
    Normlin,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Sizes: MxN pairs (e.g. 3x3,4x5); plain item counts for normlin.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    sizes: Vec<String>,
    /// Seeds, one run per (size, seed); empty gives a header-only CSV.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    seeds: Vec<u64>,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_caps(s: &str) -> Result<ExactCaps, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected ASSIGNMENTS,SUBSETS".into());
    }
    let max_assignments: u64 =
        parts[0].trim().parse().map_err(|e| format!("bad assignment cap: {e}"))?;
    let max_subsets: u64 = parts[1].trim().parse().map_err(|e| format!("bad subset cap: {e}"))?;
    Ok(ExactCaps { max_assignments, max_subsets })
}

enum Failure {
    /// Bad flag combinations and malformed flag payloads: exit 2.
    Usage(String),
    /// Everything that goes wrong past argument parsing: exit 1.
    Domain(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NB_LOG", "error"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("building the thread pool")?;
    }
    match cli.command {
        Command::Gen(GenCommand::Random(args)) => cmd_gen_random(args),
        Command::Gen(GenCommand::Setcover(args)) => cmd_gen_setcover(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(&path, text)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{}", text.trim_end()),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

fn cmd_gen_random(args: GenRandomArgs) -> Result<(), Failure> {
    let profile: NormProfile =
        args.norms.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
    if !(args.lo > 0.0 && args.hi > args.lo) {
        return Err(Failure::Usage(format!(
            "processing-time range must satisfy 0 < lo < hi, got {}..{}",
            args.lo, args.hi
        )));
    }
    let inst = gen_random(args.m, args.n, args.seed, (args.lo, args.hi), args.forbidden_prob, profile)?;
    emit(args.out, &inst.to_json()?)
}

fn cmd_gen_setcover(args: GenSetcoverArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.sets)
        .with_context(|| format!("reading {}", args.sets.display()))?;
    let sets_1indexed: Vec<Vec<usize>> =
        serde_json::from_str(&text).context("parsing the sets file")?;
    let mut sets = Vec::with_capacity(sets_1indexed.len());
    for (i, set) in sets_1indexed.into_iter().enumerate() {
        let mut converted = Vec::with_capacity(set.len());
        for e in set {
            if e == 0 {
                return Err(Failure::Domain(anyhow::anyhow!(
                    "set {} contains element 0; elements are 1-indexed",
                    i + 1
                )));
            }
            converted.push(e - 1);
        }
        sets.push(converted);
    }
    let n = match args.n {
        Some(n) => n,
        None => sets
            .iter()
            .flat_map(|s| s.iter().copied())
            .max()
            .map(|e| e + 1)
            .unwrap_or(0),
    };
    let inst = gen_from_set_cover(&sets, n)?;
    emit(args.out, &inst.to_json()?)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SolveResult {
    algo: &'static str,
    m: usize,
    n: usize,
    objective: f64,
    /// Machine per job, 1-indexed.
    assignment: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    /// glb modes: the proven factor on the rounding round count.
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    /// maxtopk: the proven factor 3 + 7*epsilon.
    #[serde(skip_serializing_if = "Option::is_none")]
    guarantee: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_vs_exact: Option<f64>,
}

#[derive(Serialize)]
struct GlbDiagJson {
    guesses_total: usize,
    guesses_feasible: usize,
    rounding_attempts: usize,
    rounding_successes: usize,
    guesses_rejected: usize,
    iteration_caps: usize,
    perturbed_certificates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    best: Option<BestGuessJson>,
}

#[derive(Serialize)]
struct BestGuessJson {
    /// Anchor machine, 1-indexed.
    i_star: usize,
    /// Anchor job, 1-indexed.
    j_star: usize,
    rho: Vec<f64>,
}

#[derive(Serialize)]
struct MaxTopKDiagJson {
    guesses_total: usize,
    guesses_feasible: usize,
    best_guess: usize,
    best_rho: Vec<f64>,
}

#[derive(Serialize)]
struct SelectionResult {
    algo: &'static str,
    n: usize,
    /// Selected items, 1-indexed, ascending.
    items: Vec<usize>,
    cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    /// normlin-ptas: the proven factor 1 + 143*epsilon.
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guesses_evaluated: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_vs_exact: Option<f64>,
}

/// Input file for the normlin-* algorithms.
#[derive(Serialize, Deserialize)]
struct SelectionFile {
    /// Item sizes.
    p: Vec<f64>,
    /// Item values.
    z: Vec<f64>,
    /// Required total value.
    #[serde(rename = "Z")]
    z_target: f64,
    /// The norm to minimize over the selected sizes.
    psi: NormSpec,
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    match args.algo {
        Algo::NormlinPtas | Algo::NormlinExact => cmd_solve_selection(args),
        _ => cmd_solve_instance(args),
    }
}

fn cmd_solve_instance(args: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let caps = args.caps.unwrap_or_default();
    let mut result = SolveResult {
        algo: args.algo.name(),
        m: inst.machines(),
        n: inst.jobs(),
        objective: 0.0,
        assignment: Vec::new(),
        seed: None,
        epsilon: None,
        bound: None,
        guarantee: None,
        diagnostics: None,
        exact_opt: None,
        ratio_vs_exact: None,
    };
    let assignment = match args.algo {
        Algo::Exact => {
            let (a, phi) = solve_glb_exact(&inst, caps)?;
            result.objective = phi;
            a
        }
        Algo::Greedy => {
            let (a, phi) = solve_greedy(&inst)?;
            result.objective = phi;
            a
        }
        Algo::GlbDirect | Algo::GlbRoc => {
            let mut config = if args.algo == Algo::GlbDirect {
                GlbConfig::direct(args.seed)
            } else {
                GlbConfig::round_or_cut(args.seed)
            };
            config.strategy = NormLinStrategy::default_for(inst.jobs());
            let sol = glb::solve(&inst, &config)?;
            let d = &sol.diagnostics;
            result.objective = sol.objective;
            result.seed = Some(args.seed);
            result.bound = Some(144.0 * glb::rounding_rounds(inst.jobs()) as f64);
            result.diagnostics = Some(serde_json::to_value(GlbDiagJson {
                guesses_total: d.guesses_total,
                guesses_feasible: d.guesses_feasible,
                rounding_attempts: d.rounding_attempts,
                rounding_successes: d.rounding_successes,
                guesses_rejected: d.guesses_rejected,
                iteration_caps: d.iteration_caps,
                perturbed_certificates: d.perturbed_certificates,
                best: d.best.as_ref().map(|b| BestGuessJson {
                    i_star: b.i_star + 1,
                    j_star: b.j_star + 1,
                    rho: b.rho.clone(),
                }),
            })?);
            sol.assignment
        }
        Algo::Maxtopk => {
            let epsilon = args.epsilon.unwrap_or(0.2);
            let out = maxtopk::solve_detailed(&inst, epsilon)?;
            result.objective = out.objective;
            result.epsilon = Some(epsilon);
            result.guarantee = Some(out.guarantee);
            result.diagnostics = Some(serde_json::to_value(MaxTopKDiagJson {
                guesses_total: out.guesses_total,
                guesses_feasible: out.guesses_feasible,
                best_guess: out.best_guess,
                best_rho: out.best_rho,
            })?);
            out.assignment
        }
        Algo::NormlinPtas | Algo::NormlinExact => unreachable!("dispatched to selection"),
    };
    result.assignment = assignment.sigma().iter().map(|&i| i + 1).collect();
    if args.compare_exact {
        let (_, exact) = solve_glb_exact(&inst, caps)?;
        result.exact_opt = Some(exact);
        result.ratio_vs_exact = Some(result.objective / exact);
    }
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn cmd_solve_selection(args: SolveArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let file: SelectionFile = serde_json::from_str(&text).context("parsing the selection file")?;
    let caps = args.caps.unwrap_or_default();
    let mut result = SelectionResult {
        algo: args.algo.name(),
        n: file.p.len(),
        items: Vec::new(),
        cost: 0.0,
        epsilon: None,
        bound: None,
        guesses_evaluated: None,
        truncated: None,
        exact_opt: None,
        ratio_vs_exact: None,
    };
    match args.algo {
        Algo::NormlinExact => {
            let choice = solve_normlin_exact(&file.p, &file.z, file.z_target, &file.psi, caps)?
                .ok_or_else(|| {
                    anyhow::anyhow!("infeasible: total value falls short of the target")
                })?;
            result.items = choice.items.iter().map(|&j| j + 1).collect();
            result.cost = choice.cost;
        }
        Algo::NormlinPtas => {
            let epsilon = args.epsilon.unwrap_or(0.5);
            let nl = NormLinInstance::new(
                file.p.clone(),
                file.z.clone(),
                file.z_target,
                file.psi.clone(),
                epsilon,
            )?;
            let out = solve_ptas(&nl, args.budget)?;
            result.items = out.items.iter().map(|&j| j + 1).collect();
            result.cost = out.cost;
            result.epsilon = Some(epsilon);
            result.bound = Some(1.0 + 143.0 * epsilon);
            result.guesses_evaluated = Some(out.guesses_evaluated);
            result.truncated = Some(out.truncated);
        }
        _ => unreachable!("dispatched to selection"),
    }
    if args.compare_exact {
        let choice = solve_normlin_exact(&file.p, &file.z, file.z_target, &file.psi, caps)?
            .ok_or_else(|| anyhow::anyhow!("infeasible: total value falls short of the target"))?;
        result.exact_opt = Some(choice.cost);
        result.ratio_vs_exact =
            Some(if choice.cost > 0.0 { result.cost / choice.cost } else { 1.0 });
    }
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let reports = run_all(args.trials, args.seed, &DefaultEval);
    let mut failures = 0usize;
    for r in &reports {
        println!("{:<22} {:>6} trials {:>4} failures", r.name, r.trials, r.failures);
        if let Some(detail) = &r.first_failure {
            println!("{:<22} first: {}", "", detail);
        }
        failures += r.failures;
    }
    println!(
        "{} suites, {} trials, {} failures",
        reports.len(),
        reports.iter().map(|r| r.trials).sum::<usize>(),
        failures
    );
    if failures > 0 {
        return Err(Failure::Domain(anyhow::anyhow!("{failures} property checks failed")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

const CSV_HEADER: &str = "instance_id,m,n,algo,objective,exact_opt,ratio,bound,wall_ms";

struct CsvRow {
    instance_id: String,
    m: usize,
    n: usize,
    algo: &'static str,
    objective: f64,
    exact_opt: f64,
    ratio: f64,
    bound: f64,
    wall_ms: f64,
}

impl CsvRow {
    fn line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.instance_id,
            self.m,
            self.n,
            self.algo,
            self.objective,
            self.exact_opt,
            self.ratio,
            self.bound,
            self.wall_ms
        )
    }
}

fn parse_mxn(token: &str) -> Result<(usize, usize), Failure> {
    let (m, n) = token
        .split_once(['x', 'X'])
        .ok_or_else(|| Failure::Usage(format!("size '{token}' is not of the form MxN")))?;
    let m = m.trim().parse().map_err(|e| Failure::Usage(format!("bad size '{token}': {e}")))?;
    let n = n.trim().parse().map_err(|e| Failure::Usage(format!("bad size '{token}': {e}")))?;
    Ok((m, n))
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let mut rows: Vec<CsvRow> = Vec::new();
    match args.suite {
        Suite::Ratios => {
            for token in &args.sizes {
                let (m, n) = parse_mxn(token)?;
                for &seed in &args.seeds {
                    rows.push(bench_ratio_row(m, n, seed)?);
                }
            }
        }
        Suite::Setcover => {
            for token in &args.sizes {
                let (m, n) = parse_mxn(token)?;
                for &seed in &args.seeds {
                    rows.push(bench_setcover_row(m, n, seed)?);
                }
            }
        }
        Suite::Normlin => {
            for token in &args.sizes {
                let n: usize = token
                    .trim()
                    .parse()
                    .map_err(|e| Failure::Usage(format!("bad item count '{token}': {e}")))?;
                for &seed in &args.seeds {
                    rows.push(bench_normlin_row(n, seed)?);
                }
            }
        }
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.line());
        csv.push('\n');
    }
    std::fs::write(&args.out, csv)
        .with_context(|| format!("writing {}", args.out.display()))?;
    log::info!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn bench_ratio_row(m: usize, n: usize, seed: u64) -> Result<CsvRow, Failure> {
    let inst = gen_random(m, n, seed, (0.1, 10.0), 0.1, NormProfile::Mixed)?;
    let start = Instant::now();
    let sol = glb::solve(&inst, &GlbConfig::direct(seed))?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (_, exact) = solve_glb_exact(&inst, ExactCaps::default())?;
    Ok(CsvRow {
        instance_id: format!("ratios-{m}x{n}-s{seed}"),
        m,
        n,
        algo: "glb-direct",
        objective: sol.objective,
        exact_opt: exact,
        ratio: sol.objective / exact,
        bound: 144.0 * glb::rounding_rounds(n) as f64,
        wall_ms,
    })
}

/// Random coverable set system: each set grabs elements independently, and
/// anything left uncovered is tossed into a seeded-random set.
fn random_cover_sets(m: usize, n: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(m as u64 ^ (n as u64) << 32));
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); m];
    for set in sets.iter_mut() {
        for e in 0..n {
            if rng.gen_bool(0.4) {
                set.push(e);
            }
        }
    }
    for e in 0..n {
        if !sets.iter().any(|s| s.contains(&e)) {
            let i = rng.gen_range(0..m);
            sets[i].push(e);
            sets[i].sort_unstable();
        }
    }
    sets
}

/// Minimum cover cardinality by enumerating subsets of the sets.
fn min_cover_size(sets: &[Vec<usize>], n: usize) -> usize {
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| s.iter().fold(0u64, |acc, &e| acc | (1 << e)))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = usize::MAX;
    for pick in 1u64..(1 << sets.len()) {
        let count = pick.count_ones() as usize;
        if count >= best {
            continue;
        }
        let mut union = 0u64;
        for (i, &mask) in masks.iter().enumerate() {
            if pick & (1 << i) != 0 {
                union |= mask;
            }
        }
        if union == full {
            best = count;
        }
    }
    best
}

fn bench_setcover_row(m: usize, n: usize, seed: u64) -> Result<CsvRow, Failure> {
    if m > 20 || n > 60 {
        return Err(Failure::Usage(format!(
            "setcover sizes are capped at 20x60 for the brute-force reference, got {m}x{n}"
        )));
    }
    let sets = random_cover_sets(m, n, seed);
    let inst = gen_from_set_cover(&sets, n)?;
    let start = Instant::now();
    let (_, objective) = solve_glb_exact(&inst, ExactCaps::default())?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let cover = min_cover_size(&sets, n) as f64;
    Ok(CsvRow {
        instance_id: format!("setcover-{m}x{n}-s{seed}"),
        m,
        n,
        algo: "exact",
        objective,
        exact_opt: cover,
        ratio: objective / cover,
        bound: 1.0,
        wall_ms,
    })
}

fn bench_normlin_row(n: usize, seed: u64) -> Result<CsvRow, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((n as u64) << 40));
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
    let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
    let z_target = 0.6 * z.iter().sum::<f64>();
    let psi = normbalance::verify::random_norm_spec(&mut rng, n.max(1), 2);
    let epsilon = 0.5;

    let nl = NormLinInstance::new(p.clone(), z.clone(), z_target, psi.clone(), epsilon)?;
    let start = Instant::now();
    let out = solve_ptas(&nl, None)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let exact = solve_normlin_exact(&p, &z, z_target, &psi, ExactCaps::default())?
        .expect("target is below the total value by construction");
    let ratio = if exact.cost > 0.0 { out.cost / exact.cost } else { 1.0 };
    Ok(CsvRow {
        instance_id: format!("normlin-n{n}-s{seed}"),
        m: 0,
        n,
        algo: "normlin-ptas",
        objective: out.cost,
        exact_opt: exact.cost,
        ratio,
        bound: 1.0 + 143.0 * epsilon,
        wall_ms,
    })
}
