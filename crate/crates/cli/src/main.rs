mod bench;
mod gen;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use orienteer_core::cycle::{
    approx2_op_1tw_cycle, compress_deadlines, ptas_op_1tw_cycle, solve_cop_1tw_cycle, solve_k_rounds,
    solve_k_workout, solve_op_1tw_cycle_fpt_with, solve_op_1tw_cycle_short, Epsilon,
};
use orienteer_core::dynamic::{solve_dyn_directed_chain, solve_dyn_undirected_path};
use orienteer_core::model::{
    parse_decomposition, parse_instance, parse_solution, parse_walk, serialize_instance, serialize_solution,
    ParseError,
};
use orienteer_core::oracle::{oracle_cop_with, oracle_op_with, OracleConfig};
use orienteer_core::path::solve_directed_path_mtw;
use orienteer_core::tree::solve_tree;
use orienteer_core::treewidth::{approx_tw, build_nice_decomposition, solve_tw_with, DEFAULT_MAX_WIDTH};
use orienteer_core::{validate_walk, Instance, Solution, SolveError, Walk};
use serde_json::json;

/// Orienteering with time windows on restricted graph classes.
#[derive(Parser)]
#[command(name = "orienteer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and print its solution.
    Solve(SolveArgs),
    /// Exhaustive search, for small instances.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        /// Ask for a walk collecting every vertex instead.
        #[arg(long)]
        cop: bool,
        #[arg(long, default_value_t = 16)]
        max_vertices: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a walk (or a solution file) against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        walk: PathBuf,
    },
    /// Write a generated instance.
    Gen(gen::GenArgs),
    /// Time a solver on growing seeded instances and print CSV.
    Bench(bench::BenchArgs),
    /// Shrink long idle stretches of a single-window cycle.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    PathMtw,
    CopCycle,
    CycleShort,
    CycleFpt,
    #[value(name = "cycle-2approx")]
    Cycle2Approx,
    CycleKround,
    CycleWorkout,
    CyclePtas,
    DynPath,
    DynChain,
    TreeDp,
    TwDp,
    TwApprox,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, required_unless_present = "input_dir", conflicts_with = "input_dir")]
    input: Option<PathBuf>,
    /// Solve every `*.json` file in a directory, one result line each.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rounds for cycle-kround, workout length for cycle-workout.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value = "1")]
    epsilon: Epsilon,
    /// Tree decomposition `{"bags", "tree"}` replacing the instance's own.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Most long windows cycle-fpt will enumerate subsets of.
    #[arg(long, default_value_t = 12)]
    subset_cap: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_WIDTH)]
    max_width: usize,
}

/// A failed command: exit code plus the machine-readable error.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    kind: String,
    detail: String,
}

impl Failure {
    pub fn new(code: u8, kind: &str, detail: impl Into<String>) -> Self {
        Failure {
            code,
            kind: kind.to_string(),
            detail: detail.into(),
        }
    }

    pub fn input(detail: impl Into<String>) -> Self {
        Failure::new(2, "invalid_input", detail)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::ResourceLimit(_) => 3,
            _ => 2,
        };
        Failure::new(code, e.kind(), e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(2, "parse", e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, "io", format!("{}: {e}", path.display())))
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))
            .map_err(|e| Failure::new(2, "io", format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::new(2, "io", e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    Ok(parse_instance(&read(path)?)?)
}

/// Scores `walk` the same way the core crate does; used for solvers that
/// return bare walks.
fn solution_of(inst: &Instance, walk: Walk, algorithm: &str) -> Solution {
    let report = validate_walk(inst, &walk);
    Solution {
        profit: report.profit,
        walk,
        algorithm: algorithm.to_string(),
    }
}

fn run_solver(args: &SolveArgs, inst: &mut Instance) -> CliResult<Solution> {
    if let Some(p) = &args.decomposition {
        inst.decomposition = Some(parse_decomposition(&read(p)?)?);
    }
    let inst = &*inst;
    let sol = match args.algorithm {
        Algorithm::PathMtw => solve_directed_path_mtw(inst)?,
        Algorithm::CopCycle => match solve_cop_1tw_cycle(inst)? {
            Some(w) => solution_of(inst, w, "cop-cycle"),
            None => return Err(Failure::new(1, "infeasible", "no walk collects every vertex")),
        },
        Algorithm::CycleShort => solve_op_1tw_cycle_short(inst)?,
        Algorithm::CycleFpt => solve_op_1tw_cycle_fpt_with(inst, args.subset_cap)?,
        Algorithm::Cycle2Approx => approx2_op_1tw_cycle(inst)?,
        Algorithm::CycleKround => solve_k_rounds(inst, args.k)?,
        Algorithm::CycleWorkout => solve_k_workout(inst, args.k)?,
        Algorithm::CyclePtas => ptas_op_1tw_cycle(inst, args.epsilon)?,
        Algorithm::DynPath => solve_dyn_undirected_path(inst)?,
        Algorithm::DynChain => solve_dyn_directed_chain(inst)?,
        Algorithm::TreeDp => solve_tree(inst)?,
        Algorithm::TwDp => {
            let dec = build_nice_decomposition(inst)?;
            info!("nice decomposition: {} nodes, width {}", dec.nodes.len(), dec.width);
            solve_tw_with(inst, &dec, args.max_width)?
        }
        Algorithm::TwApprox => {
            let dec = build_nice_decomposition(inst)?;
            if dec.width > args.max_width {
                return Err(Failure::new(
                    3,
                    "resource_limit",
                    format!("treewidth {} exceeds the cap {}", dec.width, args.max_width),
                ));
            }
            approx_tw(inst, &dec, args.epsilon)?
        }
    };
    self_check(inst, &sol)?;
    Ok(sol)
}

/// Re-validates an emitted solution; any disagreement is a bug.
fn self_check(inst: &Instance, sol: &Solution) -> CliResult<()> {
    let report = validate_walk(inst, &sol.walk);
    if !report.valid {
        return Err(Failure::new(
            4,
            "internal",
            format!("{} emitted an invalid walk: {}", sol.algorithm, report.violation.unwrap_or_default()),
        ));
    }
    if report.profit != sol.profit {
        return Err(Failure::new(
            4,
            "internal",
            format!("{} claimed profit {} but the walk collects {}", sol.algorithm, sol.profit, report.profit),
        ));
    }
    Ok(())
}

fn solve(args: &SolveArgs) -> CliResult<()> {
    if let Some(dir) = &args.input_dir {
        return solve_dir(args, dir);
    }
    let path = args.input.as_deref().expect("clap enforces --input");
    let mut inst = load_instance(path)?;
    let sol = run_solver(args, &mut inst)?;
    info!("{}: profit {}", sol.algorithm, sol.profit);
    emit(&serialize_solution(&sol), args.out.as_deref())
}

/// One JSON line per file; the exit code is the worst one seen.
fn solve_dir(args: &SolveArgs, dir: &Path) -> CliResult<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::new(2, "io", format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(PathBuf, CliResult<Solution>)> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| s.spawn(move || (f.clone(), load_instance(f).and_then(|mut i| run_solver(args, &mut i)))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });
    let mut lines = vec![];
    let mut worst: Option<Failure> = None;
    for (file, res) in results {
        let name = file.display().to_string();
        match res {
            Ok(sol) => lines.push(json!({"file": name, "profit": sol.profit, "algorithm": sol.algorithm}).to_string()),
            Err(f) => {
                lines.push(json!({"file": name, "error": {"kind": f.kind, "detail": f.detail}}).to_string());
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
            }
        }
    }
    emit(&lines.join("\n"), args.out.as_deref())?;
    match worst {
        Some(f) => Err(Failure::new(f.code, &f.kind, format!("batch: {}", f.detail))),
        None => Ok(()),
    }
}

fn oracle(input: &Path, cop: bool, max_vertices: usize, out: Option<&Path>) -> CliResult<()> {
    let inst = load_instance(input)?;
    let cfg = OracleConfig {
        max_vertices,
        max_tracked: max_vertices,
        ..OracleConfig::default()
    };
    let sol = if cop {
        match oracle_cop_with(&inst, &cfg)? {
            Some(w) => solution_of(&inst, w, "oracle-cop"),
            None => return Err(Failure::new(1, "infeasible", "no walk collects every vertex")),
        }
    } else {
        oracle_op_with(&inst, &cfg)?
    };
    self_check(&inst, &sol)?;
    emit(&serialize_solution(&sol), out)
}

fn verify(input: &Path, walk: &Path) -> CliResult<()> {
    let inst = load_instance(input)?;
    let text = read(walk)?;
    let walk = match parse_walk(&text) {
        Ok(w) => w,
        Err(e) => parse_solution(&text).map(|s| s.walk).map_err(|_| e)?,
    };
    let r = validate_walk(&inst, &walk);
    let report = json!({
        "valid": r.valid,
        "cost": r.cost,
        "profit": r.profit,
        "collected": r.collected,
        "violation": r.violation,
    });
    emit(&serde_json::to_string_pretty(&report).expect("report serializes"), None)?;
    if r.valid {
        Ok(())
    } else {
        Err(Failure::new(1, "invalid_walk", r.violation.unwrap_or_default()))
    }
}

fn compress(input: &Path, out: Option<&Path>) -> CliResult<()> {
    let inst = load_instance(input)?;
    let (small, map) = compress_deadlines(&inst)?;
    info!("time anchors (compressed, original): {:?}", map.anchors());
    emit(&serialize_instance(&small), out)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Oracle {
            input,
            cop,
            max_vertices,
            out,
        } => oracle(&input, cop, max_vertices, out.as_deref()),
        Command::Verify { input, walk } => verify(&input, &walk),
        Command::Gen(args) => gen::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Compress { input, out } => compress(&input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ORIENTEER_LOG", "off")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = json!({"error": {"kind": "usage", "detail": e.to_string().trim()}});
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({"error": {"kind": f.kind, "detail": f.detail}}));
            ExitCode::from(f.code)
        }
    }
}
