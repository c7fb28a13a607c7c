use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use orienteer_core::generators::{
    from_3partition, from_3sat, from_knapsack, from_line_tsp, gen_random, parse_dimacs, Cnf, RandomParams,
};
use orienteer_core::model::{serialize_instance, serialize_walk, Topology};
use orienteer_core::Walk;
use serde_json::Value;

use crate::{emit, read, CliResult, Failure};

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a certificate walk (3sat, 3partition).
    #[arg(long, global = true)]
    witness: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    Random {
        #[arg(long, default_value = "directed_path")]
        topology: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        windows: usize,
        #[arg(long, default_value_t = 1)]
        min_cost: i64,
        #[arg(long, default_value_t = 4)]
        max_cost: i64,
        #[arg(long, default_value_t = 5)]
        max_profit: i64,
        #[arg(long, default_value_t = 6)]
        window_span: i64,
        #[arg(long, default_value_t = 0.8)]
        budget_factor: f64,
        #[arg(long)]
        dynamic: bool,
    },
    /// Jobs as a JSON array of `[position, release, deadline]`.
    Linetsp {
        #[arg(long)]
        jobs: PathBuf,
    },
    /// From a DIMACS file, or a seeded random 3-CNF.
    #[command(name = "3sat")]
    Sat {
        #[arg(long, conflicts_with_all = ["vars", "clauses"])]
        cnf: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        clauses: usize,
    },
    #[command(name = "3partition")]
    Partition {
        /// Comma-separated item sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<i64>,
    },
    Knapsack {
        /// Comma-separated `size:value` pairs.
        #[arg(long, value_delimiter = ',')]
        items: Vec<String>,
        #[arg(long)]
        capacity: i64,
    },
}

fn write_witness(path: Option<&Path>, walk: Option<Walk>) -> CliResult<()> {
    match (path, walk) {
        (Some(p), Some(w)) => emit(&serialize_walk(&w), Some(p)),
        (Some(_), None) => Err(Failure::new(1, "infeasible", "instance has no certificate")),
        _ => Ok(()),
    }
}

pub fn run(args: &GenArgs) -> CliResult<()> {
    let out = args.out.as_deref();
    let witness = args.witness.as_deref();
    match &args.kind {
        GenKind::Random {
            topology,
            n,
            windows,
            min_cost,
            max_cost,
            max_profit,
            window_span,
            budget_factor,
            dynamic,
        } => {
            let topology = Topology::parse(topology)
                .ok_or_else(|| Failure::input(format!("unknown topology {topology:?}")))?;
            let params = RandomParams {
                topology,
                n: *n,
                cost_range: (*min_cost, *max_cost),
                profit_range: (0, *max_profit),
                windows_per_vertex: *windows,
                window_span: *window_span,
                budget_factor: *budget_factor,
                dynamic: *dynamic,
            };
            if witness.is_some() {
                return Err(Failure::input("random instances have no certificate"));
            }
            emit(&serialize_instance(&gen_random(&params, args.seed)?), out)
        }
        GenKind::Linetsp { jobs } => {
            let value: Value =
                serde_json::from_str(&read(jobs)?).map_err(|e| Failure::new(2, "parse", e.to_string()))?;
            let jobs = value
                .as_array()
                .ok_or_else(|| Failure::input("jobs must be an array"))?
                .iter()
                .map(|j| {
                    let a: Option<Vec<i64>> = j.as_array().map(|a| a.iter().filter_map(Value::as_i64).collect());
                    match a.as_deref() {
                        Some(&[x, r, d]) => Ok((x, r, d)),
                        _ => Err(Failure::input(format!("job {j} is not [position, release, deadline]"))),
                    }
                })
                .collect::<CliResult<Vec<_>>>()?;
            let red = from_line_tsp(&jobs)?;
            emit(&serialize_instance(&red.instance), out)
        }
        GenKind::Sat { cnf, vars, clauses } => {
            let formula = match cnf {
                Some(p) => parse_dimacs(&read(p)?)?,
                None => Cnf::random(*vars, *clauses, args.seed),
            };
            let red = from_3sat(&formula)?;
            emit(&serialize_instance(&red.instance), out)?;
            if witness.is_some() {
                let walk = formula.brute_force().map(|a| red.witness(&a)).transpose()?;
                write_witness(witness, walk)?;
            }
            Ok(())
        }
        GenKind::Partition { items } => {
            let red = from_3partition(items)?;
            emit(&serialize_instance(&red.instance), out)?;
            if witness.is_some() {
                let walk = red.find_partition().map(|p| red.witness(&p)).transpose()?;
                write_witness(witness, walk)?;
            }
            Ok(())
        }
        GenKind::Knapsack { items, capacity } => {
            let items = items
                .iter()
                .map(|s| {
                    s.split_once(':')
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| Failure::input(format!("item {s:?} is not size:value")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if witness.is_some() {
                return Err(Failure::input("knapsack instances have no certificate"));
            }
            emit(&serialize_instance(&from_knapsack(&items, *capacity)?), out)
        }
    }
}
