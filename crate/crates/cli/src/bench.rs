use std::hint::black_box;
use std::time::Instant;

use clap::{Args, ValueEnum};
use orienteer_core::cycle::solve_cop_1tw_cycle;
use orienteer_core::envelope::ProfitEnvelope;
use orienteer_core::generators::{bench_cop_cycle, bench_path_mtw};
use orienteer_core::path::solve_directed_path_mtw;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{emit, CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    PathMtw,
    CopCycle,
    Envelope,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Either a comma-separated list or `lo..hi`, doubling from `lo`.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    let bad = || Failure::input(format!("cannot read sizes from {s:?}"));
    let sizes: Vec<usize> = match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi): (usize, usize) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            if lo == 0 || lo > hi {
                return Err(bad());
            }
            std::iter::successors(Some(lo), |&x| x.checked_mul(2))
                .take_while(|&x| x <= hi)
                .collect()
        }
        None => s
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<CliResult<_>>()?,
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

/// Median wall time of `reps` runs of `f`, in nanoseconds.
fn median_ns(reps: usize, mut f: impl FnMut()) -> u128 {
    let mut times: Vec<u128> = (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_nanos()
        })
        .collect();
    times.sort_unstable();
    times[times.len() / 2]
}

fn time_size(suite: Suite, size: usize, seed: u64, reps: usize) -> u128 {
    match suite {
        Suite::PathMtw => {
            let inst = bench_path_mtw(size, seed);
            median_ns(reps, || {
                black_box(solve_directed_path_mtw(&inst).expect("bench instance is valid"));
            })
        }
        Suite::CopCycle => {
            let inst = bench_cop_cycle(size, seed);
            median_ns(reps, || {
                black_box(solve_cop_1tw_cycle(&inst).expect("bench instance is valid"));
            })
        }
        Suite::Envelope => {
            let horizon = 4 * size as i64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ops: Vec<(i64, i64, i64)> = (0..size)
                .map(|_| {
                    let r = rng.gen_range(0..horizon);
                    (r, rng.gen_range(r..horizon), rng.gen_range(1..100))
                })
                .collect();
            median_ns(reps, || {
                let mut env = ProfitEnvelope::zero(horizon);
                for &(r, d, p) in &ops {
                    env.apply_window(r, d, p).expect("window inside horizon");
                }
                black_box(env.max_value());
            })
        }
    }
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    if args.repetitions == 0 {
        return Err(Failure::input("repetitions must be at least 1"));
    }
    let sizes = parse_sizes(&args.sizes)?;
    let mut rows = vec!["size,median_ns,ratio_to_previous".to_string()];
    let mut prev: Option<u128> = None;
    for &size in &sizes {
        let ns = time_size(args.suite, size, args.seed, args.repetitions);
        let ratio = prev.map_or(String::new(), |p| format!("{:.3}", ns as f64 / p.max(1) as f64));
        rows.push(format!("{size},{ns},{ratio}"));
        prev = Some(ns);
    }
    emit(&rows.join("\n"), args.out.as_deref())
}
