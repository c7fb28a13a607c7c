use log::debug;

use super::decomposition::NiceDecomposition;
use super::dp::{check_plain, optimize, DEFAULT_MAX_WIDTH};
use crate::cycle::Epsilon;
use crate::error::Result;
use crate::model::{validate_walk, Instance, Profit, Solution, Walk};
use crate::oracle::oracle_op;

/// `(1 + epsilon)`-approximation by profit scaling. For every candidate
/// maximum profit `q`, vertices above `q` count nothing and the others get
/// `floor(n^2 p / q) + 1`; the scaled optimum is then scored with the real
/// profits. Small instances go to the exhaustive search instead.
pub fn approx_tw(inst: &Instance, dec: &NiceDecomposition, epsilon: Epsilon) -> Result<Solution> {
    check_plain(inst)?;
    dec.check(inst)?;
    let n = inst.n() as u64;
    // (1 - 1/n) >= 1 / (1 + eps) holds iff n >= 1 + 1/eps
    if (n - 1) * epsilon.num() < epsilon.den() {
        let mut sol = oracle_op(inst)?;
        sol.algorithm = "tw-approx".into();
        return Ok(sol);
    }
    let nn = (n * n) as Profit;
    let mut candidates: Vec<Profit> = inst.vertices.iter().map(|v| v.profit).filter(|&p| p > 0).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut best = (validate_walk(inst, &Walk::starting_at(inst.start, 0)).profit, Walk::starting_at(inst.start, 0));
    for q in candidates {
        let scaled: Vec<Profit> = inst
            .vertices
            .iter()
            .map(|v| if v.profit > q { 0 } else { nn * v.profit / q + 1 })
            .collect();
        let walk = optimize(inst, dec, &scaled, DEFAULT_MAX_WIDTH)?;
        let got = validate_walk(inst, &walk).profit;
        debug!("tw-approx: cap {q} gives {got}");
        if got > best.0 {
            best = (got, walk);
        }
    }
    Ok(Solution::scored(inst, best.1, "tw-approx"))
}
