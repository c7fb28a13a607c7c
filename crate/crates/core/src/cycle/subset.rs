//! Envelope DP over the unwrapped cycle with one envelope per set of long
//! windows already used.
//!
//! A window shorter than the cycle can be hit by at most one copy of its
//! vertex, because consecutive copies are at least `C` apart. Long windows
//! can be hit by several copies, so the DP remembers which long-window
//! vertices it has already collected and never adds their profit twice.

use super::{compress_deadlines, zero_length_walk, CycleView};
use crate::envelope::ProfitEnvelope;
use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, Walk};
use crate::path::{plan_to_walk, Plan, Station};

pub const DEFAULT_SUBSET_CAP: usize = 12;

pub(crate) struct SubsetDp {
    n: usize,
    start: Time,
    stations: Vec<Station>,
    bit: Vec<Option<usize>>,
    /// `snaps[j][S]`: envelope after stations `0..j` for long set `S`.
    snaps: Vec<Vec<ProfitEnvelope>>,
}

impl SubsetDp {
    /// Runs the DP for walks that leave vertex 0 at `start`, end by `end`
    /// and visit at most `count` stations. Only vertices accepted by
    /// `include` contribute profit.
    pub fn run(view: &CycleView, start: Time, end: Time, count: usize, include: impl Fn(usize) -> bool) -> Self {
        let horizon = (end - start).max(0);
        let mut stations = view.stations(count, |v| if include(v) { view.profit[v] } else { 0 });
        stations.retain(|st| st.offset <= horizon);
        let mut bit = vec![None; view.n];
        let mut long = 0;
        for v in 0..view.n {
            if include(v) && view.profit[v] > 0 && view.is_long(v) {
                bit[v] = Some(long);
                long += 1;
            }
        }
        let sets = 1usize << long;
        let mut env = vec![ProfitEnvelope::zero(horizon + 1); sets];
        let mut snaps = Vec::with_capacity(stations.len() + 1);
        snaps.push(env.clone());
        for st in &stations {
            if let Some(w) = st.windows.first().filter(|_| st.profit > 0) {
                let now = start + st.offset;
                let d = w.deadline - now;
                if d >= 0 {
                    let r = (w.release - now).max(0);
                    match bit[st.vertex] {
                        None => {
                            for e in &mut env {
                                e.apply_window_unchecked(r, d, st.profit);
                            }
                        }
                        Some(b) => {
                            for s in (0..sets).filter(|s| s >> b & 1 == 0) {
                                let mut cand = env[s].clone();
                                cand.apply_window_unchecked(r, d, st.profit);
                                env[s | 1 << b].max_with(&cand);
                            }
                        }
                    }
                }
            }
            snaps.push(env.clone());
        }
        SubsetDp {
            n: view.n,
            start,
            stations,
            bit,
            snaps,
        }
    }

    /// Best `(profit, station, set)` over walks finishing by `end`. In closed
    /// mode the walk must finish at a copy of vertex 0.
    pub fn best(&self, end: Time, closed: bool) -> Option<(Profit, usize, usize)> {
        let mut best: Option<(Profit, usize, usize)> = None;
        for (j, st) in self.stations.iter().enumerate() {
            if closed && j % self.n != 0 {
                continue;
            }
            let tau = end - self.start - st.offset;
            if tau < 0 {
                break;
            }
            for (s, env) in self.snaps[j + 1].iter().enumerate() {
                let v = env.value_at(tau);
                if best.is_none_or(|b| v > b.0) {
                    best = Some((v, j, s));
                }
            }
        }
        best
    }

    /// Recovers the collection plan behind `best`.
    pub fn plan(&self, end: Time, station: usize, set: usize) -> Plan {
        let mut tau = end - self.start - self.stations[station].offset;
        let mut s = set;
        let profit = self.snaps[station + 1][s].value_at(tau);
        let mut collect = vec![];
        for j in (0..=station).rev() {
            let st = &self.stations[j];
            let here = self.snaps[j + 1][s].value_at(tau);
            let prev = &self.snaps[j];
            if prev[s].value_at(tau) == here {
                continue;
            }
            let w = st.windows[0];
            let now = self.start + st.offset;
            let d = w.deadline - now;
            let from = match self.bit[st.vertex] {
                Some(b) => {
                    debug_assert!(s >> b & 1 == 1);
                    s & !(1 << b)
                }
                None => s,
            };
            debug_assert!((w.release - now).max(0) <= tau);
            debug_assert_eq!(prev[from].value_at(tau.min(d)) + st.profit, here);
            tau = tau.min(d);
            s = from;
            collect.push((j, w));
        }
        collect.reverse();
        Plan { profit, collect }
    }

    pub fn walk(&self, plan: &Plan, through: usize) -> Walk {
        plan_to_walk(&self.stations, plan, self.start, through)
    }
}

/// Exact optimum, exponential only in the number of long windows.
pub fn solve_op_1tw_cycle_fpt(inst: &Instance) -> Result<Solution> {
    solve_op_1tw_cycle_fpt_with(inst, DEFAULT_SUBSET_CAP)
}

pub fn solve_op_1tw_cycle_fpt_with(inst: &Instance, cap: usize) -> Result<Solution> {
    let view = CycleView::new(inst)?;
    if view.len == 0 {
        let all: Vec<usize> = (0..view.n).collect();
        return Ok(Solution::scored(inst, zero_length_walk(&view, &all), "cycle-fpt"));
    }
    let k = (0..view.n).filter(|&v| view.is_long(v)).count();
    if k > cap {
        return Err(SolveError::resource(format!(
            "k = {k} long windows exceeds the cap of {cap}"
        )));
    }
    let (small, map) = compress_deadlines(inst)?;
    let sview = CycleView::new(&small)?;
    let count = sview.check_unwrap(sview.useful_rounds())?;
    let dp = SubsetDp::run(&sview, 0, sview.budget, count, |_| true);
    let walk = match dp.best(sview.budget, false) {
        Some((_, j, s)) => {
            let plan = dp.plan(sview.budget, j, s);
            dp.walk(&plan, 0)
        }
        None => Walk::starting_at(0, 0),
    };
    let walk = map.walk_to_original(inst, &walk);
    Ok(Solution::scored(inst, walk, "cycle-fpt"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::solve_op_1tw_cycle_short;
    use crate::cycle::tests::{random_cycle, unit_cycle};
    use crate::model::validate_walk;
    use crate::oracle::oracle_op;
    use proptest::prelude::*;

    #[test]
    fn one_long_window() {
        let inst = unit_cycle(&[(0, 0, 1), (0, 10, 4), (5, 5, 2)], 12);
        let sol = solve_op_1tw_cycle_fpt(&inst).unwrap();
        assert_eq!(sol.profit, oracle_op(&inst).unwrap().profit);
        assert_eq!(sol.profit, 7);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = unit_cycle(&[(0, 10, 1); 3], 10);
        assert!(matches!(
            solve_op_1tw_cycle_fpt_with(&inst, 2),
            Err(SolveError::ResourceLimit(m)) if m.contains("k = 3")
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_oracle(inst in random_cycle(5, 3, 14)) {
            let sol = solve_op_1tw_cycle_fpt(&inst).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            prop_assert_eq!(sol.profit, oracle_op(&inst).unwrap().profit);
        }

        #[test]
        fn no_long_windows_same_as_short(inst in random_cycle(5, 4, 3)) {
            if let Ok(short) = solve_op_1tw_cycle_short(&inst) {
                prop_assert_eq!(solve_op_1tw_cycle_fpt(&inst).unwrap().profit, short.profit);
            }
        }
    }
}
