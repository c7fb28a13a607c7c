//! Exact solver for directed paths with multiple time windows per vertex.
//!
//! The DP sweeps the path once. After station `j` the envelope maps `τ`, the
//! total time spent waiting so far, to the best profit collectible among
//! stations `0..=j` within that slack. Windows are rebased by the travel cost
//! accumulated up to their station, so a window `[r, d]` at a station reached
//! after cost `c` reads `[r - c, d - c]` on the slack axis.

use crate::envelope::UndoEnvelope;
use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, TimeWindow, Topology, Walk};

/// One position of an unrolled walk.
#[derive(Clone, Debug)]
pub(crate) struct Station {
    pub vertex: usize,
    /// Travel cost from the first station.
    pub offset: Time,
    pub profit: Profit,
    /// Absolute windows, sorted and disjoint.
    pub windows: Vec<TimeWindow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Plan {
    pub profit: Profit,
    /// `(station, window)` pairs in station order.
    pub collect: Vec<(usize, TimeWindow)>,
}

/// Sweeps the stations and returns an optimal collection plan. Stations whose
/// offset exceeds the budget are ignored.
pub(crate) fn run_dp(stations: &[Station], budget: Time) -> Plan {
    let live = stations.iter().take_while(|st| st.offset <= budget).count();
    // the rebased windows each station contributes, latest first
    let rebased: Vec<Vec<(Time, Time, TimeWindow)>> = stations[..live]
        .iter()
        .map(|st| {
            if st.profit <= 0 {
                return vec![];
            }
            st.windows
                .iter()
                .rev()
                .filter(|w| w.deadline >= st.offset)
                .map(|w| ((w.release - st.offset).max(0), w.deadline - st.offset, *w))
                .collect()
        })
        .collect();
    let mut env = UndoEnvelope::new(rebased.iter().flatten().map(|w| w.0).collect());
    let mut marks = Vec::with_capacity(live + 1);
    marks.push(env.mark());
    let mut best = (0, None::<usize>);
    for (j, st) in stations[..live].iter().enumerate() {
        for &(r, d, _) in &rebased[j] {
            env.apply_window(r, d, st.profit);
        }
        marks.push(env.mark());
        let value = env.value_at(budget - st.offset);
        if best.1.is_none() || value > best.0 {
            best = (value, Some(j));
        }
    }
    let Some(end) = best.1 else {
        return Plan {
            profit: 0,
            collect: vec![],
        };
    };

    env.undo_to(marks[end + 1]);
    let mut collect = vec![];
    let mut tau = budget - stations[end].offset;
    for j in (0..=end).rev() {
        let here = env.value_at(tau);
        env.undo_to(marks[j]);
        if env.value_at(tau) == here {
            continue;
        }
        let st = &stations[j];
        let &(_, d, w) = rebased[j]
            .iter()
            .find(|&&(r, d, _)| r <= tau && env.value_at(tau.min(d)) + st.profit == here)
            .expect("envelope increase must come from a window");
        tau = tau.min(d);
        collect.push((j, w));
    }
    collect.reverse();
    Plan {
        profit: best.0,
        collect,
    }
}

/// Materializes a plan as a walk along the stations that leaves the first
/// station at `start`, waiting only where a release forces it. The walk stops
/// at the last collected station or at `through`, whichever is later.
pub(crate) fn plan_to_walk(stations: &[Station], plan: &Plan, start: Time, through: usize) -> Walk {
    let mut walk = Walk::starting_at(stations[0].vertex, start);
    let last = plan.collect.last().map_or(0, |&(k, _)| k).max(through);
    let mut slack = 0;
    let mut next = plan.collect.iter().peekable();
    for (j, st) in stations.iter().enumerate().take(last + 1) {
        let now = start + st.offset;
        if j > 0 {
            walk.step(st.vertex, now + slack);
        }
        if let Some(&&(k, w)) = next.peek() {
            if k == j {
                debug_assert!(now + slack <= w.deadline);
                slack = slack.max(w.release - now);
                walk.wait_until(now + slack);
                next.next();
            }
        }
    }
    walk
}

/// Stations for a directed path instance in path order.
fn path_stations(inst: &Instance) -> Vec<Station> {
    let mut offset = 0;
    (0..inst.n())
        .map(|v| {
            if v > 0 {
                offset += inst.edges[v - 1].cost;
            }
            Station {
                vertex: v,
                offset,
                profit: inst.profit(v),
                windows: collect_windows_or_budget(inst, v),
            }
        })
        .collect()
}

/// Windows under which `v` is collectible, with untimed vertices open over
/// the whole budget.
pub(crate) fn collect_windows_or_budget(inst: &Instance, v: usize) -> Vec<TimeWindow> {
    match inst.collect_windows(v) {
        Some(ws) => ws.to_vec(),
        None => vec![TimeWindow::new(0, inst.budget)],
    }
}

pub fn solve_directed_path_mtw(inst: &Instance) -> Result<Solution> {
    inst.require(Topology::DirectedPath)?;
    if inst.n() == 0 {
        return Err(SolveError::invalid("empty instance"));
    }
    inst.require_valid()?;
    let mut inst = inst.clone();
    inst.edges.sort_by_key(|e| e.u);
    let stations = path_stations(&inst);
    let plan = run_dp(&stations, inst.budget);
    let walk = plan_to_walk(&stations, &plan, 0, 0);
    let sol = Solution::scored(&inst, walk, "path-mtw");
    debug_assert_eq!(sol.profit, plan.profit);
    Ok(sol)
}
