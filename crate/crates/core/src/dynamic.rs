//! Orienteering on paths and chains whose edges are only usable during
//! activity intervals, without vertex windows.
//!
//! Departing as early as possible is never worse on a line, because a later
//! start can only find fewer usable intervals. An optimal walk on an
//! undirected path therefore covers a contiguous range `[i, j]` around the
//! start by heading straight to one end and then straight to the other.

use crate::error::{Result, SolveError};
use crate::model::{EdgeIndex, Instance, Profit, Solution, Time, Topology, Walk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Towards higher vertex indices (and around a cycle).
    Forward,
    Backward,
}

/// Leg from one vertex to another along the line, waiting wherever the next
/// edge is not yet usable.
struct Line<'a> {
    inst: &'a Instance,
    index: EdgeIndex,
}

impl<'a> Line<'a> {
    fn new(inst: &'a Instance) -> Self {
        Line {
            inst,
            index: inst.edge_index(),
        }
    }

    fn next(&self, v: usize, dir: Direction) -> usize {
        let n = self.inst.n();
        match dir {
            Direction::Forward => (v + 1) % n,
            Direction::Backward => (v + n - 1) % n,
        }
    }

    /// `(departure, arrival)` over the edge `v -> w`, arriving by the budget.
    fn hop(&self, v: usize, w: usize, t: Time) -> Option<(Time, Time)> {
        let e = &self.inst.edges[self.index.get(v, w)?];
        let dep = e.earliest_departure(t)?;
        let arr = dep + e.cost;
        (arr <= self.inst.budget).then_some((dep, arr))
    }

    /// Arrival at `to`, appending the moves to `walk` when given.
    fn travel(&self, from: usize, to: usize, mut t: Time, dir: Direction, mut walk: Option<&mut Walk>) -> Option<Time> {
        let mut v = from;
        while v != to {
            let w = self.next(v, dir);
            let (dep, arr) = self.hop(v, w, t)?;
            if let Some(walk) = walk.as_deref_mut() {
                walk.wait_until(dep);
                walk.step(w, arr);
            }
            v = w;
            t = arr;
        }
        Some(t)
    }
}

/// Earliest arrival at `to` when leaving `from` at `depart` and moving
/// monotonically in `direction`, or `None` if `to` cannot be reached within
/// the budget.
pub fn earliest_arrival(inst: &Instance, from: usize, to: usize, depart: Time, direction: Direction) -> Result<Option<Time>> {
    let n = inst.n();
    if from >= n || to >= n {
        return Err(SolveError::invalid(format!("vertex out of range: {from} -> {to}")));
    }
    if depart < 0 {
        return Err(SolveError::invalid("negative departure time"));
    }
    let consistent = match (inst.topology, direction) {
        (Topology::DirectedCycle, Direction::Forward) => true,
        (Topology::DirectedPath, Direction::Forward) | (Topology::UndirectedPath, Direction::Forward) => from <= to,
        (Topology::UndirectedPath, Direction::Backward) => from >= to,
        (Topology::DirectedPath | Topology::DirectedCycle, Direction::Backward) => false,
        (Topology::Tree | Topology::General, _) => {
            return Err(SolveError::WrongTopology {
                expected: "undirected_path",
                found: inst.topology.to_string(),
            })
        }
    };
    if !consistent {
        return Err(SolveError::invalid(format!(
            "cannot move {direction:?} from {from} to {to} on a {}",
            inst.topology
        )));
    }
    inst.require_valid()?;
    if depart > inst.budget {
        return Ok(None);
    }
    Ok(Line::new(inst).travel(from, to, depart, direction, None))
}

/// Exact optimum on an undirected path with dynamic edges.
pub fn solve_dyn_undirected_path(inst: &Instance) -> Result<Solution> {
    inst.require(Topology::UndirectedPath)?;
    inst.require_untimed()?;
    inst.require_valid()?;
    let n = inst.n();
    let s = inst.start;
    let line = Line::new(inst);
    let mut prefix = vec![0; n + 1];
    for v in 0..n {
        prefix[v + 1] = prefix[v] + inst.profit(v);
    }

    // reach[v] for the first leg, from s at time 0
    let reach: Vec<Option<Time>> = (0..n)
        .map(|v| {
            let dir = if v < s { Direction::Backward } else { Direction::Forward };
            line.travel(s, v, 0, dir, None)
        })
        .collect();

    let mut best: (Profit, usize, usize, Direction) = (inst.profit(s), s, s, Direction::Forward);
    for i in 0..=s {
        for j in s..n {
            let gain = prefix[j + 1] - prefix[i];
            if gain <= best.0 {
                continue;
            }
            for first in [Direction::Backward, Direction::Forward] {
                let (near, far, back) = match first {
                    Direction::Backward => (i, j, Direction::Forward),
                    Direction::Forward => (j, i, Direction::Backward),
                };
                // the range is already covered once the far end is the start
                let ok = reach[near].is_some_and(|t| far == s || line.travel(near, far, t, back, None).is_some());
                if ok {
                    best = (gain, i, j, first);
                    break;
                }
            }
        }
    }

    let (_, i, j, first) = best;
    let (near, far, back) = match first {
        Direction::Backward => (i, j, Direction::Forward),
        Direction::Forward => (j, i, Direction::Backward),
    };
    let mut walk = Walk::starting_at(s, 0);
    let t = line.travel(s, near, 0, first, Some(&mut walk)).expect("first leg feasible");
    if far != s {
        line.travel(near, far, t, back, Some(&mut walk)).expect("second leg feasible");
    }
    Ok(Solution::scored(inst, walk, "dyn-path"))
}

/// Greedy forward walk on a directed path or cycle with dynamic edges.
pub fn solve_dyn_directed_chain(inst: &Instance) -> Result<Solution> {
    if !inst.topology.is_directed() {
        return Err(SolveError::WrongTopology {
            expected: "directed_path",
            found: inst.topology.to_string(),
        });
    }
    inst.require_untimed()?;
    inst.require_valid()?;
    let line = Line::new(inst);
    let mut walk = Walk::starting_at(inst.start, 0);
    let (mut v, mut t) = (inst.start, 0);
    // every vertex is seen after n - 1 moves
    for _ in 1..inst.n() {
        let w = line.next(v, Direction::Forward);
        let Some((dep, arr)) = line.hop(v, w, t) else { break };
        walk.wait_until(dep);
        walk.step(w, arr);
        v = w;
        t = arr;
    }
    Ok(Solution::scored(inst, walk, "dyn-chain"))
}
