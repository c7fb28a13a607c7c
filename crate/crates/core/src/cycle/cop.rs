//! Covering walks on single-window cycles by monotone schedule repair.
//!
//! A schedule fixes, for every vertex `i` and round `j`, the time `T[i][j]`
//! until which the walk stays at `i` on its `j`-th visit. Starting from the
//! walk that never waits, the first vertex whose window is missed gets the
//! latest visit that leaves too early pushed to its release, and everything
//! after it is pushed along. Every raise is forced, so the result is the
//! pointwise smallest schedule that collects all vertices.

use super::{compress_deadlines, zero_length_walk, CycleView};
use crate::error::Result;
use crate::model::{validate_walk, Instance, Time, Walk};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    rounds: usize,
    /// Walk-ordered: entry `j * n + i` is vertex `i` in round `j`.
    leave: Vec<Time>,
    /// Number of repair steps performed.
    pub repairs: usize,
    /// Time at which the last vertex is first collected.
    pub completion: Time,
    last: usize,
}

impl Schedule {
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `T[i][j]`: time until which vertex `i` is held in round `j`.
    pub fn get(&self, i: usize, j: usize) -> Time {
        self.leave[j * self.n + i]
    }

    pub fn rows(&self) -> Vec<Vec<Time>> {
        (0..self.n)
            .map(|i| (0..self.rounds).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Pointwise `<=` against another schedule of the same shape.
    pub fn le(&self, other: &[Vec<Time>]) -> bool {
        (0..self.n).all(|i| (0..self.rounds).all(|j| self.get(i, j) <= other[i][j]))
    }
}

fn offset(view: &CycleView, idx: usize) -> Time {
    view.pos[idx % view.n] + view.len * (idx / view.n) as Time
}

fn arrival(view: &CycleView, leave: &[Time], idx: usize) -> Time {
    if idx == 0 {
        0
    } else {
        let prev = idx - 1;
        leave[prev] + view.cost[prev % view.n]
    }
}

/// The minimal covering schedule of `inst` as given (no compression), or
/// `None` if no walk within the budget collects every vertex.
pub fn cop_schedule(inst: &Instance) -> Result<Option<Schedule>> {
    let view = CycleView::new(inst)?;
    Ok(schedule_for(&view))
}

fn schedule_for(view: &CycleView) -> Option<Schedule> {
    if view.window.iter().any(Option::is_none) || view.len == 0 {
        return None;
    }
    let n = view.n;
    let rounds = (view.max_deadline() / view.len) as usize + 1;
    let total = n * rounds;
    let mut leave: Vec<Time> = (0..total).map(|k| offset(view, k)).collect();
    let window = |i: usize| view.window[i].unwrap();

    let first_hit = |leave: &[Time], i: usize| -> Option<usize> {
        let w = window(i);
        (0..rounds)
            .map(|j| j * n + i)
            .find(|&k| w.intersects(arrival(view, leave, k), leave[k]))
    };

    let mut repairs = 0;
    while let Some(i) = (0..n).find(|&i| first_hit(&leave, i).is_none()) {
        let r = window(i).release;
        let j = (0..rounds).rev().find(|&j| leave[j * n + i] < r)?;
        let at = j * n + i;
        leave[at] = r;
        for k in at + 1..total {
            let pushed = r + offset(view, k) - offset(view, at);
            if leave[k] >= pushed {
                break;
            }
            leave[k] = pushed;
        }
        repairs += 1;
        assert!(repairs <= total, "schedule repair did not terminate");
    }

    let mut last = 0;
    let mut completion = 0;
    for i in 0..n {
        let k = first_hit(&leave, i).expect("all vertices hit");
        let t = arrival(view, &leave, k).max(window(i).release);
        if k > last {
            last = k;
            completion = t;
        } else if k == last {
            completion = completion.max(t);
        }
    }
    if completion > view.budget {
        return None;
    }
    Some(Schedule {
        n,
        rounds,
        leave,
        repairs,
        completion,
        last,
    })
}

/// The schedule followed by `walk`, extended without waiting after it ends.
/// `walk` must be a canonical walk on the cycle starting at vertex 0.
pub fn induced_schedule(inst: &Instance, walk: &Walk, rounds: usize) -> Result<Vec<Vec<Time>>> {
    let view = CycleView::new(inst)?;
    let n = view.n;
    let total = n * rounds;
    let mut leave = vec![0; total];
    let mut idx = 0;
    let mut prev_v = walk.visits.first().map_or(0, |&(v, _)| v);
    for &(v, t) in &walk.visits {
        if v != prev_v {
            idx += 1;
        }
        if idx >= total {
            break;
        }
        leave[idx] = t;
        prev_v = v;
    }
    for k in idx + 1..total {
        leave[k] = leave[k - 1] + view.cost[(k - 1) % n];
    }
    Ok((0..n)
        .map(|i| (0..rounds).map(|j| leave[j * n + i]).collect())
        .collect())
}

fn schedule_walk(view: &CycleView, s: &Schedule) -> Walk {
    let mut walk = Walk::starting_at(0, 0);
    for k in 0..=s.last {
        if k > 0 {
            walk.step(k % view.n, arrival(view, &s.leave, k));
        }
        let hold = if k == s.last { s.completion } else { s.leave[k] };
        walk.wait_until(hold);
    }
    walk
}

/// A walk collecting every vertex inside its window, if one exists.
pub fn solve_cop_1tw_cycle(inst: &Instance) -> Result<Option<Walk>> {
    let view = CycleView::new(inst)?;
    if view.window.iter().any(Option::is_none) {
        return Ok(None);
    }
    if view.len == 0 {
        let all: Vec<usize> = (0..view.n).collect();
        return Ok(Some(zero_length_walk(&view, &all)));
    }
    let (small, map) = compress_deadlines(inst)?;
    let sview = CycleView::new(&small)?;
    let Some(schedule) = schedule_for(&sview) else {
        return Ok(None);
    };
    let walk = map.walk_to_original(inst, &schedule_walk(&sview, &schedule));
    debug_assert_eq!(validate_walk(inst, &walk).collected.len(), view.n);
    Ok(Some(walk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::tests::{random_cycle, unit_cycle};
    use crate::oracle::oracle_cop;
    use proptest::prelude::*;

    #[test]
    fn no_wait_walk_suffices() {
        let inst = unit_cycle(&[(0, 10, 1), (4, 4, 1), (2, 2, 1)], 12);
        let s = cop_schedule(&inst).unwrap().unwrap();
        assert_eq!(s.repairs, 0);
        let w = solve_cop_1tw_cycle(&inst).unwrap().unwrap();
        assert_eq!(w.visits, vec![(0, 0), (1, 1), (2, 2), (0, 3), (1, 4)]);
    }

    #[test]
    fn one_repair_waits_at_third_vertex() {
        let inst = unit_cycle(&[(0, 20, 1), (4, 4, 1), (6, 6, 1)], 20);
        let s = cop_schedule(&inst).unwrap().unwrap();
        assert_eq!(s.repairs, 1);
        // third vertex held until 6 in the second round
        assert_eq!(s.get(2, 1), 6);
        assert_eq!(s.get(0, 2), 7);
        let w = solve_cop_1tw_cycle(&inst).unwrap().unwrap();
        assert!(w.visits.contains(&(2, 5)) && w.visits.contains(&(2, 6)));
    }

    #[test]
    fn eight_cycle_repair_raises_entry_to_release() {
        let mut wins = vec![(0, 40, 1); 8];
        wins[2] = (12, 13, 1);
        let inst = unit_cycle(&wins, 40);
        let s = cop_schedule(&inst).unwrap().unwrap();
        // no-wait visits to vertex 2 are at 2, 10, 18; round 1 is the last
        // one leaving before 12
        assert_eq!(s.get(2, 1), 12);
        assert_eq!(s.get(3, 1), 13);
        assert_eq!(s.get(2, 2), 20);
    }

    #[test]
    fn unreachable_window_is_infeasible() {
        let inst = unit_cycle(&[(0, 5, 1), (0, 0, 1), (0, 5, 1)], 5);
        assert!(solve_cop_1tw_cycle(&inst).unwrap().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn agrees_with_oracle_and_is_minimal(inst in random_cycle(5, 3, 6)) {
            let got = solve_cop_1tw_cycle(&inst).unwrap();
            let want = oracle_cop(&inst).unwrap();
            prop_assert_eq!(got.is_some(), want.is_some());
            if let Some(w) = &got {
                let rep = validate_walk(&inst, w);
                prop_assert!(rep.valid, "{:?}", rep.violation);
                prop_assert_eq!(rep.collected.len(), inst.n());
            }
            if let (Some(s), Some(ow)) = (cop_schedule(&inst).unwrap(), want) {
                let other = induced_schedule(&inst, &ow, s.rounds()).unwrap();
                prop_assert!(s.le(&other), "{:?} vs {:?}", s.rows(), other);
                prop_assert!(s.repairs <= inst.n() * s.rounds());
            }
        }
    }
}
