//! Workouts: walks in which every `k` consecutive rounds contain a sprint,
//! a round that never waits and so takes exactly `C`.
//!
//! A `k`-workout splits into pieces, each at most `k - 1` free rounds that
//! return to vertex 0 followed by one sprint. Pieces are edges of a DAG over
//! the times at which a sprint may end. A piece starting at `t` ignores the
//! vertices the previous sprint (the no-wait round ending at `t`) already
//! passes inside their windows, and its free part ignores the vertices its
//! own sprint will pass, so no profit is counted twice.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use log::debug;

use super::subset::SubsetDp;
use super::{compress_deadlines, zero_length_walk, CycleView};
use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, Walk};

pub const MAX_WORKOUT: usize = 6;
const NODE_CAP: usize = 5_000;

/// A positive rational accuracy parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(SolveError::invalid("epsilon must be positive"));
        }
        Ok(Epsilon { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// `ceil(1 / epsilon)`.
    pub fn ceil_inverse(&self) -> u64 {
        self.den.div_ceil(self.num)
    }
}

impl FromStr for Epsilon {
    type Err = SolveError;

    /// Accepts `a/b`, an integer, or a decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || SolveError::invalid(format!("cannot read epsilon from {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Epsilon::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundInfo {
    /// Departure from vertex 0.
    pub start: Time,
    /// Return to vertex 0, or the end of the walk for a final partial round.
    pub end: Time,
    pub sprint: bool,
    pub complete: bool,
    pub collected: BTreeSet<usize>,
}

/// The rounds of a cycle walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SprintPlan {
    pub cycle_length: Time,
    pub rounds: Vec<RoundInfo>,
}

impl SprintPlan {
    /// Splits a walk into rounds at its departures from vertex 0.
    pub fn from_walk(inst: &Instance, walk: &Walk) -> Result<Self> {
        let view = CycleView::new(inst)?;
        let v = &walk.visits;
        let mut rounds = vec![];
        let mut k = 0;
        while k < v.len() {
            // last visit at vertex 0 before moving on
            let mut dep = k;
            while dep + 1 < v.len() && v[dep + 1].0 == 0 {
                dep += 1;
            }
            if dep + 1 >= v.len() {
                break;
            }
            let mut end = dep + 1;
            while end + 1 < v.len() && v[end].0 != 0 {
                end += 1;
            }
            let complete = v[end].0 == 0;
            let mut collected = BTreeSet::new();
            for i in dep..=end {
                let (x, t) = v[i];
                let until = if i < end && v[i + 1].0 == x { v[i + 1].1 } else { t };
                if view.profit[x] > 0 && inst.collectible_during(x, t, until) {
                    collected.insert(x);
                }
            }
            let (start, stop) = (v[dep].1, v[end].1);
            rounds.push(RoundInfo {
                start,
                end: stop,
                sprint: complete && stop - start == view.len,
                complete,
                collected,
            });
            k = end;
        }
        Ok(SprintPlan {
            cycle_length: view.len,
            rounds,
        })
    }

    /// Whether every `k` consecutive complete rounds include a sprint.
    pub fn is_k_workout(&self, k: usize) -> bool {
        let complete: Vec<bool> = self.rounds.iter().filter(|r| r.complete).map(|r| r.sprint).collect();
        k > 0 && complete.windows(k).all(|w| w.contains(&true))
    }
}

/// Optimal walk made only of `k`-sprints.
pub fn solve_k_workout(inst: &Instance, k: usize) -> Result<Solution> {
    Ok(solve_k_workout_plan(inst, k)?.0)
}

pub fn solve_k_workout_plan(inst: &Instance, k: usize) -> Result<(Solution, SprintPlan)> {
    if !(1..=MAX_WORKOUT).contains(&k) {
        return Err(SolveError::invalid(format!("k must be in 1..={MAX_WORKOUT}, got {k}")));
    }
    let view = CycleView::new(inst)?;
    let walk = if view.len == 0 {
        Walk::starting_at(0, 0)
    } else {
        Workouts::new(&view, k)?.best(false).1
    };
    let sol = Solution::scored(inst, walk, "cycle-workout");
    let plan = SprintPlan::from_walk(inst, &sol.walk)?;
    Ok((sol, plan))
}

/// `(1 + epsilon)`-approximation: the best `2k`-workout with
/// `k - 1 = ceil(1 / epsilon)`, optionally finished by up to `2k - 1` free
/// rounds.
pub fn ptas_op_1tw_cycle(inst: &Instance, epsilon: Epsilon) -> Result<Solution> {
    let k = epsilon.ceil_inverse() + 1;
    if k > 3 {
        return Err(SolveError::resource(format!(
            "epsilon {epsilon} needs k = {k} rounds per sprint; at most 3 supported"
        )));
    }
    let view = CycleView::new(inst)?;
    if view.len == 0 {
        let all: Vec<usize> = (0..view.n).collect();
        return Ok(Solution::scored(inst, zero_length_walk(&view, &all), "cycle-ptas"));
    }
    let (small, map) = compress_deadlines(inst)?;
    let sview = CycleView::new(&small)?;
    let (_, walk) = Workouts::new(&sview, 2 * k as usize)?.best(true);
    let walk = map.walk_to_original(inst, &walk);
    Ok(Solution::scored(inst, walk, "cycle-ptas"))
}

struct Workouts<'a> {
    view: &'a CycleView,
    k: usize,
    nodes: Vec<Time>,
}

#[derive(Clone, Copy)]
struct Link {
    from: usize,
    /// Closing station of the free part.
    station: usize,
    set: usize,
}

impl<'a> Workouts<'a> {
    fn new(view: &'a CycleView, k: usize) -> Result<Self> {
        let c = view.len;
        let b = view.budget;
        let mut nodes: BTreeSet<Time> = BTreeSet::new();
        let mut anchors = vec![0];
        for (l, w) in view.window.iter().enumerate() {
            if let Some(w) = w {
                anchors.push(w.release + view.arc(l, 0));
            }
        }
        for a in anchors {
            let mut t = a;
            while t <= b {
                nodes.insert(t);
                if nodes.len() > NODE_CAP {
                    return Err(SolveError::resource("too many candidate sprint times"));
                }
                t += c;
            }
        }
        Ok(Workouts {
            view,
            k,
            nodes: nodes.into_iter().collect(),
        })
    }

    /// Vertices a no-wait round leaving vertex 0 at `s` collects.
    fn hits(&self, s: Time) -> Vec<bool> {
        let v = self.view;
        let mut out: Vec<bool> = (0..v.n)
            .map(|i| v.profit[i] > 0 && v.window[i].is_some_and(|w| w.contains(s + v.pos[i])))
            .collect();
        out[0] |= v.profit[0] > 0 && v.window[0].is_some_and(|w| w.contains(s + v.len));
        out
    }

    fn previous_sprint(&self, t: Time) -> Vec<bool> {
        if t == 0 {
            vec![false; self.view.n]
        } else {
            self.hits(t - self.view.len)
        }
    }

    fn free_dp(&self, t: Time, end: Time, rounds: usize, excluded: &[bool]) -> SubsetDp {
        SubsetDp::run(self.view, t, end, rounds * self.view.n + 1, |v| !excluded[v])
    }

    /// Best workout; with `tail` the walk may end with up to `k - 1` free
    /// rounds after its last sprint.
    fn best(&self, tail: bool) -> (Profit, Walk) {
        let v = self.view;
        let c = v.len;
        let m = self.nodes.len();
        let mut dist: Vec<Option<(Profit, Option<Link>)>> = vec![None; m];
        dist[0] = Some((0, None));
        debug_assert_eq!(self.nodes[0], 0);
        for a in 0..m {
            let Some((base, _)) = dist[a] else { continue };
            let t = self.nodes[a];
            let before = self.previous_sprint(t);
            let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
            for b in a + 1..m {
                if self.nodes[b] >= t + c {
                    groups.entry(self.hits(self.nodes[b] - c)).or_default().push(b);
                }
            }
            for (sprint, ends) in groups {
                let excluded: Vec<bool> = (0..v.n).map(|i| before[i] || sprint[i]).collect();
                let gain: Profit = (0..v.n)
                    .filter(|&i| sprint[i] && !before[i])
                    .map(|i| v.profit[i])
                    .sum();
                let last = self.nodes[*ends.last().unwrap()] - c;
                let dp = self.free_dp(t, last, self.k - 1, &excluded);
                for b in ends {
                    let e = self.nodes[b] - c;
                    let Some((p, station, set)) = dp.best(e, true) else { continue };
                    let total = base + p + gain;
                    if dist[b].is_none_or(|d| total > d.0) {
                        dist[b] = Some((total, Some(Link { from: a, station, set })));
                    }
                }
            }
        }

        // empty walk, then every node with or without a tail
        let start_gain = if v.profit[0] > 0 && v.window[0].is_some_and(|w| w.contains(0)) {
            v.profit[0]
        } else {
            0
        };
        let mut best: (Profit, Option<usize>, bool) = (start_gain, Some(0), false);
        for (a, d) in dist.iter().enumerate() {
            let Some((p, _)) = *d else { continue };
            if a > 0 && p > best.0 {
                best = (p, Some(a), false);
            }
            if tail {
                let t = self.nodes[a];
                let dp = self.free_dp(t, v.budget, 2 * self.k - 1, &self.previous_sprint(t));
                if let Some((q, _, _)) = dp.best(v.budget, false) {
                    if p + q > best.0 {
                        best = (p + q, Some(a), true);
                    }
                }
            }
        }
        let (profit, node, with_tail) = best;
        debug!("workout k = {} profit {profit} over {m} nodes", self.k);
        let mut walk = self.rebuild(node.unwrap(), &dist);
        if with_tail {
            let t = self.nodes[node.unwrap()];
            let dp = self.free_dp(t, v.budget, 2 * self.k - 1, &self.previous_sprint(t));
            let (_, station, set) = dp.best(v.budget, false).unwrap();
            let plan = dp.plan(v.budget, station, set);
            append(&mut walk, &dp.walk(&plan, 0));
        }
        (profit, walk)
    }

    fn rebuild(&self, node: usize, dist: &[Option<(Profit, Option<Link>)>]) -> Walk {
        let v = self.view;
        let c = v.len;
        let mut chain = vec![];
        let mut at = node;
        while let Some((_, Some(link))) = dist[at] {
            chain.push((link, at));
            at = link.from;
        }
        chain.reverse();
        let mut walk = Walk::starting_at(0, 0);
        for (link, to) in chain {
            let t = self.nodes[link.from];
            let end = self.nodes[to];
            let before = self.previous_sprint(t);
            let sprint = self.hits(end - c);
            let excluded: Vec<bool> = (0..v.n).map(|i| before[i] || sprint[i]).collect();
            let dp = self.free_dp(t, end - c, self.k - 1, &excluded);
            let plan = dp.plan(end - c, link.station, link.set);
            append(&mut walk, &dp.walk(&plan, link.station));
            walk.wait_until(end - c);
            for i in 1..v.n {
                walk.step(i, end - c + v.pos[i]);
            }
            walk.step(0, end);
        }
        walk
    }
}

fn append(walk: &mut Walk, more: &Walk) {
    for &(x, t) in &more.visits {
        if walk.last() != Some((x, t)) {
            walk.visits.push((x, t));
        }
    }
}
