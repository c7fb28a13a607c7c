//! Exhaustive search for desk-sized instances of every variant.
//!
//! Label-setting search over states `(vertex, collected set, moves)` keyed by
//! earliest arrival time. An earlier arrival with the same collected set
//! dominates a later one since the walk may always wait, so only two kinds of
//! step are needed: move along an edge at its earliest feasible departure, or
//! wait at the current vertex until its next release.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use log::debug;

use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, Walk};

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub max_vertices: usize,
    /// Bits available for the collected set.
    pub max_tracked: usize,
    pub event_cap: usize,
    pub state_cap: usize,
    /// Upper bound on the number of edge traversals, if any.
    pub max_moves: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices: 16,
            max_tracked: 16,
            event_cap: 200_000,
            state_cap: 4_000_000,
            max_moves: None,
        }
    }
}

/// Candidate departure times: releases, deadlines, activity endpoints, 0 and
/// the budget, each shifted by every shortest-path distance, clipped to
/// `[0, budget]`.
pub fn event_times(inst: &Instance) -> Result<BTreeSet<Time>> {
    event_times_capped(inst, OracleConfig::default().event_cap)
}

pub fn event_times_capped(inst: &Instance, cap: usize) -> Result<BTreeSet<Time>> {
    inst.require_valid()?;
    let budget = inst.budget;
    let mut base: BTreeSet<Time> = [0, budget].into_iter().collect();
    for v in &inst.vertices {
        for w in &v.windows {
            base.insert(w.release);
            base.insert(w.deadline);
        }
    }
    for e in &inst.edges {
        for w in e.active.iter().flatten() {
            base.extend([w.release, w.deadline, w.deadline - e.cost]);
        }
    }
    let dists: BTreeSet<Time> = all_pairs(inst).into_iter().flatten().flatten().collect();
    let mut out = BTreeSet::new();
    for &b in &base {
        for &d in &dists {
            for t in [b - d, b + d] {
                if (0..=budget).contains(&t) {
                    out.insert(t);
                }
            }
            if out.len() > cap {
                return Err(SolveError::resource(format!(
                    "more than {cap} event times"
                )));
            }
        }
    }
    Ok(out)
}

fn all_pairs(inst: &Instance) -> Vec<Vec<Option<Time>>> {
    let n = inst.n();
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for (u, list) in inst.adjacency().iter().enumerate() {
        for &(v, e) in list {
            let c = inst.edges[e].cost;
            if d[u][v].is_none_or(|x| c < x) {
                d[u][v] = Some(c);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|x| ik + kj < x) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

/// Best profit over all feasible walks, with a witness.
pub fn oracle_op(inst: &Instance) -> Result<Solution> {
    oracle_op_with(inst, &OracleConfig::default())
}

pub fn oracle_op_with(inst: &Instance, cfg: &OracleConfig) -> Result<Solution> {
    let tracked: Vec<usize> = (0..inst.n())
        .filter(|&v| inst.profit(v) > 0 && inst.collect_windows(v).is_none_or(|w| !w.is_empty()))
        .collect();
    let search = Search::new(inst, cfg, tracked)?;
    let walk = search.run(false)?.expect("start state is always reachable");
    Ok(Solution::scored(inst, walk, "oracle"))
}

/// A walk collecting every vertex, if one exists.
pub fn oracle_cop(inst: &Instance) -> Result<Option<Walk>> {
    oracle_cop_with(inst, &OracleConfig::default())
}

pub fn oracle_cop_with(inst: &Instance, cfg: &OracleConfig) -> Result<Option<Walk>> {
    let tracked: Vec<usize> = (0..inst.n()).collect();
    let search = Search::new(inst, cfg, tracked)?;
    if (0..inst.n()).any(|v| inst.collect_windows(v).is_some_and(|w| w.is_empty())) {
        return Ok(None);
    }
    search.run(true)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Key {
    v: usize,
    mask: u32,
    moves: u32,
}

#[derive(Clone, Copy)]
struct Label {
    time: Time,
    /// Predecessor and, for movements, the departure time.
    parent: Option<(Key, Option<Time>)>,
}

struct Search<'a> {
    inst: &'a Instance,
    cfg: &'a OracleConfig,
    tracked: Vec<usize>,
    bit: Vec<Option<u32>>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cfg: &'a OracleConfig, tracked: Vec<usize>) -> Result<Self> {
        inst.require_valid()?;
        if inst.n() > cfg.max_vertices {
            return Err(SolveError::resource(format!(
                "oracle handles at most {} vertices, got {}",
                cfg.max_vertices,
                inst.n()
            )));
        }
        if tracked.len() > cfg.max_tracked.min(31) {
            return Err(SolveError::resource(format!(
                "{} profitable vertices exceed the oracle's set size",
                tracked.len()
            )));
        }
        event_times_capped(inst, cfg.event_cap)?;
        let mut bit = vec![None; inst.n()];
        for (i, &v) in tracked.iter().enumerate() {
            bit[v] = Some(i as u32);
        }
        Ok(Search {
            inst,
            cfg,
            tracked,
            bit,
            adj: inst.adjacency(),
        })
    }

    fn gain(&self, v: usize, from: Time, to: Time) -> u32 {
        match self.bit[v] {
            Some(b) if self.inst.collectible_during(v, from, to) => 1 << b,
            _ => 0,
        }
    }

    fn profit(&self, mask: u32) -> Profit {
        self.tracked
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| self.inst.profit(v))
            .sum()
    }

    /// Runs the search. In cover mode it stops at the first state holding
    /// every tracked vertex and returns `None` if there is none; otherwise it
    /// returns a walk to a most profitable state.
    fn run(&self, cover: bool) -> Result<Option<Walk>> {
        let inst = self.inst;
        let full: u32 = if self.tracked.is_empty() {
            0
        } else {
            u32::MAX >> (32 - self.tracked.len())
        };
        let start = Key {
            v: inst.start,
            mask: self.gain(inst.start, 0, 0),
            moves: 0,
        };
        let mut labels: HashMap<Key, Label> = HashMap::new();
        labels.insert(start, Label { time: 0, parent: None });
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0, start)));
        let mut best = (self.profit(start.mask), start);
        let mut settled = 0usize;

        while let Some(Reverse((t, key))) = heap.pop() {
            if labels[&key].time < t {
                continue;
            }
            settled += 1;
            if settled > self.cfg.state_cap {
                return Err(SolveError::resource("oracle state cap exceeded"));
            }
            if cover && key.mask == full {
                return Ok(Some(self.walk_to(&labels, key)));
            }
            let p = self.profit(key.mask);
            if p > best.0 {
                best = (p, key);
            }

            let mut relax = |next: Key, time: Time, parent: (Key, Option<Time>)| {
                let better = labels.get(&next).is_none_or(|l| time < l.time);
                if better {
                    labels.insert(next, Label { time, parent: Some(parent) });
                    heap.push(Reverse((time, next)));
                }
            };

            // wait for the next release of this vertex
            if let (Some(b), Some(ws)) = (self.bit[key.v], inst.collect_windows(key.v)) {
                if key.mask >> b & 1 == 0 {
                    if let Some(r) = ws
                        .iter()
                        .map(|w| w.release)
                        .filter(|&r| r > t && r <= inst.budget)
                        .min()
                    {
                        relax(Key { mask: key.mask | 1 << b, ..key }, r, (key, None));
                    }
                }
            }

            if self.cfg.max_moves.is_some_and(|m| key.moves as usize >= m) {
                continue;
            }
            for &(w, e) in &self.adj[key.v] {
                let edge = &inst.edges[e];
                let Some(dep) = edge.earliest_departure(t) else { continue };
                let arr = dep + edge.cost;
                if arr > inst.budget {
                    continue;
                }
                let next = Key {
                    v: w,
                    mask: key.mask | self.gain(w, arr, arr),
                    moves: key.moves + u32::from(self.cfg.max_moves.is_some()),
                };
                relax(next, arr, (key, Some(dep)));
            }
        }
        debug!("oracle settled {settled} states");
        if cover {
            return Ok(None);
        }
        Ok(Some(self.walk_to(&labels, best.1)))
    }

    fn walk_to(&self, labels: &HashMap<Key, Label>, end: Key) -> Walk {
        let mut chain = vec![];
        let mut cur = end;
        loop {
            let label = labels[&cur];
            chain.push((cur, label.time, label.parent.and_then(|p| p.1)));
            match label.parent {
                Some((prev, _)) => cur = prev,
                None => break,
            }
        }
        chain.reverse();
        let mut walk = Walk::starting_at(chain[0].0.v, chain[0].1);
        for &(key, time, dep) in &chain[1..] {
            if let Some(dep) = dep {
                walk.wait_until(dep);
                walk.step(key.v, time);
            } else {
                walk.wait_until(time);
            }
        }
        walk
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_walk, EdgeSpec, TimeWindow, Topology, VertexSpec};
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Independent check: walk every integer time step, either waiting one
    /// unit or departing along any traversable edge.
    fn grid_best(inst: &Instance) -> Profit {
        let n = inst.n();
        let b = inst.budget as usize;
        let collect = |v: usize, from: Time, to: Time| -> u64 {
            if inst.collectible_during(v, from, to) {
                1 << v
            } else {
                0
            }
        };
        let adj = inst.adjacency();
        let mut buckets: Vec<HashSet<(usize, u64)>> = vec![HashSet::new(); b + 1];
        buckets[0].insert((inst.start, collect(inst.start, 0, 0)));
        let mut best = 0;
        for t in 0..=b {
            let mut todo: Vec<(usize, u64)> = buckets[t].iter().copied().collect();
            while let Some((v, mask)) = todo.pop() {
                let p = (0..n).filter(|&u| mask >> u & 1 == 1).map(|u| inst.profit(u)).sum();
                best = best.max(p);
                if t < b {
                    buckets[t + 1].insert((v, mask | collect(v, t as Time, t as Time + 1)));
                }
                for &(w, e) in &adj[v] {
                    let edge = &inst.edges[e];
                    let arr = t + edge.cost as usize;
                    if arr <= b && edge.traversable_at(t as Time) {
                        let s = (w, mask | collect(w, arr as Time, arr as Time));
                        if buckets[arr].insert(s) && arr == t {
                            todo.push(s);
                        }
                    }
                }
            }
        }
        best
    }

    fn small_graph() -> impl Strategy<Value = Instance> {
        (2..6usize, 0..16i64).prop_flat_map(|(n, budget)| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u < v)
                .collect();
            let edges = proptest::collection::vec(
                (proptest::sample::select(pairs), 0..4i64, proptest::option::weighted(0.3, (0..12i64, 0..6i64))),
                1..8,
            );
            let windows = proptest::collection::vec((0..12i64, 0..5i64), 0..3);
            let verts = proptest::collection::vec((0..5i64, windows), n);
            (Just(budget), verts, edges)
        })
        .prop_map(|(budget, verts, edges)| {
            let vertices = verts
                .into_iter()
                .map(|(p, ws)| {
                    VertexSpec::new(p, ws.into_iter().map(|(r, l)| TimeWindow::new(r, r + l)).collect())
                })
                .collect();
            let mut seen = HashSet::new();
            let edges = edges
                .into_iter()
                .filter(|&((u, v), _, _)| seen.insert((u, v)))
                .map(|((u, v), c, act)| {
                    let e = EdgeSpec::new(u, v, c);
                    match act {
                        Some((r, l)) => e.with_activity(vec![TimeWindow::new(r, r + l + c)]),
                        None => e,
                    }
                })
                .collect();
            let mut inst = Instance::new(Topology::General, 0, budget, vertices, edges);
            inst.normalize();
            inst
        })
    }

    #[test]
    fn path_example() {
        let inst = Instance::directed_path(
            vec![
                VertexSpec::new(1, vec![TimeWindow::new(0, 0)]),
                VertexSpec::new(5, vec![TimeWindow::new(0, 1)]),
                VertexSpec::new(2, vec![TimeWindow::new(5, 9)]),
            ],
            &[2, 3],
            9,
        );
        let sol = oracle_op(&inst).unwrap();
        assert_eq!(sol.profit, 3);
        assert!(validate_walk(&inst, &sol.walk).valid);
    }

    #[test]
    fn trivial_budgets_and_profits() {
        let mut inst = Instance::directed_path(
            vec![VertexSpec::plain(4), VertexSpec::plain(9)],
            &[1],
            0,
        );
        assert_eq!(oracle_op(&inst).unwrap().profit, 4);
        inst.vertices[1].windows = vec![TimeWindow::new(0, 0)];
        inst.timed = true;
        assert_eq!(oracle_op(&inst).unwrap().profit, 0);
        let zero = Instance::directed_path(vec![VertexSpec::plain(0); 3], &[1, 1], 5);
        assert_eq!(oracle_op(&zero).unwrap().profit, 0);
    }

    fn unit_cycle(windows: [(Time, Time); 3], budget: Time) -> Instance {
        Instance::directed_cycle(
            windows
                .iter()
                .map(|&(r, d)| VertexSpec::new(1, vec![TimeWindow::new(r, d)]))
                .collect(),
            &[1, 1, 1],
            budget,
        )
    }

    #[test]
    fn cycle_cop_examples() {
        let a = unit_cycle([(0, 10), (4, 4), (2, 2)], 12);
        let w = oracle_cop(&a).unwrap().expect("coverable");
        assert_eq!(validate_walk(&a, &w).collected.len(), 3);
        let b = unit_cycle([(0, 20), (4, 4), (6, 6)], 20);
        assert!(oracle_cop(&b).unwrap().is_some());
        let c = unit_cycle([(0, 0), (0, 0), (5, 5)], 12);
        assert!(oracle_cop(&c).unwrap().is_none());
    }

    #[test]
    fn untimed_cover_with_enough_budget() {
        let inst = Instance::new(
            Topology::Tree,
            0,
            8,
            vec![VertexSpec::plain(1); 4],
            vec![EdgeSpec::new(0, 1, 1), EdgeSpec::new(0, 2, 1), EdgeSpec::new(2, 3, 2)],
        );
        assert!(oracle_cop(&inst).unwrap().is_some());
    }

    #[test]
    fn move_limit_restricts() {
        let inst = unit_cycle([(0, 30), (0, 30), (0, 30)], 30);
        let cfg = OracleConfig {
            max_moves: Some(1),
            ..OracleConfig::default()
        };
        assert_eq!(oracle_op_with(&inst, &cfg).unwrap().profit, 2);
        assert_eq!(oracle_op(&inst).unwrap().profit, 3);
    }

    #[test]
    fn event_times_examples() {
        let plain = Instance::directed_path(vec![VertexSpec::plain(1); 3], &[2, 3], 10);
        let ev = event_times(&plain).unwrap();
        for t in [0, 2, 5, 10] {
            assert!(ev.contains(&t));
        }
        let inst = Instance::directed_path(
            vec![
                VertexSpec::plain(0),
                VertexSpec::new(1, vec![TimeWindow::new(3, 5)]),
                VertexSpec::plain(0),
            ],
            &[1, 1],
            8,
        );
        let ev = event_times(&inst).unwrap();
        for t in 1..=7 {
            assert!(ev.contains(&t), "{t}");
        }
        assert!(matches!(
            event_times_capped(&inst, 2),
            Err(SolveError::ResourceLimit(_))
        ));
    }

    #[test]
    fn too_many_vertices() {
        let inst = Instance::directed_path(vec![VertexSpec::plain(1); 20], &[1; 19], 5);
        assert!(matches!(oracle_op(&inst), Err(SolveError::ResourceLimit(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn agrees_with_time_grid(inst in small_graph()) {
            let sol = oracle_op(&inst).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            prop_assert_eq!(rep.profit, sol.profit);
            prop_assert_eq!(sol.profit, grid_best(&inst));
        }

        #[test]
        fn cover_witness_collects_all(inst in small_graph()) {
            if let Some(w) = oracle_cop(&inst).unwrap() {
                let rep = validate_walk(&inst, &w);
                prop_assert!(rep.valid);
                prop_assert_eq!(rep.collected.len(), inst.n());
            }
        }
    }
}
