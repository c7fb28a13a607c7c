//! Directed cycles with one time window per vertex.
//!
//! Vertices are indexed in cycle order with the start at 0; `pos(i)` is the
//! travel cost from vertex 0 to vertex `i` and `C` the length of the whole
//! cycle. A *round* runs from vertex 0 back to vertex 0.

mod approx;
mod cop;
mod rounds;
mod subset;
mod workout;

pub use approx::approx2_op_1tw_cycle;
pub use cop::{cop_schedule, induced_schedule, solve_cop_1tw_cycle, Schedule};
pub use rounds::solve_k_rounds;
pub use subset::{solve_op_1tw_cycle_fpt, solve_op_1tw_cycle_fpt_with};
pub use workout::{
    ptas_op_1tw_cycle, solve_k_workout, solve_k_workout_plan, Epsilon, RoundInfo, SprintPlan,
};

use crate::error::{Result, SolveError};
use crate::model::{EdgeSpec, Instance, Profit, Solution, Time, TimeWindow, Topology, VertexSpec, Walk};
use crate::path::{plan_to_walk, run_dp, Station};

/// Largest unwrapped path we are willing to build.
pub const UNWRAP_LIMIT: usize = 10_000_000;

/// Validated read-only view of a single-window cycle instance.
#[derive(Clone, Debug)]
pub(crate) struct CycleView {
    pub n: usize,
    pub budget: Time,
    /// `cost[i]` is the cost of the edge `i -> i+1 mod n`.
    pub cost: Vec<Time>,
    pub pos: Vec<Time>,
    pub len: Time,
    pub profit: Vec<Profit>,
    /// The collecting window; `None` for uncollectible vertices.
    pub window: Vec<Option<TimeWindow>>,
}

impl CycleView {
    pub fn new(inst: &Instance) -> Result<Self> {
        inst.require(Topology::DirectedCycle)?;
        if inst.n() < 2 {
            return Err(SolveError::invalid("topology mismatch: cycle requires n >= 2"));
        }
        inst.require_valid()?;
        let n = inst.n();
        let mut cost = vec![0; n];
        for e in &inst.edges {
            cost[e.u] = e.cost;
        }
        let mut pos = vec![0; n];
        for i in 1..n {
            pos[i] = pos[i - 1] + cost[i - 1];
        }
        let len = pos[n - 1] + cost[n - 1];
        let mut window = Vec::with_capacity(n);
        for v in 0..n {
            match inst.collect_windows(v) {
                None => window.push(Some(TimeWindow::new(0, inst.budget))),
                Some([]) => window.push(None),
                Some([w]) => window.push(Some(*w)),
                Some(_) => {
                    return Err(SolveError::invalid(format!(
                        "vertex {v} has several windows; cycle solvers take one window per vertex"
                    )))
                }
            }
        }
        Ok(CycleView {
            n,
            budget: inst.budget,
            cost,
            pos,
            len,
            profit: inst.vertices.iter().map(|v| v.profit).collect(),
            window,
        })
    }

    /// Cost of going forward from `i` to `j` (0 when `i == j`).
    pub fn arc(&self, i: usize, j: usize) -> Time {
        if j >= i {
            self.pos[j] - self.pos[i]
        } else {
            self.len - self.pos[i] + self.pos[j]
        }
    }

    /// Whether the window of `v` is at least as long as the cycle.
    pub fn is_long(&self, v: usize) -> bool {
        self.window[v].is_some_and(|w| w.length() >= self.len)
    }

    pub fn max_deadline(&self) -> Time {
        self.window.iter().flatten().map(|w| w.deadline).max().unwrap_or(0)
    }

    /// Unwrapped stations `0..count`: station `k` is vertex `k mod n` in
    /// round `k / n`, reached after cost `pos + C * round`.
    pub fn stations(&self, count: usize, profit: impl Fn(usize) -> Profit) -> Vec<Station> {
        (0..count)
            .map(|k| {
                let v = k % self.n;
                Station {
                    vertex: v,
                    offset: self.pos[v] + self.len * (k / self.n) as Time,
                    profit: profit(v),
                    windows: self.window[v].into_iter().collect(),
                }
            })
            .collect()
    }

    /// Number of rounds after which no window can be reached any more.
    pub fn useful_rounds(&self) -> usize {
        (self.max_deadline().min(self.budget) / self.len) as usize + 1
    }

    /// Stations `0..count` would exceed the unwrap guard.
    pub fn check_unwrap(&self, rounds: usize) -> Result<usize> {
        rounds
            .checked_mul(self.n)
            .filter(|&m| m <= UNWRAP_LIMIT)
            .ok_or_else(|| SolveError::resource(format!("{rounds} rounds of {} vertices", self.n)))
    }
}

/// Walk for a cycle of length 0: every vertex is reachable at any time, so
/// visit the chosen vertices in release order and wait for each release.
pub(crate) fn zero_length_walk(view: &CycleView, chosen: &[usize]) -> Walk {
    let mut order: Vec<usize> = chosen.iter().copied().filter(|&v| view.window[v].is_some()).collect();
    order.sort_by_key(|&v| (view.window[v].unwrap().release, v));
    let mut walk = Walk::starting_at(0, 0);
    let mut at = 0;
    let mut now = 0;
    for v in order {
        while at != v {
            at = (at + 1) % view.n;
            walk.step(at, now);
        }
        let r = view.window[v].unwrap().release;
        if r > now {
            now = r;
            walk.wait_until(now);
        }
    }
    walk
}

/// Maps times of a compressed instance back to the original time axis.
///
/// Anchors are the event times of the original instance and their images.
/// Inside a shrunk gap a time keeps its distance to the left event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeMap {
    /// `(compressed, original)` pairs, strictly increasing in both.
    anchors: Vec<(Time, Time)>,
}

impl TimeMap {
    pub fn identity() -> Self {
        TimeMap {
            anchors: vec![(0, 0)],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.anchors.iter().all(|(a, b)| a == b)
    }

    pub fn anchors(&self) -> &[(Time, Time)] {
        &self.anchors
    }

    pub fn to_original(&self, t: Time) -> Time {
        let k = self.anchors.partition_point(|&(c, _)| c <= t).max(1) - 1;
        let (c, o) = self.anchors[k];
        o + (t - c)
    }

    /// Image of an original time; exact for event times, clamped inside
    /// shrunk gaps.
    pub fn to_compressed(&self, t: Time) -> Time {
        let k = self.anchors.partition_point(|&(_, o)| o <= t).max(1) - 1;
        let (c, o) = self.anchors[k];
        let step = match self.anchors.get(k + 1) {
            Some(&(c2, _)) => (t - o).min(c2 - c),
            None => t - o,
        };
        c + step
    }

    /// Rewrites a walk of the compressed instance onto `original`.
    pub fn walk_to_original(&self, original: &Instance, walk: &Walk) -> Walk {
        let mapped = Walk::new(walk.visits.iter().map(|&(v, t)| (v, self.to_original(t))).collect());
        mapped.canonicalize(original)
    }
}

/// Shrinks every gap longer than `2C` between consecutive event times
/// (0, the budget, every release and deadline) down to exactly `2C`.
pub fn compress_deadlines(inst: &Instance) -> Result<(Instance, TimeMap)> {
    let view = CycleView::new(inst)?;
    if view.len == 0 {
        return Err(SolveError::invalid("cycle of length 0 cannot be compressed"));
    }
    let mut events: Vec<Time> = vec![0, inst.budget];
    for w in view.window.iter().flatten() {
        events.push(w.release);
        events.push(w.deadline);
    }
    events.sort_unstable();
    events.dedup();
    let cap = 2 * view.len;
    let mut anchors = Vec::with_capacity(events.len());
    let mut prev: Option<(Time, Time)> = None;
    for e in events {
        let c = match prev {
            None => e,
            Some((pc, pe)) => pc + (e - pe).min(cap),
        };
        anchors.push((c, e));
        prev = Some((c, e));
    }
    let map = TimeMap { anchors };
    let mut out = inst.clone();
    out.budget = map.to_compressed(inst.budget);
    for v in &mut out.vertices {
        for w in &mut v.windows {
            *w = TimeWindow::new(map.to_compressed(w.release), map.to_compressed(w.deadline));
        }
    }
    Ok((out, map))
}

/// The cycle cut open at vertex 0 and repeated `rounds` times.
pub fn unwrap_cycle(inst: &Instance, rounds: usize) -> Result<Instance> {
    inst.require(Topology::DirectedCycle)?;
    if rounds == 0 {
        return Err(SolveError::invalid("rounds must be at least 1"));
    }
    let n = inst.n();
    let m = rounds
        .checked_mul(n)
        .filter(|&m| m <= UNWRAP_LIMIT)
        .ok_or_else(|| SolveError::resource(format!("{rounds} rounds of {n} vertices")))?;
    let mut cost = vec![0; n];
    for e in &inst.edges {
        cost[e.u] = e.cost;
    }
    let vertices: Vec<VertexSpec> = (0..m).map(|k| inst.vertices[k % n].clone()).collect();
    let edges: Vec<EdgeSpec> = (0..m.saturating_sub(1))
        .map(|k| EdgeSpec::new(k, k + 1, cost[k % n]))
        .collect();
    let mut out = Instance::new(Topology::DirectedPath, 0, inst.budget, vertices, edges);
    out.timed = inst.timed;
    Ok(out)
}

/// Exact optimum when every window is shorter than the cycle.
pub fn solve_op_1tw_cycle_short(inst: &Instance) -> Result<Solution> {
    let view = CycleView::new(inst)?;
    if view.len == 0 {
        if view.window.iter().any(Option::is_some) {
            return Err(SolveError::invalid(
                "cycle of length 0 has only long windows; use the fpt or approx solver",
            ));
        }
        return Ok(Solution::scored(inst, Walk::starting_at(0, 0), "cycle-short"));
    }
    if let Some(v) = (0..view.n).find(|&v| view.is_long(v)) {
        return Err(SolveError::invalid(format!(
            "vertex {v}: window length ≥ C, the cycle length; use the fpt or approx solver"
        )));
    }
    let (small, map) = compress_deadlines(inst)?;
    let sview = CycleView::new(&small)?;
    let walk = short_walk(&sview, |v| sview.profit[v])?;
    let walk = map.walk_to_original(inst, &walk);
    Ok(Solution::scored(inst, walk, "cycle-short"))
}

/// Path DP over the unwrapped cycle. Correct when the vertices with positive
/// `profit` all have windows shorter than the cycle.
pub(crate) fn short_walk(view: &CycleView, profit: impl Fn(usize) -> Profit) -> Result<Walk> {
    let count = view.check_unwrap(view.useful_rounds())?;
    let stations = view.stations(count, profit);
    let plan = run_dp(&stations, view.budget);
    Ok(plan_to_walk(&stations, &plan, 0, 0))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::validate_walk;
    use crate::oracle::{oracle_cop, oracle_op};
    use proptest::prelude::*;

    pub fn unit_cycle(windows: &[(Time, Time, Profit)], budget: Time) -> Instance {
        Instance::directed_cycle(
            windows
                .iter()
                .map(|&(r, d, p)| VertexSpec::new(p, vec![TimeWindow::new(r, d)]))
                .collect(),
            &vec![1; windows.len()],
            budget,
        )
    }

    /// Random single-window cycles; `max_len` bounds window lengths.
    pub fn random_cycle(max_n: usize, max_cost: Time, max_len: Time) -> impl Strategy<Value = Instance> {
        (2..=max_n, 0..30i64).prop_flat_map(move |(n, budget)| {
            (
                proptest::collection::vec(1..=max_cost, n),
                proptest::collection::vec((0..30i64, 0..=max_len, 0..6i64, 0..8u8), n),
                Just(budget),
            )
        })
        .prop_map(|(costs, verts, budget)| {
            let vertices = verts
                .into_iter()
                .map(|(r, l, p, hole)| {
                    let ws = if hole == 0 { vec![] } else { vec![TimeWindow::new(r, r + l)] };
                    VertexSpec::new(p, ws)
                })
                .collect();
            Instance::directed_cycle(vertices, &costs, budget).normalized()
        })
    }

    #[test]
    fn compress_example() {
        let inst = Instance::directed_cycle(
            vec![
                VertexSpec::new(1, vec![TimeWindow::new(0, 100)]),
                VertexSpec::new(1, vec![TimeWindow::new(200, 300)]),
            ],
            &[1, 1],
            300,
        );
        let (small, map) = compress_deadlines(&inst).unwrap();
        assert_eq!(small.vertices[0].windows, vec![TimeWindow::new(0, 4)]);
        assert_eq!(small.vertices[1].windows, vec![TimeWindow::new(8, 12)]);
        assert_eq!(small.budget, 12);
        assert_eq!(map.to_original(8), 200);
        assert_eq!(map.to_original(5), 101);
    }

    #[test]
    fn compress_identity_when_gaps_small() {
        let inst = unit_cycle(&[(0, 2), (3, 5), (6, 9)].map(|(r, d)| (r, d, 1)), 10);
        let (small, map) = compress_deadlines(&inst).unwrap();
        assert_eq!(small, inst);
        assert!(map.is_identity());
    }

    #[test]
    fn degenerate_loop_rejected() {
        let inst = Instance::directed_cycle(vec![VertexSpec::plain(1)], &[1], 3);
        let err = compress_deadlines(&inst).unwrap_err();
        assert!(err.to_string().contains("cycle requires n >= 2"), "{err}");
    }

    #[test]
    fn unwrap_shapes() {
        let inst = unit_cycle(&[(0, 1, 1); 3], 5);
        let p = unwrap_cycle(&inst, 2).unwrap();
        assert_eq!(p.n(), 6);
        assert!(p.edges.iter().all(|e| e.cost == 1));
        assert!(crate::model::validate_instance(&p).is_valid());
        assert_eq!(unwrap_cycle(&inst, 1).unwrap().n(), 3);
        assert!(matches!(
            unwrap_cycle(&inst, 4_000_000),
            Err(SolveError::ResourceLimit(_))
        ));
    }

    #[test]
    fn short_examples() {
        let inst = unit_cycle(&[(0, 0, 1), (4, 4, 1), (2, 2, 1)], 12);
        assert_eq!(solve_op_1tw_cycle_short(&inst).unwrap().profit, 3);
        let late = unit_cycle(&[(0, 0, 0), (4, 4, 7), (0, 0, 0)], 12);
        assert_eq!(solve_op_1tw_cycle_short(&late).unwrap().profit, 7);
        let start_only = unit_cycle(&[(0, 0, 2), (0, 0, 5), (0, 0, 5)], 12);
        assert_eq!(solve_op_1tw_cycle_short(&start_only).unwrap().profit, 2);
        let long = unit_cycle(&[(0, 5, 1), (0, 0, 1), (0, 0, 1)], 12);
        assert!(solve_op_1tw_cycle_short(&long).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn compression_bound_and_soundness(inst in random_cycle(5, 4, 12)) {
            let (small, map) = compress_deadlines(&inst).unwrap();
            let n = inst.n() as Time;
            let c = CycleView::new(&inst).unwrap().len;
            let dmax = small.vertices.iter().flat_map(|v| &v.windows).map(|w| w.deadline).max().unwrap_or(0);
            prop_assert!(dmax <= 4 * n * c);
            prop_assert!(crate::model::validate_instance(&small).is_valid());
            let a = oracle_op(&inst).unwrap().profit;
            let b = oracle_op(&small).unwrap();
            prop_assert_eq!(a, b.profit);
            let back = map.walk_to_original(&inst, &b.walk);
            prop_assert!(validate_walk(&inst, &back).profit >= b.profit);
            prop_assert_eq!(oracle_cop(&inst).unwrap().is_some(), oracle_cop(&small).unwrap().is_some());
        }

        #[test]
        fn short_matches_oracle(inst in random_cycle(5, 4, 3)) {
            match solve_op_1tw_cycle_short(&inst) {
                Ok(sol) => {
                    let rep = validate_walk(&inst, &sol.walk);
                    prop_assert!(rep.valid, "{:?}", rep.violation);
                    prop_assert_eq!(sol.profit, oracle_op(&inst).unwrap().profit);
                }
                Err(e) => prop_assert!(e.to_string().contains("window length ≥ C")),
            }
        }
    }
}
