//! Instances, walks and the rules that tie them together.
//!
//! All times, costs and profits are integers. A walk is *canonical*: a
//! movement step over edge `e` takes exactly `c(e)` time units and waiting is
//! written out as a second visit of the same vertex.

mod json;
mod validate;
mod walk;

pub use json::{
    parse_decomposition, parse_instance, parse_solution, parse_walk, serialize_decomposition,
    serialize_instance, serialize_solution, serialize_walk, ParseError, ParseErrorKind,
};
pub use validate::{validate_instance, ValidationReport};
pub use walk::{validate_walk, Walk, WalkReport};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolveError};

pub type Time = i64;
pub type Cost = i64;
pub type Profit = i64;

/// Closed integer interval `[release, deadline]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeWindow {
    pub release: Time,
    pub deadline: Time,
}

impl TimeWindow {
    pub const fn new(release: Time, deadline: Time) -> Self {
        TimeWindow { release, deadline }
    }

    #[inline]
    pub fn contains(&self, t: Time) -> bool {
        self.release <= t && t <= self.deadline
    }

    /// `deadline - release`.
    #[inline]
    pub fn length(&self) -> Time {
        self.deadline - self.release
    }

    /// True when the closed intervals share at least one point.
    #[inline]
    pub fn intersects(&self, from: Time, to: Time) -> bool {
        self.release <= to && from <= self.deadline
    }

    #[inline]
    pub fn covers(&self, from: Time, to: Time) -> bool {
        self.release <= from && to <= self.deadline
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.release, self.deadline)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    DirectedPath,
    DirectedCycle,
    UndirectedPath,
    Tree,
    General,
}

impl Topology {
    pub fn is_directed(self) -> bool {
        matches!(self, Topology::DirectedPath | Topology::DirectedCycle)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::DirectedPath => "directed_path",
            Topology::DirectedCycle => "directed_cycle",
            Topology::UndirectedPath => "undirected_path",
            Topology::Tree => "tree",
            Topology::General => "general",
        }
    }

    pub fn parse(s: &str) -> Option<Topology> {
        Some(match s {
            "directed_path" => Topology::DirectedPath,
            "directed_cycle" => Topology::DirectedCycle,
            "undirected_path" => Topology::UndirectedPath,
            "tree" => Topology::Tree,
            "general" => Topology::General,
            _ => return None,
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VertexSpec {
    pub profit: Profit,
    pub windows: Vec<TimeWindow>,
}

impl VertexSpec {
    pub fn new(profit: Profit, windows: Vec<TimeWindow>) -> Self {
        VertexSpec { profit, windows }
    }

    pub fn plain(profit: Profit) -> Self {
        VertexSpec {
            profit,
            windows: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub cost: Cost,
    /// Activity intervals; `None` means the edge is always traversable.
    pub active: Option<Vec<TimeWindow>>,
}

impl EdgeSpec {
    pub fn new(u: usize, v: usize, cost: Cost) -> Self {
        EdgeSpec {
            u,
            v,
            cost,
            active: None,
        }
    }

    pub fn with_activity(mut self, active: Vec<TimeWindow>) -> Self {
        self.active = Some(active);
        self
    }

    /// Whether the whole traversal `[depart, depart + cost]` lies inside one
    /// activity interval.
    pub fn traversable_at(&self, depart: Time) -> bool {
        match &self.active {
            None => true,
            Some(iv) => iv.iter().any(|w| w.covers(depart, depart + self.cost)),
        }
    }

    /// Earliest departure `>= t` whose traversal fits an activity interval.
    pub fn earliest_departure(&self, t: Time) -> Option<Time> {
        match &self.active {
            None => Some(t),
            Some(iv) => iv
                .iter()
                .filter_map(|w| {
                    let dep = t.max(w.release);
                    (dep + self.cost <= w.deadline).then_some(dep)
                })
                .min(),
        }
    }
}

/// A tree decomposition as supplied by the user: bags of vertex ids and the
/// parent/child pairs connecting them.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RawDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub topology: Topology,
    pub start: usize,
    pub budget: Time,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    pub decomposition: Option<RawDecomposition>,
    /// Time-window semantics: when set, a vertex is collectible only inside
    /// one of its windows (windowless vertices are pass-through). When clear,
    /// every visited vertex is collected.
    pub timed: bool,
}

impl Instance {
    /// Builds an instance, inferring `timed` from the presence of windows.
    pub fn new(
        topology: Topology,
        start: usize,
        budget: Time,
        vertices: Vec<VertexSpec>,
        edges: Vec<EdgeSpec>,
    ) -> Self {
        let timed = vertices.iter().any(|v| !v.windows.is_empty());
        Instance {
            topology,
            start,
            budget,
            vertices,
            edges,
            decomposition: None,
            timed,
        }
    }

    /// Directed path `0 -> 1 -> ... -> n-1` with the given edge costs.
    pub fn directed_path(vertices: Vec<VertexSpec>, costs: &[Cost], budget: Time) -> Self {
        let edges = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| EdgeSpec::new(i, i + 1, c))
            .collect();
        Instance::new(Topology::DirectedPath, 0, budget, vertices, edges)
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`; `costs[i]` is the cost of
    /// the edge leaving vertex `i`.
    pub fn directed_cycle(vertices: Vec<VertexSpec>, costs: &[Cost], budget: Time) -> Self {
        let n = vertices.len();
        let edges = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| EdgeSpec::new(i, (i + 1) % n, c))
            .collect();
        Instance::new(Topology::DirectedCycle, 0, budget, vertices, edges)
    }

    pub fn undirected_path(
        vertices: Vec<VertexSpec>,
        costs: &[Cost],
        start: usize,
        budget: Time,
    ) -> Self {
        let edges = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| EdgeSpec::new(i, i + 1, c))
            .collect();
        Instance::new(Topology::UndirectedPath, start, budget, vertices, edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn profit(&self, v: usize) -> Profit {
        self.vertices[v].profit
    }

    pub fn total_profit(&self) -> Profit {
        self.vertices.iter().map(|v| v.profit).sum()
    }

    pub fn has_dynamic_edges(&self) -> bool {
        self.edges.iter().any(|e| e.active.is_some())
    }

    pub fn has_windows(&self) -> bool {
        self.vertices.iter().any(|v| !v.windows.is_empty())
    }

    /// Windows under which `v` can be collected, or `None` if `v` is
    /// collectible at any time (untimed instance).
    pub fn collect_windows(&self, v: usize) -> Option<&[TimeWindow]> {
        self.timed.then(|| self.vertices[v].windows.as_slice())
    }

    pub fn collectible_at(&self, v: usize, t: Time) -> bool {
        match self.collect_windows(v) {
            None => true,
            Some(ws) => ws.iter().any(|w| w.contains(t)),
        }
    }

    /// Whether being at `v` throughout `[from, to]` collects it.
    pub fn collectible_during(&self, v: usize, from: Time, to: Time) -> bool {
        match self.collect_windows(v) {
            None => true,
            Some(ws) => ws.iter().any(|w| w.intersects(from, to)),
        }
    }

    /// Sorts and merges windows, clips them to `[0, budget]` and drops the ones
    /// lying entirely past the budget. Activity intervals are sorted and
    /// overlapping ones merged. `timed` is left untouched.
    pub fn normalize(&mut self) {
        let budget = self.budget;
        for v in &mut self.vertices {
            let mut ws: Vec<TimeWindow> = v
                .windows
                .iter()
                .filter(|w| w.release <= budget && w.release <= w.deadline)
                .map(|w| TimeWindow::new(w.release.max(0), w.deadline.min(budget)))
                .collect();
            ws.sort();
            v.windows = merge_windows(ws, 1);
        }
        for e in &mut self.edges {
            if let Some(active) = &mut e.active {
                let mut iv: Vec<TimeWindow> = active
                    .iter()
                    .copied()
                    .filter(|w| w.release <= w.deadline)
                    .collect();
                iv.sort();
                *active = merge_windows(iv, 0);
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub(crate) fn require(&self, topology: Topology) -> Result<()> {
        if self.topology != topology {
            return Err(SolveError::WrongTopology {
                expected: topology.as_str(),
                found: self.topology.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let report = validate_instance(self);
        match report.issues.first() {
            None => Ok(()),
            Some(issue) => Err(SolveError::invalid(issue.clone())),
        }
    }

    pub(crate) fn require_untimed(&self) -> Result<()> {
        if self.has_windows() {
            return Err(SolveError::invalid(
                "vertex time windows present; this solver handles plain profits only",
            ));
        }
        Ok(())
    }

    /// Lookup table from an ordered vertex pair to the edge index.
    pub fn edge_index(&self) -> EdgeIndex {
        let directed = self.topology.is_directed();
        let mut map = HashMap::with_capacity(self.edges.len() * 2);
        for (i, e) in self.edges.iter().enumerate() {
            map.insert((e.u, e.v), i);
            if !directed {
                map.insert((e.v, e.u), i);
            }
        }
        EdgeIndex { map }
    }

    /// Adjacency lists `(neighbour, edge index)` respecting edge direction.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n()];
        let directed = self.topology.is_directed();
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            if !directed {
                adj[e.v].push((e.u, i));
            }
        }
        adj
    }
}

#[derive(Clone, Debug)]
pub struct EdgeIndex {
    map: HashMap<(usize, usize), usize>,
}

impl EdgeIndex {
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.map.get(&(u, v)).copied()
    }
}

/// Merges sorted windows; two windows are joined when the gap between them is
/// smaller than `slack` (1 joins integer-adjacent windows, 0 only overlapping
/// or touching ones).
fn merge_windows(sorted: Vec<TimeWindow>, slack: Time) -> Vec<TimeWindow> {
    let mut out: Vec<TimeWindow> = Vec::with_capacity(sorted.len());
    for w in sorted {
        match out.last_mut() {
            Some(last) if w.release <= last.deadline.saturating_add(slack) => {
                last.deadline = last.deadline.max(w.deadline);
            }
            _ => out.push(w),
        }
    }
    out
}

/// Solver output: the claimed profit, a witness walk and the algorithm tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub profit: Profit,
    pub walk: Walk,
    pub algorithm: String,
}

impl Solution {
    /// Scores `walk` against `inst` and records the recomputed profit.
    pub(crate) fn scored(inst: &Instance, walk: Walk, algorithm: &str) -> Solution {
        let report = validate_walk(inst, &walk);
        debug_assert!(report.valid, "{algorithm} produced invalid walk: {:?}", report.violation);
        Solution {
            profit: report.profit,
            walk,
            algorithm: algorithm.to_string(),
        }
    }
}
