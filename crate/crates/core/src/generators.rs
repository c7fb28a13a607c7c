//! Random instances and the instances produced by the hardness reductions,
//! together with builders that turn a certificate into a witness walk.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SolveError};
use crate::model::{Cost, EdgeSpec, Instance, Profit, Time, TimeWindow, Topology, VertexSpec, Walk};

#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub topology: Topology,
    pub n: usize,
    /// Inclusive.
    pub cost_range: (Cost, Cost),
    pub profit_range: (Profit, Profit),
    pub windows_per_vertex: usize,
    /// Longest window length.
    pub window_span: Time,
    /// Budget as a multiple of the total edge cost.
    pub budget_factor: f64,
    pub dynamic: bool,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            topology: Topology::DirectedPath,
            n: 6,
            cost_range: (1, 4),
            profit_range: (0, 5),
            windows_per_vertex: 1,
            window_span: 6,
            budget_factor: 0.8,
            dynamic: false,
        }
    }
}

pub fn gen_random(params: &RandomParams, seed: u64) -> Result<Instance> {
    let p = params;
    let bad = |msg: &str| Err(SolveError::invalid(msg.to_string()));
    if p.n == 0 {
        return bad("n must be at least 1");
    }
    if p.topology == Topology::DirectedCycle && p.n < 2 {
        return bad("topology mismatch: cycle requires n >= 2");
    }
    if p.cost_range.0 < 0 || p.cost_range.0 > p.cost_range.1 {
        return bad("cost range must satisfy 0 <= lo <= hi");
    }
    if p.profit_range.0 < 0 || p.profit_range.0 > p.profit_range.1 {
        return bad("profit range must satisfy 0 <= lo <= hi");
    }
    if p.window_span < 0 {
        return bad("window span must be non-negative");
    }
    if !p.budget_factor.is_finite() || p.budget_factor < 0.0 {
        return bad("budget factor must be a non-negative number");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n;
    let mut cost = || rng.gen_range(p.cost_range.0..=p.cost_range.1);
    let mut pairs: Vec<(usize, usize)> = match p.topology {
        Topology::DirectedPath | Topology::UndirectedPath => (1..n).map(|i| (i - 1, i)).collect(),
        Topology::DirectedCycle => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        Topology::Tree | Topology::General => vec![],
    };
    let mut costs: Vec<Cost> = pairs.iter().map(|_| cost()).collect();
    if matches!(p.topology, Topology::Tree | Topology::General) {
        let mut seen = BTreeSet::new();
        for k in 1..n {
            let parent = rng.gen_range(0..k);
            pairs.push((parent, k));
            seen.insert((parent, k));
        }
        if p.topology == Topology::General {
            for _ in 0..n / 2 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let key = (a.min(b), a.max(b));
                if a != b && seen.insert(key) {
                    pairs.push(key);
                }
            }
        }
        costs = pairs.iter().map(|_| rng.gen_range(p.cost_range.0..=p.cost_range.1)).collect();
    }
    let total: Cost = costs.iter().sum();
    let budget = (p.budget_factor * total as f64).round() as Time;
    let start = match p.topology {
        Topology::UndirectedPath | Topology::Tree | Topology::General => rng.gen_range(0..n),
        _ => 0,
    };

    let vertices: Vec<VertexSpec> = (0..n)
        .map(|_| {
            let profit = rng.gen_range(p.profit_range.0..=p.profit_range.1);
            let windows = (0..p.windows_per_vertex)
                .map(|_| {
                    let r = rng.gen_range(0..=budget);
                    TimeWindow::new(r, r + rng.gen_range(0..=p.window_span))
                })
                .collect();
            VertexSpec::new(profit, windows)
        })
        .collect();
    let edges = pairs
        .iter()
        .zip(&costs)
        .map(|(&(u, v), &c)| {
            let e = EdgeSpec::new(u, v, c);
            if p.dynamic {
                let horizon = budget + p.cost_range.1;
                let k = rng.gen_range(1..=2);
                let iv = (0..k)
                    .map(|_| {
                        let a = rng.gen_range(0..=horizon);
                        TimeWindow::new(a, a + rng.gen_range(c..=c + horizon / 2 + 1))
                    })
                    .collect();
                e.with_activity(iv)
            } else {
                e
            }
        })
        .collect();
    let mut inst = Instance::new(p.topology, start, budget, vertices, edges);
    inst.timed = p.windows_per_vertex > 0;
    Ok(inst.normalized())
}

/// Undirected path built from line-TSP jobs.
#[derive(Clone, Debug, PartialEq)]
pub struct LineTsp {
    pub instance: Instance,
    pub n_jobs: usize,
    /// Vertex of each job, in input order.
    pub job_vertex: Vec<usize>,
}

/// Jobs `(position, release, deadline)`, placed on a unit-cost path. Jobs
/// sharing a position are joined by one edge; otherwise the gap is filled
/// with uncollectable vertices so that distances scale by `n^2`. The walk
/// starts at the leftmost job.
pub fn from_line_tsp(jobs: &[(i64, Time, Time)]) -> Result<LineTsp> {
    if jobs.is_empty() {
        return Err(SolveError::invalid("empty job list"));
    }
    if let Some(j) = jobs.iter().find(|j| j.1 < 0 || j.1 > j.2) {
        return Err(SolveError::invalid(format!("job window [{}, {}] is malformed", j.1, j.2)));
    }
    let n = jobs.len() as i64;
    let scale = n * n;
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (jobs[j].0, j));
    let mut vertices = vec![];
    let mut job_vertex = vec![0; jobs.len()];
    let mut prev_x = None;
    for &j in &order {
        let (x, r, d) = jobs[j];
        if let Some(px) = prev_x {
            if x != px {
                for _ in 0..(x - px) * scale - 1 {
                    vertices.push(VertexSpec::plain(0));
                }
            }
        }
        job_vertex[j] = vertices.len();
        vertices.push(VertexSpec::new(1, vec![TimeWindow::new(scale * r, scale * d + n)]));
        prev_x = Some(x);
    }
    let budget = jobs.iter().map(|j| scale * j.2 + n).max().unwrap();
    let costs = vec![1; vertices.len() - 1];
    let start = job_vertex[order[0]];
    let mut instance = Instance::undirected_path(vertices, &costs, start, budget);
    instance.timed = true;
    Ok(LineTsp {
        instance,
        n_jobs: jobs.len(),
        job_vertex,
    })
}

/// A CNF formula over variables `1..=vars`; literals are signed indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[(l.unsigned_abs() - 1) as usize] == (l > 0))
        })
    }

    /// Exhaustive search; fine for the small formulas used in tests.
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        if self.vars > 24 {
            return None;
        }
        (0u64..1 << self.vars)
            .map(|bits| (0..self.vars).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .find(|a| self.satisfied_by(a))
    }

    pub fn random(vars: usize, clauses: usize, seed: u64) -> Cnf {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let clauses = (0..clauses)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = rng.gen_range(1..=vars as i64);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        Cnf { vars, clauses }
    }
}

/// Reads DIMACS CNF (`p cnf V C` header, clauses terminated by 0).
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let bad = |msg: String| SolveError::invalid(format!("dimacs: {msg}"));
    let mut vars = None;
    let mut clauses = vec![];
    let mut cur = vec![];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(bad(format!("bad header {line:?}")));
            }
            vars = Some(f[1].parse::<usize>().map_err(|_| bad(format!("bad header {line:?}")))?);
            continue;
        }
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| bad(format!("bad literal {tok:?}")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(l);
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    let vars = vars.ok_or_else(|| bad("missing header".into()))?;
    if let Some(l) = clauses.iter().flatten().find(|l| l.unsigned_abs() as usize > vars) {
        return Err(bad(format!("literal {l} exceeds {vars} variables")));
    }
    Ok(Cnf { vars, clauses })
}

/// Directed cycle whose covering walks encode satisfying assignments.
#[derive(Clone, Debug, PartialEq)]
pub struct SatReduction {
    pub instance: Instance,
    pub vars: usize,
    pub clauses: usize,
}

impl SatReduction {
    fn len(&self) -> Time {
        (self.vars + self.clauses) as Time
    }

    /// Index of vertex `v_k`, `1 <= k <= C`; `v_C` is the
    /// start.
    fn vertex(&self, k: Time) -> usize {
        (k.rem_euclid(self.len())) as usize
    }

    /// Covering walk for a satisfying assignment: in phase `i` the walk
    /// sweeps once around the cycle without waiting, passing `v_i` at `2iC`
    /// when `x_i` is true and at `2iC + C - 1` otherwise.
    pub fn witness(&self, assignment: &[bool]) -> Result<Walk> {
        if assignment.len() != self.vars {
            return Err(SolveError::invalid(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.vars
            )));
        }
        let c = self.len();
        let mut walk = Walk::starting_at(0, 0);
        let (mut at, mut t) = (0usize, 0);
        let go = |walk: &mut Walk, to: usize, at: &mut usize, t: &mut Time| {
            while *at != to {
                *at = (*at + 1) % c as usize;
                *t += 1;
                walk.step(*at, *t);
            }
        };
        for i in 1..=self.vars as Time {
            let begin = 2 * i * c;
            let first = if assignment[i as usize - 1] { self.vertex(i) } else { self.vertex(i + 1) };
            go(&mut walk, first, &mut at, &mut t);
            debug_assert!(t <= begin);
            walk.wait_until(begin);
            t = begin;
            for _ in 0..c - 1 {
                at = (at + 1) % c as usize;
                t += 1;
                walk.step(at, t);
            }
        }
        Ok(walk)
    }
}

pub fn from_3sat(cnf: &Cnf) -> Result<SatReduction> {
    if let Some(c) = cnf.clauses.iter().find(|c| c.len() != 3) {
        return Err(SolveError::invalid(format!("clause {c:?} does not have exactly 3 literals")));
    }
    let n = cnf.vars as Time;
    let m = cnf.clauses.len() as Time;
    let c = n + m;
    if c < 2 {
        return Err(SolveError::invalid("topology mismatch: cycle requires n >= 2"));
    }
    let mut points: Vec<BTreeSet<Time>> = vec![BTreeSet::new(); c as usize];
    let idx = |k: Time| (k.rem_euclid(c)) as usize;
    for i in 1..=n {
        points[idx(i)].extend([2 * i * c, 2 * i * c + c - 1]);
    }
    for (j, clause) in cnf.clauses.iter().enumerate() {
        let j = j as Time + 1;
        for &l in clause {
            let i = l.abs();
            let t = if l > 0 {
                2 * i * c + (n + j - i)
            } else {
                2 * i * c + c - (m - j + i) - 1
            };
            points[idx(n + j)].insert(t);
        }
    }
    let budget = (2 * n + 1) * c;
    let vertices = points
        .into_iter()
        .map(|ps| VertexSpec::new(1, ps.into_iter().map(|t| TimeWindow::new(t, t)).collect()))
        .collect();
    let mut instance = Instance::directed_cycle(vertices, &vec![1; c as usize], budget);
    instance.timed = true;
    Ok(SatReduction {
        instance: instance.normalized(),
        vars: cnf.vars,
        clauses: cnf.clauses.len(),
    })
}

/// Dynamic spider whose full-profit walks encode 3-partitions.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReduction {
    pub instance: Instance,
    pub items: Vec<i64>,
    pub m: usize,
    pub target: i64,
    /// First vertex of each leg (next to the centre).
    pub leg_start: Vec<usize>,
    pub control: Vec<usize>,
}

impl PartitionReduction {
    /// Profit of a walk collecting everything.
    pub fn full_profit(&self) -> Profit {
        self.m as Profit * self.target + self.m as Profit + 1
    }

    /// Walk for a partition given as triples of item indices: run down and
    /// back up each leg of triple `i`, then visit control vertex `i`.
    pub fn witness(&self, triples: &[[usize; 3]]) -> Result<Walk> {
        if triples.len() != self.m {
            return Err(SolveError::invalid(format!("expected {} triples", self.m)));
        }
        let mut used = vec![false; self.items.len()];
        for tr in triples {
            if tr.iter().map(|&k| self.items.get(k).copied().unwrap_or(0)).sum::<i64>() != self.target {
                return Err(SolveError::invalid(format!("triple {tr:?} does not sum to {}", self.target)));
            }
            for &k in tr {
                if used[k] {
                    return Err(SolveError::invalid(format!("item {k} used twice")));
                }
                used[k] = true;
            }
        }
        let mut walk = Walk::starting_at(0, 0);
        let mut t = 0;
        for (i, tr) in triples.iter().enumerate() {
            for &k in tr {
                let first = self.leg_start[k];
                let len = self.items[k] as usize;
                for d in 0..len {
                    t += 1;
                    walk.step(first + d, t);
                }
                for d in (0..len - 1).rev() {
                    t += 1;
                    walk.step(first + d, t);
                }
                t += 1;
                walk.step(0, t);
            }
            let open = 2 * (i as Time + 1) * self.target + 2 * i as Time;
            walk.wait_until(open);
            t = t.max(open);
            walk.step(self.control[i], t + 1);
            walk.step(0, t + 2);
            t += 2;
        }
        Ok(walk)
    }
}

impl PartitionReduction {
    /// Backtracking search for a partition into triples; small inputs only.
    pub fn find_partition(&self) -> Option<Vec<[usize; 3]>> {
        let mut used = vec![false; self.items.len()];
        let mut out = vec![];
        self.search(&mut used, &mut out).then_some(out)
    }

    fn search(&self, used: &mut [bool], out: &mut Vec<[usize; 3]>) -> bool {
        let Some(a) = used.iter().position(|u| !u) else {
            return true;
        };
        used[a] = true;
        let n = self.items.len();
        for b in a + 1..n {
            for c in b + 1..n {
                if used[b] || used[c] || self.items[a] + self.items[b] + self.items[c] != self.target {
                    continue;
                }
                used[b] = true;
                used[c] = true;
                out.push([a, b, c]);
                if self.search(used, out) {
                    return true;
                }
                out.pop();
                used[b] = false;
                used[c] = false;
            }
        }
        used[a] = false;
        false
    }
}

pub fn from_3partition(items: &[i64]) -> Result<PartitionReduction> {
    let bad = |msg: String| Err(SolveError::invalid(msg));
    if items.is_empty() || !items.len().is_multiple_of(3) {
        return bad(format!("need 3m items, got {}", items.len()));
    }
    let m = items.len() / 3;
    let sum: i64 = items.iter().sum();
    if sum % m as i64 != 0 {
        return bad(format!("sum {sum} is not divisible by m = {m}"));
    }
    let target = sum / m as i64;
    if let Some(&a) = items.iter().find(|&&a| 4 * a <= target || 2 * a >= target) {
        return bad(format!("item {a} is not strictly between T/4 and T/2 for T = {target}"));
    }
    let horizon = 2 * m as Time * target + 2 * m as Time;
    let always = vec![TimeWindow::new(0, horizon)];
    let mut vertices = vec![VertexSpec::plain(1)];
    let mut edges = vec![];
    let mut leg_start = vec![];
    for &a in items {
        let first = vertices.len();
        leg_start.push(first);
        for d in 0..a as usize {
            vertices.push(VertexSpec::plain(1));
            let prev = if d == 0 { 0 } else { first + d - 1 };
            edges.push(EdgeSpec::new(prev, first + d, 1).with_activity(always.clone()));
        }
    }
    let mut control = vec![];
    for i in 1..=m as Time {
        let v = vertices.len();
        control.push(v);
        vertices.push(VertexSpec::plain(1));
        let open = 2 * i * target + 2 * (i - 1);
        edges.push(EdgeSpec::new(0, v, 1).with_activity(vec![TimeWindow::new(open, open + 2)]));
    }
    let instance = Instance::new(Topology::Tree, 0, horizon, vertices, edges);
    Ok(PartitionReduction {
        instance,
        items: items.to_vec(),
        m,
        target,
        leg_start,
        control,
    })
}

/// Star with an edge of cost `size / 2` per item and budget equal to the
/// capacity.
pub fn from_knapsack(items: &[(i64, Profit)], capacity: i64) -> Result<Instance> {
    if let Some(&(s, _)) = items.iter().find(|it| it.0 % 2 != 0) {
        return Err(SolveError::invalid(format!("odd size {s}: edge costs must be integral")));
    }
    if items.iter().any(|it| it.0 < 0 || it.1 < 0) || capacity < 0 {
        return Err(SolveError::invalid("sizes, values and capacity must be non-negative"));
    }
    let mut vertices = vec![VertexSpec::plain(0)];
    let mut edges = vec![];
    for (k, &(size, value)) in items.iter().enumerate() {
        vertices.push(VertexSpec::plain(value));
        edges.push(EdgeSpec::new(0, k + 1, size / 2));
    }
    Ok(Instance::new(Topology::Tree, 0, capacity, vertices, edges))
}

/// Directed path carrying `m` windows in total, two per vertex, for timing
/// runs.
pub fn bench_path_mtw(m: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (m / 2).max(1);
    let costs: Vec<Cost> = (1..n).map(|_| rng.gen_range(1..=4)).collect();
    let budget: Time = 2 * costs.iter().sum::<Cost>() + 1;
    let vertices = (0..n)
        .map(|_| {
            let windows = (0..2)
                .map(|_| {
                    let r = rng.gen_range(0..=budget);
                    TimeWindow::new(r, r + rng.gen_range(0..=16))
                })
                .collect();
            VertexSpec::new(rng.gen_range(1..=9), windows)
        })
        .collect();
    let mut inst = Instance::directed_path(vertices, &costs, budget);
    inst.timed = true;
    inst.normalized()
}

/// Unit-cost single-window cycle on `n` vertices for timing covering walks.
/// Windows are shorter than the cycle and spread over `2n` laps.
pub fn bench_cop_cycle(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n.max(2);
    let c = n as Time;
    let vertices = (0..n)
        .map(|_| {
            let r = rng.gen_range(0..=2 * c * c);
            VertexSpec::new(1, vec![TimeWindow::new(r, r + rng.gen_range(0..c))])
        })
        .collect();
    let mut inst = Instance::directed_cycle(vertices, &vec![1; n], 4 * c * c);
    inst.timed = true;
    inst.normalized()
}

/// Shuffled copy, handy for building seeded corpora.
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, validate_walk};
    use crate::oracle::oracle_cop;
    use proptest::prelude::*;

    #[test]
    fn random_is_deterministic() {
        let p = RandomParams::default();
        assert_eq!(gen_random(&p, 1).unwrap(), gen_random(&p, 1).unwrap());
        assert_ne!(gen_random(&p, 1).unwrap(), gen_random(&p, 2).unwrap());
    }

    #[test]
    fn random_edge_cases() {
        let plain = RandomParams {
            windows_per_vertex: 0,
            ..RandomParams::default()
        };
        let inst = gen_random(&plain, 3).unwrap();
        assert!(!inst.timed && !inst.has_windows());
        let one = RandomParams {
            n: 1,
            ..RandomParams::default()
        };
        assert_eq!(gen_random(&one, 3).unwrap().n(), 1);
        let bad = RandomParams {
            cost_range: (3, 1),
            ..RandomParams::default()
        };
        assert!(gen_random(&bad, 0).is_err());
    }

    #[test]
    fn line_tsp_shapes() {
        let same = from_line_tsp(&[(1, 0, 2), (1, 1, 3)]).unwrap();
        assert_eq!(same.instance.n(), 2);
        let single = from_line_tsp(&[(0, 0, 0)]).unwrap();
        assert_eq!(single.instance.n(), 1);
        let gap = from_line_tsp(&[(2, 0, 5), (0, 0, 5)]).unwrap();
        assert_eq!(gap.instance.n(), 2 + 7);
        assert_eq!(gap.job_vertex, vec![8, 0]);
        assert_eq!(gap.instance.vertices[0].windows, vec![TimeWindow::new(0, 22)]);
        assert!(validate_instance(&gap.instance).is_valid());
        assert!(from_line_tsp(&[]).is_err());
    }

    #[test]
    fn sat_time_points() {
        let cnf = Cnf {
            vars: 2,
            clauses: vec![vec![1, 2, 2], vec![-1, 2, 2]],
        };
        let red = from_3sat(&cnf).unwrap();
        let c = 4;
        // positive x1 in the first clause: 2C + (n + 1 - 1)
        let v = &red.instance.vertices[3].windows;
        assert!(v.iter().any(|w| w.contains(2 * c + 2)));
        assert!(validate_instance(&red.instance).is_valid());
        let bad = Cnf {
            vars: 1,
            clauses: vec![vec![1, 1]],
        };
        assert!(from_3sat(&bad).is_err());
    }

    #[test]
    fn sat_witness_and_unsat() {
        let cnf = Cnf {
            vars: 1,
            clauses: vec![vec![1, 1, 1]],
        };
        let red = from_3sat(&cnf).unwrap();
        let walk = red.witness(&[true]).unwrap();
        let rep = validate_walk(&red.instance, &walk);
        assert!(rep.valid, "{:?}", rep.violation);
        assert_eq!(rep.collected.len(), red.instance.n());

        let mut all = vec![];
        for mask in 0..8 {
            all.push((1..=3).map(|v| if mask >> (v - 1) & 1 == 1 { v } else { -v }).collect());
        }
        let unsat = Cnf { vars: 3, clauses: all };
        assert!(unsat.brute_force().is_none());
        let red = from_3sat(&unsat).unwrap();
        assert!(oracle_cop(&red.instance).unwrap().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn sat_witness_covers(seed in any::<u64>(), vars in 1..=4usize, clauses in 1..=5usize) {
            let cnf = Cnf::random(vars, clauses, seed);
            if let Some(a) = cnf.brute_force() {
                let red = from_3sat(&cnf).unwrap();
                let rep = validate_walk(&red.instance, &red.witness(&a).unwrap());
                prop_assert!(rep.valid, "{:?}", rep.violation);
                prop_assert_eq!(rep.collected.len(), red.instance.n());
            }
        }

        #[test]
        fn random_instances_are_valid(
            seed in any::<u64>(),
            n in 1..12usize,
            topo in 0..5usize,
            w in 0..3usize,
            dynamic in any::<bool>(),
        ) {
            let topology = [
                Topology::DirectedPath,
                Topology::DirectedCycle,
                Topology::UndirectedPath,
                Topology::Tree,
                Topology::General,
            ][topo];
            let p = RandomParams {
                topology,
                n: if topology == Topology::DirectedCycle { n.max(2) } else { n },
                windows_per_vertex: w,
                dynamic,
                ..RandomParams::default()
            };
            let inst = gen_random(&p, seed).unwrap();
            let rep = validate_instance(&inst);
            prop_assert!(rep.is_valid(), "{:?}", rep.issues);
        }
    }

    #[test]
    fn partition_example() {
        let red = from_3partition(&[4, 5, 5, 5, 5, 6]).unwrap();
        assert_eq!((red.m, red.target), (2, 15));
        assert_eq!(red.full_profit(), 33);
        let c1 = red.instance.edges.iter().find(|e| e.v == red.control[0]).unwrap();
        assert_eq!(c1.active, Some(vec![TimeWindow::new(30, 32)]));
        let walk = red.witness(&[[0, 1, 5], [2, 3, 4]]).unwrap();
        let rep = validate_walk(&red.instance, &walk);
        assert!(rep.valid, "{:?}", rep.violation);
        assert_eq!(rep.profit, 33);
        assert!(red.witness(&[[0, 1, 2], [3, 4, 5]]).is_err());
        assert!(from_3partition(&[1, 5, 5, 5, 5, 9]).is_err());
        let found = red.find_partition().unwrap();
        assert!(validate_walk(&red.instance, &red.witness(&found).unwrap()).valid);
        assert!(from_3partition(&[5, 5, 5, 5, 5, 5]).unwrap().find_partition().is_some());
    }

    #[test]
    fn knapsack_star() {
        let inst = from_knapsack(&[(2, 3), (4, 5)], 4).unwrap();
        assert_eq!(inst.edges.iter().map(|e| e.cost).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(inst.budget, 4);
        assert_eq!(inst.profit(0), 0);
        assert_eq!(from_knapsack(&[], 3).unwrap().n(), 1);
        assert!(from_knapsack(&[(3, 1)], 3).unwrap_err().to_string().contains("odd size"));
    }

    #[test]
    fn bench_builders_are_valid() {
        for k in [2, 8, 33] {
            assert!(validate_instance(&bench_path_mtw(k, 1)).is_valid());
            assert!(validate_instance(&bench_cop_cycle(k, 1)).is_valid());
        }
        assert_eq!(bench_path_mtw(64, 4), bench_path_mtw(64, 4));
    }

    #[test]
    fn dimacs() {
        let cnf = parse_dimacs("c x\np cnf 3 2\n1 -2 3 0\n-1 2 3 0\n").unwrap();
        assert_eq!(cnf.vars, 3);
        assert_eq!(cnf.clauses, vec![vec![1, -2, 3], vec![-1, 2, 3]]);
        assert!(parse_dimacs("1 2 3 0").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2 3 0").is_err());
    }
}
