//! Plain orienteering on trees by dynamic programming over exact profit.
//!
//! For every vertex `v` and profit total `P` the DP keeps the cheapest walk
//! that starts at `v`, stays in the subtree of `v` and collects exactly `P`,
//! once for walks returning to `v` (even degree at `v`) and once for walks
//! ending anywhere (uneven). After binarization each vertex has at most two
//! children, so combining them is a convolution of two profit axes.

use crate::error::{Result, SolveError};
use crate::model::{EdgeSpec, Instance, Profit, Solution, Time, Topology, VertexSpec, Walk};

const INF: Time = Time::MAX / 4;
const CELL_CAP: usize = 60_000_000;

/// Rooted view of a tree: parent pointers, children and the cost of the
/// edge to the parent.
struct Rooted {
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
    up_cost: Vec<Time>,
}

fn root(inst: &Instance) -> Rooted {
    let n = inst.n();
    let adj = inst.adjacency();
    let mut children = vec![vec![]; n];
    let mut up_cost = vec![0; n];
    let mut seen = vec![false; n];
    let mut order = vec![inst.start];
    seen[inst.start] = true;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        k += 1;
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                children[v].push(w);
                up_cost[w] = inst.edges[e].cost;
                order.push(w);
            }
        }
    }
    Rooted {
        order,
        children,
        up_cost,
    }
}

/// Splits vertices with more than two children (rooted at the start) by
/// inserting zero-profit vertices on zero-cost edges. The new vertices get
/// indices `n..`.
pub fn binarize_tree(inst: &Instance) -> Result<Instance> {
    Ok(binarize(inst)?.0)
}

/// Also returns, for every vertex of the result, the original vertex it
/// stands for.
fn binarize(inst: &Instance) -> Result<(Instance, Vec<usize>)> {
    inst.require(Topology::Tree)?;
    inst.require_valid()?;
    let r = root(inst);
    let mut out = inst.clone();
    out.edges.clear();
    out.decomposition = None;
    let mut origin: Vec<usize> = (0..inst.n()).collect();
    for &v in &r.order {
        let mut at = v;
        let kids = &r.children[v];
        for (k, &w) in kids.iter().enumerate() {
            let rest = kids.len() - k;
            out.edges.push(EdgeSpec::new(at, w, r.up_cost[w]));
            if rest > 2 {
                // hang the remaining children below a fresh vertex
                let aux = out.vertices.len();
                out.vertices.push(VertexSpec::plain(0));
                origin.push(v);
                out.edges.push(EdgeSpec::new(at, aux, 0));
                at = aux;
            }
        }
    }
    Ok((out, origin))
}

#[derive(Clone, Copy, Default)]
struct Pick {
    /// Profit sent to the first child.
    left: u32,
    /// Child holding the open end: 0 none, 1 first, 2 second.
    open: u8,
}

struct TreeDp {
    profit: Vec<Profit>,
    children: Vec<Vec<usize>>,
    up_cost: Vec<Time>,
    /// Subtree profit totals.
    total: Vec<usize>,
    even: Vec<Vec<Time>>,
    uneven: Vec<Vec<Time>>,
    even_pick: Vec<Vec<u32>>,
    uneven_pick: Vec<Vec<Pick>>,
}

impl TreeDp {
    fn build(inst: &Instance) -> Result<Self> {
        let n = inst.n();
        let r = root(inst);
        let profit: Vec<Profit> = inst.vertices.iter().map(|v| v.profit).collect();
        let mut total = vec![0usize; n];
        for &v in r.order.iter().rev() {
            total[v] = profit[v] as usize + r.children[v].iter().map(|&w| total[w]).sum::<usize>();
        }
        let cells: usize = total.iter().map(|t| t + 1).sum();
        if cells > CELL_CAP {
            return Err(SolveError::resource(format!(
                "profit table with {cells} cells exceeds the cap of {CELL_CAP}"
            )));
        }
        let mut dp = TreeDp {
            profit,
            children: r.children,
            up_cost: r.up_cost,
            total,
            even: vec![vec![]; n],
            uneven: vec![vec![]; n],
            even_pick: vec![vec![]; n],
            uneven_pick: vec![vec![]; n],
        };
        for &v in r.order.iter().rev() {
            dp.combine(v);
        }
        Ok(dp)
    }

    /// Cost of sending `p` into child `w` and coming back (or not).
    fn child(&self, w: usize, p: usize, closed: bool) -> Time {
        if p == 0 {
            return 0;
        }
        let c = self.up_cost[w];
        let (t, mult) = if closed { (self.even[w][p], 2) } else { (self.uneven[w][p], 1) };
        if t >= INF {
            INF
        } else {
            t + mult * c
        }
    }

    fn combine(&mut self, v: usize) {
        let own = self.profit[v] as usize;
        let size = self.total[v] + 1;
        let mut even = vec![INF; size];
        let mut uneven = vec![INF; size];
        let mut even_pick = vec![0u32; size];
        let mut uneven_pick = vec![Pick::default(); size];
        let kids = self.children[v].clone();
        debug_assert!(kids.len() <= 2);
        let t1 = kids.first().map_or(0, |&w| self.total[w]);
        let t2 = kids.get(1).map_or(0, |&w| self.total[w]);
        let cost = |w: Option<&usize>, p: usize, closed: bool| -> Time {
            match w {
                None if p == 0 => 0,
                None => INF,
                Some(&w) => self.child(w, p, closed),
            }
        };
        let add = |a: Time, b: Time| if a >= INF || b >= INF { INF } else { a + b };
        for p1 in 0..=t1 {
            let e1 = cost(kids.first(), p1, true);
            let u1 = cost(kids.first(), p1, false);
            if e1 >= INF && u1 >= INF {
                continue;
            }
            for p2 in 0..=t2 {
                let e2 = cost(kids.get(1), p2, true);
                let u2 = cost(kids.get(1), p2, false);
                let at = own + p1 + p2;
                let ee = add(e1, e2);
                if ee < even[at] {
                    even[at] = ee;
                    even_pick[at] = p1 as u32;
                }
                for (c, open) in [(ee, 0u8), (add(u1, e2), 1), (add(e1, u2), 2)] {
                    if c < uneven[at] {
                        uneven[at] = c;
                        uneven_pick[at] = Pick { left: p1 as u32, open };
                    }
                }
            }
        }
        self.even[v] = even;
        self.uneven[v] = uneven;
        self.even_pick[v] = even_pick;
        self.uneven_pick[v] = uneven_pick;
    }

    fn emit(&self, v: usize, p: usize, closed: bool, t: &mut Time, walk: &mut Walk) {
        let kids = &self.children[v];
        let (left, open) = if closed {
            (self.even_pick[v][p] as usize, 0)
        } else {
            let pick = self.uneven_pick[v][p];
            (pick.left as usize, pick.open)
        };
        let right = p - self.profit[v] as usize - left;
        let shares = [left, right];
        // closed children first, then the open one
        let mut plan: Vec<(usize, bool)> = vec![];
        for k in 0..kids.len() {
            if shares[k] > 0 && open as usize != k + 1 {
                plan.push((k, true));
            }
        }
        if open > 0 {
            plan.push((open as usize - 1, false));
        }
        for (k, closed) in plan {
            let w = kids[k];
            let c = self.up_cost[w];
            *t += c;
            walk.step(w, *t);
            self.emit(w, shares[k], closed, t, walk);
            if closed {
                *t += c;
                walk.step(v, *t);
            }
        }
    }
}

/// Exact optimum for plain orienteering on a tree. Pseudo-polynomial in the
/// total profit.
pub fn solve_tree(inst: &Instance) -> Result<Solution> {
    inst.require(Topology::Tree)?;
    inst.require_untimed()?;
    if inst.has_dynamic_edges() {
        return Err(SolveError::invalid("dynamic edges are not supported on trees"));
    }
    let (bin, origin) = binarize(inst)?;
    let dp = TreeDp::build(&bin)?;
    let s = bin.start;
    let mut best = None;
    for p in (0..=dp.total[s]).rev() {
        let (e, u) = (dp.even[s][p], dp.uneven[s][p]);
        if e.min(u) <= bin.budget {
            best = Some((p, e <= u));
            break;
        }
    }
    let (p, closed) = best.expect("collecting only the start is free");
    let mut walk = Walk::starting_at(s, 0);
    dp.emit(s, p, closed, &mut 0, &mut walk);
    let mapped = Walk::new(walk.visits.iter().map(|&(v, t)| (origin[v], t)).collect());
    Ok(Solution::scored(inst, mapped.canonicalize(inst), "tree-dp"))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::validate_walk;
    use crate::oracle::oracle_op;
    use proptest::prelude::*;

    fn star(leaves: usize, budget: Time) -> Instance {
        let vertices = vec![VertexSpec::plain(1); leaves + 1];
        let edges = (1..=leaves).map(|l| EdgeSpec::new(0, l, 1)).collect();
        Instance::new(Topology::Tree, 0, budget, vertices, edges)
    }

    /// Random trees with plain profits; vertex `k > 0` hangs below a random
    /// earlier vertex.
    pub fn random_tree(max_n: usize, max_cost: Time, max_profit: Profit) -> impl Strategy<Value = Instance> {
        (1..=max_n).prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..=max_profit, n),
                proptest::collection::vec((any::<prop::sample::Index>(), 0..=max_cost), n - 1),
                0..n,
                0..=20i64,
            )
                .prop_map(move |(profits, links, start, budget)| {
                    let vertices = profits.into_iter().map(VertexSpec::plain).collect();
                    let edges = links
                        .iter()
                        .enumerate()
                        .map(|(k, (ix, c))| EdgeSpec::new(ix.index(k + 1), k + 1, *c))
                        .collect();
                    Instance::new(Topology::Tree, start, budget, vertices, edges)
                })
        })
    }

    #[test]
    fn star_examples() {
        let inst = star(2, 3);
        assert_eq!(solve_tree(&inst).unwrap().profit, 3);
        assert_eq!(solve_tree(&star(2, 2)).unwrap().profit, 2);
        assert_eq!(solve_tree(&star(2, 0)).unwrap().profit, 1);
    }

    #[test]
    fn binarization_counts() {
        let b = binarize_tree(&star(4, 5)).unwrap();
        assert_eq!(b.n(), 7);
        assert!(crate::model::validate_instance(&b).is_valid());
        let r = root(&b);
        assert!(r.children.iter().all(|c| c.len() <= 2));

        let binary = star(2, 5);
        assert_eq!(binarize_tree(&binary).unwrap().n(), 3);
        let single = Instance::new(Topology::Tree, 0, 5, vec![VertexSpec::plain(3)], vec![]);
        assert_eq!(binarize_tree(&single).unwrap(), single);
        assert_eq!(solve_tree(&single).unwrap().profit, 3);
    }

    #[test]
    fn inner_node_alone() {
        // path 1 - 0 - 2 rooted in the middle with everything far away
        let inst = Instance::new(
            Topology::Tree,
            0,
            1,
            vec![VertexSpec::plain(2), VertexSpec::plain(5), VertexSpec::plain(5)],
            vec![EdgeSpec::new(0, 1, 2), EdgeSpec::new(0, 2, 3)],
        );
        assert_eq!(solve_tree(&inst).unwrap().profit, 2);
    }

    #[test]
    fn rejects_windows_and_other_topologies() {
        let mut inst = star(2, 3);
        inst.vertices[1].windows = vec![crate::model::TimeWindow::new(0, 3)];
        inst.timed = true;
        assert!(solve_tree(&inst).is_err());
        let path = Instance::directed_path(vec![VertexSpec::plain(1); 2], &[1], 1);
        assert!(matches!(solve_tree(&path), Err(SolveError::WrongTopology { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn matches_oracle(inst in random_tree(8, 3, 4)) {
            let sol = solve_tree(&inst).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            prop_assert_eq!(sol.profit, oracle_op(&inst).unwrap().profit);
        }

        #[test]
        fn large_budget_saturates(inst in random_tree(8, 3, 4)) {
            let cost: Time = inst.edges.iter().map(|e| e.cost).sum();
            let mut a = inst.clone();
            a.budget = 2 * cost;
            let mut b = inst;
            b.budget = 4 * cost + 1;
            prop_assert_eq!(solve_tree(&a).unwrap().profit, solve_tree(&b).unwrap().profit);
            prop_assert_eq!(solve_tree(&a).unwrap().profit, a.total_profit());
        }
    }
}
