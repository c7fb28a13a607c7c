//! Nice tree decompositions with the start vertex in every bag.

use std::collections::BTreeSet;

use crate::error::{Result, SolveError};
use crate::model::{Instance, RawDecomposition, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    IntroduceVertex(usize),
    /// Index into `Instance::edges`.
    IntroduceEdge(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nodes are stored children first, so a forward pass is bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
    pub width: usize,
    pub start: usize,
}

pub(crate) fn require_undirected(inst: &Instance) -> Result<()> {
    match inst.topology {
        Topology::Tree | Topology::General | Topology::UndirectedPath => Ok(()),
        other => Err(SolveError::WrongTopology {
            expected: "general",
            found: other.to_string(),
        }),
    }
}

/// Builds a nice decomposition from the instance's own decomposition if it
/// carries one, or from a min-fill elimination order otherwise.
pub fn build_nice_decomposition(inst: &Instance) -> Result<NiceDecomposition> {
    require_undirected(inst)?;
    inst.require_valid()?;
    let raw = match &inst.decomposition {
        Some(raw) => {
            check_raw(inst, raw)?;
            raw.clone()
        }
        None => min_fill(inst),
    };
    Ok(Builder::new(inst, &raw).finish())
}

/// Checks that `raw` is a tree decomposition of the instance graph.
pub fn check_raw(inst: &Instance, raw: &RawDecomposition) -> Result<()> {
    let n = inst.n();
    let m = raw.bags.len();
    let bad = |msg: String| Err(SolveError::invalid(format!("decomposition: {msg}")));
    if m == 0 {
        return bad("no bags".into());
    }
    if let Some(v) = raw.bags.iter().flatten().find(|&&v| v >= n) {
        return bad(format!("vertex {v} out of range"));
    }
    if raw.tree.len() != m - 1 {
        return bad(format!("{} bags need {} tree edges, found {}", m, m - 1, raw.tree.len()));
    }
    let mut adj = vec![vec![]; m];
    for &(a, b) in &raw.tree {
        if a >= m || b >= m {
            return bad(format!("tree edge {a} - {b} out of range"));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    if reach(&adj, 0, |_| true).iter().filter(|&&x| x).count() != m {
        return bad("bags do not form a tree".into());
    }
    let sets: Vec<BTreeSet<usize>> = raw.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for v in 0..n {
        let holds: Vec<usize> = (0..m).filter(|&b| sets[b].contains(&v)).collect();
        let Some(&first) = holds.first() else {
            return bad(format!("vertex {v} is in no bag"));
        };
        let seen = reach(&adj, first, |b| sets[b].contains(&v));
        if holds.iter().any(|&b| !seen[b]) {
            return bad(format!("bags holding vertex {v} are not connected"));
        }
    }
    for e in &inst.edges {
        if !sets.iter().any(|s| s.contains(&e.u) && s.contains(&e.v)) {
            return bad(format!("edge {} - {} is in no bag", e.u, e.v));
        }
    }
    Ok(())
}

fn reach(adj: &[Vec<usize>], from: usize, ok: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if !seen[b] && ok(b) {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// Elimination order that greedily adds the fewest fill edges.
fn min_fill(inst: &Instance) -> RawDecomposition {
    let n = inst.n();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in &inst.edges {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    for _ in 0..n {
        let fill = |v: usize| {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut f = 0;
            for (i, &a) in nb.iter().enumerate() {
                f += nb[i + 1..].iter().filter(|&&b| !adj[a].contains(&b)).count();
            }
            f
        };
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill(v), adj[v].len(), v))
            .unwrap();
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
            adj[a].remove(&v);
        }
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        order.push(v);
        alive[v] = false;
        adj[v].clear();
    }
    let mut when = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        when[v] = i;
    }
    let mut tree = vec![];
    for i in 0..n.saturating_sub(1) {
        let v = order[i];
        let parent = bags[i]
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| when[u])
            .min()
            .unwrap_or(i + 1);
        tree.push((parent, i));
    }
    RawDecomposition { bags, tree }
}

struct Builder<'a> {
    inst: &'a Instance,
    raw: Vec<Vec<usize>>,
    tree: Vec<Vec<usize>>,
    incident: Vec<Vec<(usize, usize)>>,
    introduced: Vec<bool>,
    nodes: Vec<NiceNode>,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance, raw: &RawDecomposition) -> Self {
        let s = inst.start;
        let raw_bags: Vec<Vec<usize>> = raw
            .bags
            .iter()
            .map(|b| {
                let mut b: Vec<usize> = b.iter().copied().chain([s]).collect();
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        let mut tree = vec![vec![]; raw_bags.len()];
        for &(a, b) in &raw.tree {
            tree[a].push(b);
            tree[b].push(a);
        }
        let mut incident = vec![vec![]; inst.n()];
        for (k, e) in inst.edges.iter().enumerate() {
            incident[e.u].push((e.v, k));
            incident[e.v].push((e.u, k));
        }
        Builder {
            inst,
            raw: raw_bags,
            tree,
            incident,
            introduced: vec![false; inst.edges.len()],
            nodes: vec![],
        }
    }

    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, top: usize, v: usize) -> usize {
        let mut bag = self.nodes[top].bag.clone();
        bag.push(v);
        bag.sort_unstable();
        self.push(NiceKind::IntroduceVertex(v), bag, vec![top])
    }

    /// Introduces the pending edges of `w` inside the current bag, then
    /// forgets `w`.
    fn forget(&mut self, mut top: usize, w: usize) -> usize {
        let bag = self.nodes[top].bag.clone();
        for (x, e) in self.incident[w].clone() {
            if !self.introduced[e] && bag.binary_search(&x).is_ok() {
                self.introduced[e] = true;
                top = self.push(NiceKind::IntroduceEdge(e), bag.clone(), vec![top]);
            }
        }
        let rest: Vec<usize> = bag.into_iter().filter(|&x| x != w).collect();
        self.push(NiceKind::Forget(w), rest, vec![top])
    }

    fn build(&mut self, t: usize, parent: Option<usize>) -> usize {
        let s = self.inst.start;
        let bag = self.raw[t].clone();
        let kids: Vec<usize> = self.tree[t].iter().copied().filter(|&c| Some(c) != parent).collect();
        let mut tops = vec![];
        if kids.is_empty() {
            let mut top = self.push(NiceKind::Leaf, vec![s], vec![]);
            for &v in &bag {
                if v != s {
                    top = self.introduce(top, v);
                }
            }
            tops.push(top);
        }
        for c in kids {
            let mut top = self.build(c, Some(t));
            let below = self.raw[c].clone();
            for &w in &below {
                if bag.binary_search(&w).is_err() {
                    top = self.forget(top, w);
                }
            }
            for &v in &bag {
                if below.binary_search(&v).is_err() {
                    top = self.introduce(top, v);
                }
            }
            tops.push(top);
        }
        while tops.len() > 1 {
            let b = tops.pop().unwrap();
            let a = tops.pop().unwrap();
            tops.push(self.push(NiceKind::Join, bag.clone(), vec![a, b]));
        }
        tops[0]
    }

    fn finish(mut self) -> NiceDecomposition {
        let s = self.inst.start;
        let mut top = self.build(0, None);
        for w in self.nodes[top].bag.clone() {
            if w != s {
                top = self.forget(top, w);
            }
        }
        debug_assert!(self.introduced.iter().all(|&x| x));
        let width = self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(1) - 1;
        NiceDecomposition {
            nodes: self.nodes,
            root: top,
            width,
            start: s,
        }
    }
}

impl NiceDecomposition {
    /// Checks the structural rules against `inst`; the error names the first
    /// violation found.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        let bad = |msg: String| Err(SolveError::invalid(format!("decomposition mismatch: {msg}")));
        let s = inst.start;
        if self.start != s {
            return bad(format!("built for start {} but the instance starts at {s}", self.start));
        }
        if self.root >= self.nodes.len() || self.nodes[self.root].bag != [s] {
            return bad("root bag must be the start alone".into());
        }
        let mut edge_seen = vec![0usize; inst.edges.len()];
        let mut forgotten = vec![false; inst.n()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.bag.binary_search(&s).is_err() {
                return bad(format!("node {i} lacks the start vertex"));
            }
            if node.children.iter().any(|&c| c >= i) {
                return bad(format!("node {i} is listed before a child"));
            }
            let child = |k: usize| &self.nodes[node.children[k]].bag;
            let with = |x: usize, bag: &Vec<usize>| {
                let mut b = bag.clone();
                b.push(x);
                b.sort_unstable();
                b
            };
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag == [s],
                NiceKind::IntroduceVertex(v) => {
                    node.children.len() == 1 && child(0).binary_search(&v).is_err() && node.bag == with(v, child(0))
                }
                NiceKind::IntroduceEdge(e) => {
                    let ok = e < inst.edges.len()
                        && node.children.len() == 1
                        && child(0) == &node.bag
                        && node.bag.binary_search(&inst.edges[e].u).is_ok()
                        && node.bag.binary_search(&inst.edges[e].v).is_ok();
                    if ok {
                        edge_seen[e] += 1;
                    }
                    ok
                }
                NiceKind::Forget(w) => {
                    let ok = w < inst.n()
                        && !forgotten[w]
                        && node.children.len() == 1
                        && node.bag.binary_search(&w).is_err()
                        && with(w, &node.bag) == *child(0);
                    if ok {
                        forgotten[w] = true;
                    }
                    ok
                }
                NiceKind::Join => node.children.len() == 2 && child(0) == &node.bag && child(1) == &node.bag,
            };
            if !ok {
                return bad(format!("node {i} ({:?}) is malformed", node.kind));
            }
        }
        if let Some(e) = edge_seen.iter().position(|&c| c != 1) {
            let ed = &inst.edges[e];
            return bad(format!("edge {} - {} introduced {} times", ed.u, ed.v, edge_seen[e]));
        }
        if let Some(v) = (0..inst.n()).find(|&v| v != s && !forgotten[v]) {
            return bad(format!("vertex {v} is never forgotten"));
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{EdgeSpec, VertexSpec};

    pub(crate) fn graph(n: usize, edges: &[(usize, usize)]) -> Instance {
        Instance::new(
            Topology::General,
            0,
            10,
            vec![VertexSpec::plain(1); n],
            edges.iter().map(|&(u, v)| EdgeSpec::new(u, v, 1)).collect(),
        )
    }

    #[test]
    fn path_and_triangle_widths() {
        let path = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let d = build_nice_decomposition(&path).unwrap();
        d.check(&path).unwrap();
        assert!(d.width <= 2);
        let tri = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let d = build_nice_decomposition(&tri).unwrap();
        d.check(&tri).unwrap();
        assert_eq!(d.width, 2);
    }

    #[test]
    fn supplied_decomposition_is_checked() {
        let mut inst = graph(3, &[(0, 1), (1, 2)]);
        inst.decomposition = Some(RawDecomposition {
            bags: vec![vec![0, 1], vec![1]],
            tree: vec![(0, 1)],
        });
        let err = build_nice_decomposition(&inst).unwrap_err().to_string();
        assert!(err.contains("vertex 2 is in no bag"), "{err}");
        inst.decomposition = Some(RawDecomposition {
            bags: vec![vec![0, 1], vec![2]],
            tree: vec![(0, 1)],
        });
        let err = build_nice_decomposition(&inst).unwrap_err().to_string();
        assert!(err.contains("edge 1 - 2"), "{err}");
        inst.decomposition = Some(RawDecomposition {
            bags: vec![vec![0, 1], vec![1, 2]],
            tree: vec![(0, 1)],
        });
        let d = build_nice_decomposition(&inst).unwrap();
        d.check(&inst).unwrap();
        assert_eq!(d.width, 2);
    }

    #[test]
    fn single_vertex() {
        let inst = graph(1, &[]);
        let d = build_nice_decomposition(&inst).unwrap();
        d.check(&inst).unwrap();
        assert_eq!(d.width, 0);
    }

    #[test]
    fn directed_topologies_are_rejected() {
        let inst = Instance::directed_path(vec![VertexSpec::plain(1); 2], &[1], 3);
        assert!(matches!(build_nice_decomposition(&inst), Err(SolveError::WrongTopology { .. })));
    }
}
