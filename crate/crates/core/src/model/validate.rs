use std::collections::HashSet;

use super::{Instance, TimeWindow, Topology};

/// Every invariant violation found in an instance. Empty means well-formed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, msg: impl Into<String>) {
        self.issues.push(msg.into());
    }
}

pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n = inst.n();
    if n == 0 {
        rep.push("instance has no vertices");
        return rep;
    }
    if inst.start >= n {
        rep.push(format!("start {} out of range", inst.start));
    }
    if inst.budget < 0 {
        rep.push("negative budget");
    }

    let mut total: Option<i64> = Some(0);
    for (i, v) in inst.vertices.iter().enumerate() {
        if v.profit < 0 {
            rep.push(format!("vertices[{i}]: negative profit"));
        }
        total = total.and_then(|s| s.checked_add(v.profit));
        check_windows(&mut rep, &format!("vertices[{i}].windows"), &v.windows, 1);
        if let Some(w) = v.windows.iter().find(|w| w.deadline > inst.budget) {
            rep.push(format!("vertices[{i}].windows: window {w} extends past budget {}", inst.budget));
        }
    }
    if total.is_none() {
        rep.push("overflow: total profit does not fit in 63 bits");
    }

    let mut max_cost = 0i64;
    let mut total_cost: Option<i64> = Some(0);
    let mut seen = HashSet::new();
    for (k, e) in inst.edges.iter().enumerate() {
        if e.u >= n || e.v >= n {
            rep.push(format!("edges[{k}]: endpoint out of range"));
            continue;
        }
        if e.u == e.v {
            rep.push(format!("edges[{k}]: self loop at {}", e.u));
        }
        if e.cost < 0 {
            rep.push(format!("edges[{k}]: negative cost"));
        }
        max_cost = max_cost.max(e.cost);
        total_cost = total_cost.and_then(|s| s.checked_add(e.cost));
        let key = if inst.topology.is_directed() {
            (e.u, e.v)
        } else {
            (e.u.min(e.v), e.u.max(e.v))
        };
        if !seen.insert(key) {
            rep.push(format!("edges[{k}]: duplicate edge {} - {}", e.u, e.v));
        }
        if let Some(active) = &e.active {
            check_windows(&mut rep, &format!("edges[{k}].active"), active, 0);
        }
    }
    if inst.budget.checked_add(max_cost).is_none()
        || total_cost.and_then(|c| c.checked_add(inst.budget)).is_none()
    {
        rep.push("overflow: budget plus edge costs does not fit in 63 bits");
    }

    check_topology(&mut rep, inst);
    if inst.decomposition.is_some() && !matches!(inst.topology, Topology::General | Topology::Tree) {
        rep.push("decomposition supplied for a topology other than general/tree");
    }
    rep
}

fn check_windows(rep: &mut ValidationReport, path: &str, ws: &[TimeWindow], slack: i64) {
    for w in ws {
        if w.release > w.deadline {
            rep.push(format!("{path}: window {w} has release > deadline"));
        }
        if w.release < 0 {
            rep.push(format!("{path}: negative time in {w}"));
        }
    }
    for pair in ws.windows(2) {
        if pair[1].release <= pair[0].deadline + slack || pair[1].release < pair[0].release {
            rep.push(format!(
                "{path}: windows not sorted and merged ({} then {})",
                pair[0], pair[1]
            ));
            break;
        }
    }
}

fn check_topology(rep: &mut ValidationReport, inst: &Instance) {
    let n = inst.n();
    let m = inst.edges.len();
    let mismatch = |rep: &mut ValidationReport, why: String| {
        rep.push(format!("topology mismatch: {why}"));
    };
    match inst.topology {
        Topology::DirectedPath => {
            if inst.start != 0 {
                mismatch(rep, "directed path must start at vertex 0".into());
            }
            let want: HashSet<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            let have: HashSet<(usize, usize)> = inst.edges.iter().map(|e| (e.u, e.v)).collect();
            if m != n - 1 || want != have {
                mismatch(rep, "directed path needs exactly the edges i -> i+1".into());
            }
        }
        Topology::DirectedCycle => {
            if n < 2 {
                mismatch(rep, "cycle requires n >= 2".into());
                return;
            }
            if inst.start != 0 {
                mismatch(rep, "directed cycle must be indexed so that start = 0".into());
            }
            let want: HashSet<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let have: HashSet<(usize, usize)> = inst.edges.iter().map(|e| (e.u, e.v)).collect();
            if m != n || want != have {
                let missing: Vec<String> = want
                    .difference(&have)
                    .map(|(u, v)| format!("{u} -> {v}"))
                    .collect();
                mismatch(
                    rep,
                    format!("directed cycle needs edges i -> i+1 mod n; missing [{}]", missing.join(", ")),
                );
            }
        }
        Topology::UndirectedPath => {
            let want: HashSet<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            let have: HashSet<(usize, usize)> = inst
                .edges
                .iter()
                .map(|e| (e.u.min(e.v), e.u.max(e.v)))
                .collect();
            if m != n - 1 || want != have {
                mismatch(rep, "undirected path needs exactly the edges {i, i+1}".into());
            }
        }
        Topology::Tree => {
            if m != n - 1 || !connected(inst) {
                mismatch(rep, "tree must be connected with n - 1 edges".into());
            }
        }
        Topology::General => {}
    }
}

fn connected(inst: &Instance) -> bool {
    let n = inst.n();
    let mut adj = vec![Vec::new(); n];
    for e in &inst.edges {
        if e.u < n && e.v < n {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EdgeSpec, VertexSpec};

    #[test]
    fn minimal_path_is_valid() {
        let inst = Instance::directed_path(vec![VertexSpec::plain(1), VertexSpec::plain(1)], &[1], 3);
        assert!(validate_instance(&inst).is_valid());
    }

    #[test]
    fn cycle_missing_closing_edge() {
        let mut inst = Instance::directed_cycle(vec![VertexSpec::plain(1); 3], &[1, 1, 1], 5);
        inst.edges.pop();
        let rep = validate_instance(&inst);
        assert!(rep.issues.iter().any(|s| s.contains("topology mismatch")), "{rep:?}");
    }

    #[test]
    fn inverted_window() {
        let inst = Instance::directed_path(
            vec![VertexSpec::new(1, vec![TimeWindow::new(5, 3)])],
            &[],
            10,
        );
        let rep = validate_instance(&inst);
        assert!(rep.issues.iter().any(|s| s.contains("release > deadline")), "{rep:?}");
    }

    #[test]
    fn tree_checks_connectivity_and_duplicates() {
        let mut inst = Instance::new(
            Topology::Tree,
            0,
            4,
            vec![VertexSpec::plain(1); 3],
            vec![EdgeSpec::new(0, 1, 1), EdgeSpec::new(1, 0, 1)],
        );
        let rep = validate_instance(&inst);
        assert!(rep.issues.iter().any(|s| s.contains("duplicate")));
        assert!(rep.issues.iter().any(|s| s.contains("topology mismatch")));
        inst.edges[1] = EdgeSpec::new(1, 2, 1);
        assert!(validate_instance(&inst).is_valid());
    }

    #[test]
    fn overflow_is_reported() {
        let inst = Instance::directed_path(
            vec![VertexSpec::plain(i64::MAX), VertexSpec::plain(1)],
            &[1],
            3,
        );
        let rep = validate_instance(&inst);
        assert!(rep.issues.iter().any(|s| s.contains("overflow")));
    }
}
