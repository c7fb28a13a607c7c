use std::collections::BTreeSet;

use super::{Instance, Profit, Time};

/// Timed visit sequence. Every solver returns one as its witness.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Walk {
    pub visits: Vec<(usize, Time)>,
}

impl Walk {
    pub fn new(visits: Vec<(usize, Time)>) -> Self {
        Walk { visits }
    }

    pub fn starting_at(v: usize, t: Time) -> Self {
        Walk {
            visits: vec![(v, t)],
        }
    }

    pub fn last(&self) -> Option<(usize, Time)> {
        self.visits.last().copied()
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    /// Appends a wait at the current vertex until `t` (no-op if `t` is not
    /// later than the current time).
    pub fn wait_until(&mut self, t: Time) {
        if let Some((v, now)) = self.last() {
            if t > now {
                self.visits.push((v, t));
            }
        }
    }

    /// Appends a movement to `v` arriving at `t`.
    pub fn step(&mut self, v: usize, t: Time) {
        self.visits.push((v, t));
    }

    /// Rewrites a loose walk (movement steps may take longer than the edge
    /// cost) into canonical form: the surplus becomes an explicit wait right
    /// before the move, and duplicate consecutive visits are dropped.
    pub fn canonicalize(&self, inst: &Instance) -> Walk {
        let index = inst.edge_index();
        let mut out: Vec<(usize, Time)> = Vec::with_capacity(self.visits.len());
        for &(v, t) in &self.visits {
            let Some(&(u, s)) = out.last() else {
                out.push((v, t));
                continue;
            };
            if u == v {
                if t > s {
                    out.push((v, t));
                }
                continue;
            }
            if let Some(e) = index.get(u, v) {
                let depart = t - inst.edges[e].cost;
                if depart > s {
                    out.push((u, depart));
                }
            }
            out.push((v, t));
        }
        Walk { visits: out }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkReport {
    pub valid: bool,
    pub cost: Time,
    pub collected: BTreeSet<usize>,
    pub profit: Profit,
    pub violation: Option<String>,
}

impl WalkReport {
    fn invalid(cost: Time, why: String) -> Self {
        WalkReport {
            valid: false,
            cost,
            collected: BTreeSet::new(),
            profit: 0,
            violation: Some(why),
        }
    }
}

/// Checks a walk against the instance and scores it.
///
/// A vertex is collected if the walk is present at it at some time inside one
/// of its windows; presence covers the whole span of an explicit wait.
pub fn validate_walk(inst: &Instance, w: &Walk) -> WalkReport {
    let Some(&(first_v, first_t)) = w.visits.first() else {
        return WalkReport::invalid(0, "empty walk".into());
    };
    let (_, last_t) = *w.visits.last().unwrap();
    let cost = last_t - first_t;
    if first_v != inst.start {
        return WalkReport::invalid(cost, format!("walk starts at {first_v}, not at {}", inst.start));
    }
    if first_t < 0 {
        return WalkReport::invalid(cost, "negative start time".into());
    }
    let n = inst.n();
    if let Some(&(v, _)) = w.visits.iter().find(|(v, _)| *v >= n) {
        return WalkReport::invalid(cost, format!("vertex {v} out of range"));
    }
    let index = inst.edge_index();
    for (k, pair) in w.visits.windows(2).enumerate() {
        let (u, t) = pair[0];
        let (v, t2) = pair[1];
        if u == v {
            if t2 <= t {
                return WalkReport::invalid(
                    cost,
                    format!("step {}: wait at {u} does not advance time ({t} -> {t2})", k + 1),
                );
            }
            continue;
        }
        let Some(e) = index.get(u, v) else {
            return WalkReport::invalid(cost, format!("step {}: no edge {u} -> {v}", k + 1));
        };
        let edge = &inst.edges[e];
        if t2 != t + edge.cost {
            return WalkReport::invalid(
                cost,
                format!(
                    "step {}: movement time mismatch on {u} -> {v}: {t} + {} != {t2}",
                    k + 1,
                    edge.cost
                ),
            );
        }
        if !edge.traversable_at(t) {
            return WalkReport::invalid(
                cost,
                format!("step {}: edge {u} -> {v} inactive during traversal [{t}, {t2}]", k + 1),
            );
        }
    }
    if last_t > inst.budget {
        return WalkReport::invalid(
            cost,
            format!("budget exceeded: walk ends at {last_t} > {}", inst.budget),
        );
    }

    let mut collected = BTreeSet::new();
    for (k, &(v, t)) in w.visits.iter().enumerate() {
        let until = match w.visits.get(k + 1) {
            Some(&(next, t2)) if next == v => t2,
            _ => t,
        };
        if inst.collectible_during(v, t, until) {
            collected.insert(v);
        }
    }
    let profit = collected.iter().map(|&v| inst.profit(v)).sum();
    WalkReport {
        valid: true,
        cost,
        collected,
        profit,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EdgeSpec, TimeWindow, VertexSpec};

    fn two_vertex_path() -> Instance {
        Instance::directed_path(
            vec![
                VertexSpec::new(1, vec![TimeWindow::new(0, 0)]),
                VertexSpec::new(1, vec![TimeWindow::new(1, 1)]),
            ],
            &[1],
            1,
        )
    }

    #[test]
    fn direct_traversal_collects_both() {
        let r = validate_walk(&two_vertex_path(), &Walk::new(vec![(0, 0), (1, 1)]));
        assert!(r.valid);
        assert_eq!(r.profit, 2);
        assert_eq!(r.cost, 1);
    }

    #[test]
    fn implicit_wait_is_rejected() {
        let r = validate_walk(&two_vertex_path(), &Walk::new(vec![(0, 0), (1, 2)]));
        assert!(!r.valid);
        assert!(r.violation.unwrap().contains("movement time mismatch"));
    }

    #[test]
    fn traversal_must_fit_activity() {
        let mut inst = Instance::undirected_path(
            vec![VertexSpec::plain(1), VertexSpec::plain(1)],
            &[1],
            0,
            5,
        );
        inst.edges[0] = EdgeSpec::new(0, 1, 1).with_activity(vec![TimeWindow::new(0, 1)]);
        let ok = validate_walk(&inst, &Walk::new(vec![(0, 0), (1, 1)]));
        assert!(ok.valid);
        let late = validate_walk(&inst, &Walk::new(vec![(0, 0), (0, 1), (1, 2)]));
        assert!(!late.valid);
        assert!(late.violation.unwrap().contains("inactive during traversal"));
    }

    #[test]
    fn budget_and_start_checks() {
        let inst = two_vertex_path();
        let r = validate_walk(&inst, &Walk::new(vec![(0, 0), (0, 2)]));
        assert!(r.violation.unwrap().contains("budget exceeded"));
        let r = validate_walk(&inst, &Walk::new(vec![(1, 0)]));
        assert!(!r.valid);
        let r = validate_walk(&inst, &Walk::new(vec![(0, 0), (0, 0)]));
        assert!(!r.valid);
    }

    #[test]
    fn waiting_through_a_window_collects() {
        let inst = Instance::directed_path(
            vec![VertexSpec::new(3, vec![TimeWindow::new(2, 3)])],
            &[],
            10,
        );
        let r = validate_walk(&inst, &Walk::new(vec![(0, 0), (0, 5)]));
        assert!(r.valid);
        assert_eq!(r.profit, 3);
    }

    #[test]
    fn windowless_vertex_in_timed_instance_is_pass_through() {
        let inst = Instance::directed_path(
            vec![
                VertexSpec::new(1, vec![TimeWindow::new(0, 5)]),
                VertexSpec::plain(7),
            ],
            &[1],
            5,
        );
        let r = validate_walk(&inst, &Walk::new(vec![(0, 0), (1, 1)]));
        assert_eq!(r.profit, 1);
    }

    #[test]
    fn canonicalize_inserts_waits() {
        let inst = two_vertex_path();
        let loose = Walk::new(vec![(0, 0), (1, 3), (1, 3)]);
        assert_eq!(loose.canonicalize(&inst).visits, vec![(0, 0), (0, 2), (1, 3)]);
    }
}
