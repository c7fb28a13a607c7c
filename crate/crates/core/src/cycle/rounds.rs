//! Exact optimum over walks of at most `k` rounds.
//!
//! The rounds are processed side by side, vertex by vertex: a DP state is the
//! tuple of times at which each round leaves the current vertex. A round only
//! ever leaves a vertex on arrival or at that vertex's release, and the start
//! of each round is guessed from times anchored at a release (or at time 0)
//! followed by whole-cycle moves, so the state space is polynomial for fixed
//! `k`. Vertex 0 is settled last, once every round's return time is known.

use std::collections::HashMap;

use super::CycleView;
use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, Walk};

pub const MAX_ROUNDS: usize = 3;

/// Leave times per round; `None` once the last round has stopped.
type Key = Vec<Option<Time>>;

struct Entry {
    key: Key,
    profit: Profit,
    parent: usize,
}

pub fn solve_k_rounds(inst: &Instance, k: usize) -> Result<Solution> {
    if !(1..=MAX_ROUNDS).contains(&k) {
        return Err(SolveError::invalid(format!("k must be in 1..={MAX_ROUNDS}, got {k}")));
    }
    let view = CycleView::new(inst)?;
    let mut best: Option<(Profit, Walk)> = None;
    for rounds in 1..=k {
        for starts in start_tuples(&view, rounds) {
            if let Some((p, walk)) = best_for_starts(&view, &starts) {
                if best.as_ref().is_none_or(|b| p > b.0) {
                    best = Some((p, walk));
                }
            }
        }
    }
    let walk = best.map_or_else(|| Walk::starting_at(0, 0), |b| b.1);
    Ok(Solution::scored(inst, walk, "cycle-kround"))
}

/// Candidate times at which round `q` (0-based) can leave vertex 0.
fn start_candidates(view: &CycleView, q: usize) -> Vec<Time> {
    let c = view.len;
    let mut out = vec![q as Time * c];
    for (l, w) in view.window.iter().enumerate() {
        let Some(w) = w else { continue };
        if l == 0 {
            out.extend((0..=q).map(|m| w.release + m as Time * c));
        } else if q > 0 {
            out.extend((0..q).map(|m| w.release + view.arc(l, 0) + m as Time * c));
        }
    }
    out.retain(|&t| t <= view.budget);
    out.sort_unstable();
    out.dedup();
    out
}

fn start_tuples(view: &CycleView, rounds: usize) -> Vec<Vec<Time>> {
    let cands: Vec<Vec<Time>> = (0..rounds).map(|q| start_candidates(view, q)).collect();
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(view: &CycleView, cands: &[Vec<Time>], cur: &mut Vec<Time>, out: &mut Vec<Vec<Time>>) {
        let q = cur.len();
        if q == cands.len() {
            out.push(cur.clone());
            return;
        }
        for &s in &cands[q] {
            if cur.last().is_none_or(|&p| s >= p + view.len) {
                cur.push(s);
                rec(view, cands, cur, out);
                cur.pop();
            }
        }
    }
    rec(view, &cands, &mut cur, &mut out);
    out
}

fn best_for_starts(view: &CycleView, starts: &[Time]) -> Option<(Profit, Walk)> {
    let n = view.n;
    let r = starts.len();
    let last = r - 1;
    let mut layers: Vec<Vec<Entry>> = Vec::with_capacity(n);
    let first: Key = starts.iter().map(|&s| Some(s)).collect();
    let mut stopped = first.clone();
    stopped[last] = None;
    layers.push(vec![
        Entry {
            key: first,
            profit: 0,
            parent: 0,
        },
        Entry {
            key: stopped,
            profit: 0,
            parent: 0,
        },
    ]);

    for i in 1..n {
        let w = view.window[i];
        let p = view.profit[i];
        let mut next: Vec<Entry> = vec![];
        let mut index: HashMap<Key, usize> = HashMap::new();
        for (pi, e) in layers[i - 1].iter().enumerate() {
            // per-round options as (leave, collected)
            let mut options: Vec<Vec<(Option<Time>, bool)>> = Vec::with_capacity(r);
            let mut dead = false;
            for (q, l) in e.key.iter().enumerate() {
                let Some(l) = *l else {
                    options.push(vec![(None, false)]);
                    continue;
                };
                let a = l + view.cost[i - 1];
                // the last round may stay at the previous vertex for good
                let mut opts = if q == last { vec![(None, false)] } else { vec![] };
                if a > view.budget {
                    if q != last {
                        dead = true;
                    }
                    options.push(opts);
                    continue;
                }
                opts.push((Some(a), w.is_some_and(|w| w.contains(a))));
                if let Some(w) = w {
                    if p > 0 && w.release > a && w.release <= view.budget {
                        opts.push((Some(w.release), true));
                    }
                }
                options.push(opts);
            }
            if dead || options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut choice = vec![0usize; r];
            loop {
                let mut key: Key = Vec::with_capacity(r);
                let mut hit = false;
                for q in 0..r {
                    let (l, h) = options[q][choice[q]];
                    key.push(l);
                    hit |= h;
                }
                let gain = e.profit + if hit { p } else { 0 };
                match index.get(&key) {
                    Some(&at) if next[at].profit >= gain => {}
                    Some(&at) => {
                        next[at].profit = gain;
                        next[at].parent = pi;
                    }
                    None => {
                        index.insert(key.clone(), next.len());
                        next.push(Entry {
                            key,
                            profit: gain,
                            parent: pi,
                        });
                    }
                }
                let mut q = 0;
                while q < r {
                    choice[q] += 1;
                    if choice[q] < options[q].len() {
                        break;
                    }
                    choice[q] = 0;
                    q += 1;
                }
                if q == r {
                    break;
                }
            }
        }
        layers.push(next);
    }

    let w0 = view.window[0];
    let mut best: Option<(Profit, usize)> = None;
    'entries: for (at, e) in layers[n - 1].iter().enumerate() {
        let mut hit = w0.is_some_and(|w| w.intersects(0, starts[0]));
        for q in 0..last {
            let end = e.key[q].expect("complete round") + view.cost[n - 1];
            if end > starts[q + 1] {
                continue 'entries;
            }
            hit |= w0.is_some_and(|w| w.intersects(end, starts[q + 1]));
        }
        let total = e.profit + if hit { view.profit[0] } else { 0 };
        if best.is_none_or(|b| total > b.0) {
            best = Some((total, at));
        }
    }
    let (profit, mut at) = best?;

    let mut leave: Vec<Key> = vec![vec![]; n];
    for i in (0..n).rev() {
        let e = &layers[i][at];
        leave[i] = e.key.clone();
        at = e.parent;
    }
    let mut walk = Walk::starting_at(0, 0);
    for q in 0..r {
        if q > 0 {
            walk.step(0, leave[n - 1][q - 1].unwrap() + view.cost[n - 1]);
        }
        walk.wait_until(starts[q]);
        for i in 1..n {
            let Some(l) = leave[i][q] else { break };
            walk.step(i, leave[i - 1][q].unwrap() + view.cost[i - 1]);
            walk.wait_until(l);
        }
    }
    Some((profit, walk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::tests::{random_cycle, unit_cycle};
    use crate::model::{validate_walk, TimeWindow, VertexSpec};
    use crate::oracle::{oracle_op, oracle_op_with, OracleConfig};
    use crate::path::solve_directed_path_mtw;
    use proptest::prelude::*;

    fn restricted(inst: &Instance, k: usize) -> Profit {
        let cfg = OracleConfig {
            max_moves: Some(k * inst.n() - 1),
            ..OracleConfig::default()
        };
        oracle_op_with(inst, &cfg).unwrap().profit
    }

    #[test]
    fn one_round_misses_second_lap() {
        // waiting for the second vertex makes the third one late
        let inst = unit_cycle(&[(0, 0, 1), (4, 4, 3), (2, 2, 1)], 12);
        assert_eq!(solve_k_rounds(&inst, 1).unwrap().profit, 4);
        assert_eq!(solve_k_rounds(&inst, 2).unwrap().profit, 5);
        assert_eq!(oracle_op(&inst).unwrap().profit, 5);
    }

    #[test]
    fn k_out_of_range() {
        let inst = unit_cycle(&[(0, 0, 1); 3], 5);
        assert!(solve_k_rounds(&inst, 0).is_err());
        assert!(solve_k_rounds(&inst, 4).is_err());
    }

    #[test]
    fn short_budget_is_a_path() {
        let inst = Instance::directed_cycle(
            vec![
                VertexSpec::new(2, vec![TimeWindow::new(1, 2)]),
                VertexSpec::new(3, vec![TimeWindow::new(2, 4)]),
                VertexSpec::new(4, vec![TimeWindow::new(6, 6)]),
            ],
            &[2, 2, 5],
            6,
        );
        let path = Instance::directed_path(inst.vertices.clone(), &[2, 2], 6);
        assert_eq!(
            solve_k_rounds(&inst, 1).unwrap().profit,
            solve_directed_path_mtw(&path).unwrap().profit
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn matches_restricted_oracle(inst in random_cycle(4, 3, 10), k in 1..=3usize) {
            let sol = solve_k_rounds(&inst, k).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            prop_assert!(sol.walk.len() <= 2 * k * inst.n() + 1);
            prop_assert_eq!(sol.profit, restricted(&inst, k));
        }
    }
}
