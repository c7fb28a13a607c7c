//! Connectivity DP over a nice decomposition.
//!
//! An open walk from `s` uses every edge at most twice in an optimal
//! solution, and a multiset of edges is the edge set of such a walk exactly
//! when it is connected, contains `s`, and has no odd vertex other than `s`
//! and one end vertex. A state records, for the vertices of the bag, whether
//! they take part, how the chosen edges below connect them, and their degree
//! parity, plus whether an odd vertex has already been forgotten. Each state
//! keeps a Pareto list of (profit, cost) pairs.

use std::collections::HashMap;

use super::decomposition::{require_undirected, NiceDecomposition, NiceKind};
use crate::error::{Result, SolveError};
use crate::model::{Instance, Profit, Solution, Time, Walk};

pub const DEFAULT_MAX_WIDTH: usize = 6;

/// Per bag position: 0 when absent, else `1 + 2 * block + parity`. The last
/// byte is the forgotten-odd flag.
type Key = Vec<u8>;

#[derive(Clone, Copy, Debug)]
enum Back {
    Start,
    One { key: u32, at: u32, mult: u8 },
    Two { key: u32, at: u32, key2: u32, at2: u32 },
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    profit: Profit,
    cost: Time,
    back: Back,
}

#[derive(Default)]
struct Table {
    keys: Vec<Key>,
    lists: Vec<Vec<Entry>>,
}

struct Collector {
    budget: Time,
    map: HashMap<Key, Vec<Entry>>,
}

impl Collector {
    fn new(budget: Time) -> Self {
        Collector {
            budget,
            map: HashMap::new(),
        }
    }

    fn add(&mut self, key: Key, e: Entry) {
        if e.cost <= self.budget {
            self.map.entry(key).or_default().push(e);
        }
    }

    fn finish(self) -> Table {
        let mut keys: Vec<Key> = self.map.keys().cloned().collect();
        keys.sort();
        let mut map = self.map;
        let lists = keys
            .iter()
            .map(|k| pareto(map.remove(k).unwrap()))
            .collect();
        Table { keys, lists }
    }
}

/// Keeps the entries not dominated in (more profit, less cost), ordered by
/// increasing profit and so by increasing cost.
fn pareto(mut v: Vec<Entry>) -> Vec<Entry> {
    v.sort_by_key(|e| (std::cmp::Reverse(e.profit), e.cost));
    let mut out: Vec<Entry> = vec![];
    for e in v {
        if out.last().is_none_or(|l| e.cost < l.cost) {
            out.push(e);
        }
    }
    out.reverse();
    debug_assert!(out.windows(2).all(|w| w[0].profit < w[1].profit && w[0].cost < w[1].cost));
    out
}

#[derive(Clone)]
struct State {
    /// `None` when the bag vertex takes no part.
    block: Vec<Option<u8>>,
    odd: Vec<bool>,
    flag: bool,
}

impl State {
    fn decode(key: &[u8]) -> Self {
        let k = key.len() - 1;
        let mut block = Vec::with_capacity(k);
        let mut odd = Vec::with_capacity(k);
        for &c in &key[..k] {
            if c == 0 {
                block.push(None);
                odd.push(false);
            } else {
                block.push(Some((c - 1) / 2));
                odd.push((c - 1) % 2 == 1);
            }
        }
        State {
            block,
            odd,
            flag: key[k] == 1,
        }
    }

    /// Canonical key: blocks relabelled in order of first appearance.
    fn encode(&self) -> Key {
        let mut relabel: Vec<Option<u8>> = vec![None; self.block.len() + 1];
        let mut next = 0u8;
        let mut key = Vec::with_capacity(self.block.len() + 1);
        for (b, &odd) in self.block.iter().zip(&self.odd) {
            match b {
                None => key.push(0),
                Some(b) => {
                    let b = *b as usize;
                    let l = *relabel[b].get_or_insert_with(|| {
                        next += 1;
                        next - 1
                    });
                    key.push(1 + 2 * l + odd as u8);
                }
            }
        }
        key.push(self.flag as u8);
        key
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (x, y) = (self.block[a].unwrap(), self.block[b].unwrap());
        for blk in self.block.iter_mut().flatten() {
            if *blk == y {
                *blk = x;
            }
        }
    }
}

fn pos(bag: &[usize], v: usize) -> usize {
    bag.binary_search(&v).expect("vertex in bag")
}

/// Runs the DP with the given profits and returns the best walk.
pub(crate) fn optimize(inst: &Instance, dec: &NiceDecomposition, profit: &[Profit], max_width: usize) -> Result<Walk> {
    if dec.width > max_width {
        return Err(SolveError::resource(format!(
            "decomposition width {} exceeds the cap of {max_width}",
            dec.width
        )));
    }
    let budget = inst.budget;
    let s = inst.start;
    let mut tables: Vec<Table> = Vec::with_capacity(dec.nodes.len());
    for node in &dec.nodes {
        let bag = &node.bag;
        let mut out = Collector::new(budget);
        match node.kind {
            NiceKind::Leaf => {
                let st = State {
                    block: vec![Some(0)],
                    odd: vec![false],
                    flag: false,
                };
                out.add(
                    st.encode(),
                    Entry {
                        profit: profit[s],
                        cost: 0,
                        back: Back::Start,
                    },
                );
            }
            NiceKind::IntroduceVertex(v) => {
                let child = &tables[node.children[0]];
                let p = pos(bag, v);
                let fresh = bag.len() as u8;
                for (ki, (key, list)) in child.keys.iter().zip(&child.lists).enumerate() {
                    let st = State::decode(key);
                    for take in [false, true] {
                        let mut nst = st.clone();
                        nst.block.insert(p, take.then_some(fresh));
                        nst.odd.insert(p, false);
                        let nkey = nst.encode();
                        let gain = if take { profit[v] } else { 0 };
                        for (at, e) in list.iter().enumerate() {
                            out.add(
                                nkey.clone(),
                                Entry {
                                    profit: e.profit + gain,
                                    cost: e.cost,
                                    back: Back::One { key: ki as u32, at: at as u32, mult: 0 },
                                },
                            );
                        }
                    }
                }
            }
            NiceKind::IntroduceEdge(ei) => {
                let child = &tables[node.children[0]];
                let edge = &inst.edges[ei];
                let (a, b) = (pos(bag, edge.u), pos(bag, edge.v));
                for (ki, (key, list)) in child.keys.iter().zip(&child.lists).enumerate() {
                    let st = State::decode(key);
                    let usable = st.block[a].is_some() && st.block[b].is_some();
                    for mult in 0..=if usable { 2u8 } else { 0 } {
                        let mut nst = st.clone();
                        if mult > 0 {
                            nst.merge(a, b);
                            if mult == 1 {
                                nst.odd[a] ^= true;
                                nst.odd[b] ^= true;
                            }
                        }
                        let nkey = nst.encode();
                        for (at, e) in list.iter().enumerate() {
                            out.add(
                                nkey.clone(),
                                Entry {
                                    profit: e.profit,
                                    cost: e.cost + mult as Time * edge.cost,
                                    back: Back::One { key: ki as u32, at: at as u32, mult },
                                },
                            );
                        }
                    }
                }
            }
            NiceKind::Forget(w) => {
                let child = &tables[node.children[0]];
                let p = pos(&dec.nodes[node.children[0]].bag, w);
                for (ki, (key, list)) in child.keys.iter().zip(&child.lists).enumerate() {
                    let mut st = State::decode(key);
                    if let Some(blk) = st.block[p] {
                        // the component must still reach the bag
                        let shared = st.block.iter().enumerate().any(|(i, b)| i != p && *b == Some(blk));
                        if !shared {
                            continue;
                        }
                        if st.odd[p] {
                            if st.flag {
                                continue;
                            }
                            st.flag = true;
                        }
                    }
                    st.block.remove(p);
                    st.odd.remove(p);
                    let nkey = st.encode();
                    for (at, e) in list.iter().enumerate() {
                        out.add(
                            nkey.clone(),
                            Entry {
                                back: Back::One { key: ki as u32, at: at as u32, mult: 0 },
                                ..*e
                            },
                        );
                    }
                }
            }
            NiceKind::Join => {
                let (l, r) = (&tables[node.children[0]], &tables[node.children[1]]);
                let mut by_presence: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
                for (ki, key) in r.keys.iter().enumerate() {
                    let pres = key[..bag.len()].iter().map(|&c| c != 0).collect();
                    by_presence.entry(pres).or_default().push(ki);
                }
                for (k1, key1) in l.keys.iter().enumerate() {
                    let pres: Vec<bool> = key1[..bag.len()].iter().map(|&c| c != 0).collect();
                    let shared: Profit = (0..bag.len()).filter(|&i| pres[i]).map(|i| profit[bag[i]]).sum();
                    let Some(partners) = by_presence.get(&pres) else { continue };
                    let s1 = State::decode(key1);
                    for &k2 in partners {
                        let s2 = State::decode(&r.keys[k2]);
                        if s1.flag && s2.flag {
                            continue;
                        }
                        let mut st = s1.clone();
                        st.flag |= s2.flag;
                        for i in 0..bag.len() {
                            st.odd[i] ^= s2.odd[i];
                        }
                        // union of the two partitions
                        for i in 0..bag.len() {
                            for j in i + 1..bag.len() {
                                if s2.block[i].is_some() && s2.block[i] == s2.block[j] && st.block[i] != st.block[j] {
                                    st.merge(i, j);
                                }
                            }
                        }
                        let nkey = st.encode();
                        for (a1, e1) in l.lists[k1].iter().enumerate() {
                            for (a2, e2) in r.lists[k2].iter().enumerate() {
                                if e1.cost + e2.cost > budget {
                                    break;
                                }
                                out.add(
                                    nkey.clone(),
                                    Entry {
                                        profit: e1.profit + e2.profit - shared,
                                        cost: e1.cost + e2.cost,
                                        back: Back::Two {
                                            key: k1 as u32,
                                            at: a1 as u32,
                                            key2: k2 as u32,
                                            at2: a2 as u32,
                                        },
                                    },
                                );
                            }
                        }
                    }
                }
            }
        }
        let table = out.finish();
        debug_assert!(table.keys.len() <= state_bound(bag.len()), "state count above bound");
        tables.push(table);
    }

    // at the root only s is left; its parity must match the flag
    let root = &tables[dec.root];
    let mut best: Option<(Profit, Time, usize, usize)> = None;
    for (ki, key) in root.keys.iter().enumerate() {
        let st = State::decode(key);
        if st.odd[0] != st.flag {
            continue;
        }
        if let Some((at, e)) = root.lists[ki].iter().enumerate().next_back() {
            if best.is_none_or(|b| (e.profit, -e.cost) > (b.0, -b.1)) {
                best = Some((e.profit, e.cost, ki, at));
            }
        }
    }
    let (_, _, ki, at) = best.expect("the start alone is always feasible");
    let mult = edge_multiplicities(inst, dec, &tables, ki, at);
    Ok(euler_walk(inst, &mult))
}

fn state_bound(k: usize) -> usize {
    // presence, parity and block label per position, plus the flag
    let per = 1 + 2 * k;
    per.saturating_pow(k as u32).saturating_mul(2)
}

fn edge_multiplicities(inst: &Instance, dec: &NiceDecomposition, tables: &[Table], key: usize, at: usize) -> Vec<u8> {
    let mut mult = vec![0u8; inst.edges.len()];
    let mut stack = vec![(dec.root, key, at)];
    while let Some((node, key, at)) = stack.pop() {
        let n = &dec.nodes[node];
        match tables[node].lists[key][at].back {
            Back::Start => {}
            Back::One { key, at, mult: m } => {
                if let NiceKind::IntroduceEdge(e) = n.kind {
                    mult[e] = m;
                }
                stack.push((n.children[0], key as usize, at as usize));
            }
            Back::Two { key, at, key2, at2 } => {
                stack.push((n.children[0], key as usize, at as usize));
                stack.push((n.children[1], key2 as usize, at2 as usize));
            }
        }
    }
    mult
}

/// Walk from the start through every chosen edge copy (Hierholzer).
fn euler_walk(inst: &Instance, mult: &[u8]) -> Walk {
    let n = inst.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![vec![]; n];
    let mut copies = 0;
    for (e, &m) in mult.iter().enumerate() {
        for _ in 0..m {
            let ed = &inst.edges[e];
            adj[ed.u].push((ed.v, copies));
            adj[ed.v].push((ed.u, copies));
            copies += 1;
        }
    }
    let mut used = vec![false; copies];
    let mut cost_of = vec![0; copies];
    let mut c = 0;
    for (e, &m) in mult.iter().enumerate() {
        for _ in 0..m {
            cost_of[c] = inst.edges[e].cost;
            c += 1;
        }
    }
    let mut ptr = vec![0usize; n];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(inst.start, None)];
    let mut trail: Vec<(usize, Option<usize>)> = vec![];
    while let Some(&(v, via)) = stack.last() {
        while ptr[v] < adj[v].len() && used[adj[v][ptr[v]].1] {
            ptr[v] += 1;
        }
        if ptr[v] == adj[v].len() {
            trail.push((v, via));
            stack.pop();
        } else {
            let (w, id) = adj[v][ptr[v]];
            used[id] = true;
            stack.push((w, Some(id)));
        }
    }
    debug_assert!(used.iter().all(|&u| u));
    // the trail comes out reversed; its first entry is the far end
    trail.reverse();
    let mut walk = Walk::starting_at(inst.start, 0);
    let mut t = 0;
    for i in 1..trail.len() {
        let (v, _) = trail[i];
        let id = trail[i].1.expect("edge copy");
        t += cost_of[id];
        walk.step(v, t);
    }
    walk
}

/// Exact optimum for plain orienteering using a nice decomposition.
pub fn solve_tw(inst: &Instance, dec: &NiceDecomposition) -> Result<Solution> {
    solve_tw_with(inst, dec, DEFAULT_MAX_WIDTH)
}

pub fn solve_tw_with(inst: &Instance, dec: &NiceDecomposition, max_width: usize) -> Result<Solution> {
    check_plain(inst)?;
    dec.check(inst)?;
    let profit: Vec<Profit> = inst.vertices.iter().map(|v| v.profit).collect();
    let walk = optimize(inst, dec, &profit, max_width)?;
    Ok(Solution::scored(inst, walk, "tw-dp"))
}

pub(crate) fn check_plain(inst: &Instance) -> Result<()> {
    require_undirected(inst)?;
    inst.require_untimed()?;
    inst.require_valid()?;
    if inst.has_dynamic_edges() {
        return Err(SolveError::invalid("dynamic edges are not supported by the treewidth DP"));
    }
    Ok(())
}
