//! Monotone profit envelope: a step function from (rebased) departure time to
//! the best profit collectible so far.
//!
//! The function is stored as its increments: a treap keyed by breakpoint time
//! whose nodes carry the jump at that time and the sum of jumps in their
//! subtree, so `query(t)` is a prefix sum along one root-to-leaf path.
//! Nodes are reference counted and copied on write; cloning an envelope is
//! O(1) and later updates never disturb the clone.

use std::rc::Rc;

use crate::error::{Result, SolveError};
use crate::model::{Profit, Time};

type Link = Option<Rc<Node>>;

#[derive(Clone, Debug)]
struct Node {
    key: Time,
    delta: Profit,
    sum: Profit,
    prio: u64,
    left: Link,
    right: Link,
}

impl Node {
    fn leaf(key: Time, delta: Profit, prio: u64) -> Rc<Node> {
        Rc::new(Node {
            key,
            delta,
            sum: delta,
            prio,
            left: None,
            right: None,
        })
    }

    fn update(&mut self) {
        self.sum = self.delta + sum(&self.left) + sum(&self.right);
    }
}

fn sum(link: &Link) -> Profit {
    link.as_ref().map_or(0, |n| n.sum)
}

/// Splits into keys `< key` and keys `>= key`.
fn split(link: Link, key: Time) -> (Link, Link) {
    match link {
        None => (None, None),
        Some(mut rc) => {
            let node = Rc::make_mut(&mut rc);
            if node.key < key {
                let (l, r) = split(node.right.take(), key);
                node.right = l;
                node.update();
                (Some(rc), r)
            } else {
                let (l, r) = split(node.left.take(), key);
                node.left = r;
                node.update();
                (l, Some(rc))
            }
        }
    }
}

/// Joins two treaps where every key of `a` is below every key of `b`.
fn merge(a: Link, b: Link) -> Link {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(mut x), Some(mut y)) => {
            if x.prio >= y.prio {
                let node = Rc::make_mut(&mut x);
                node.right = merge(node.right.take(), Some(y));
                node.update();
                Some(x)
            } else {
                let node = Rc::make_mut(&mut y);
                node.left = merge(Some(x), node.left.take());
                node.update();
                Some(y)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProfitEnvelope {
    root: Link,
    horizon: Time,
    breakpoints: usize,
    seed: u64,
}

impl ProfitEnvelope {
    /// The zero function on `[0, horizon)`.
    pub fn zero(horizon: Time) -> Self {
        ProfitEnvelope {
            root: None,
            horizon,
            breakpoints: 0,
            seed: 0x9E37_79B9_7F4A_7C15,
        }
    }

    /// `0` before `initial_release`, `initial_profit` from it onwards.
    pub fn new(horizon: Time, initial_release: Time, initial_profit: Profit) -> Result<Self> {
        if horizon < 1 {
            return Err(SolveError::invalid("envelope horizon must be positive"));
        }
        if initial_release < 0 || initial_release > horizon {
            return Err(SolveError::invalid(format!(
                "release {initial_release} outside [0, {horizon}]"
            )));
        }
        if initial_profit < 0 {
            return Err(SolveError::invalid("negative profit"));
        }
        let mut env = ProfitEnvelope::zero(horizon);
        if initial_release < horizon {
            env.add_at(initial_release, initial_profit);
        }
        Ok(env)
    }

    /// Rebuilds an envelope from `(start, value)` pieces with non-decreasing
    /// values. The first piece must start at 0.
    pub fn from_steps(horizon: Time, steps: &[(Time, Profit)]) -> Self {
        let mut env = ProfitEnvelope::zero(horizon);
        let mut prev = 0;
        for &(t, value) in steps {
            debug_assert!(value >= prev);
            env.add_at(t, value - prev);
            prev = value;
        }
        env
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    /// Number of jumps in the step function.
    pub fn breakpoints(&self) -> usize {
        self.breakpoints
    }

    /// Value of the step function at `t`.
    pub fn query(&self, t: Time) -> Result<Profit> {
        if t < 0 || t >= self.horizon {
            return Err(SolveError::invalid(format!(
                "query time {t} outside [0, {})",
                self.horizon
            )));
        }
        Ok(self.value_at(t))
    }

    /// Unchecked prefix sum; times past the horizon read the last value.
    pub(crate) fn value_at(&self, t: Time) -> Profit {
        let mut acc = 0;
        let mut cur = &self.root;
        while let Some(node) = cur {
            if node.key <= t {
                acc += sum(&node.left) + node.delta;
                cur = &node.right;
            } else {
                cur = &node.left;
            }
        }
        acc
    }

    /// Maximum over the whole horizon.
    pub fn max_value(&self) -> Profit {
        sum(&self.root)
    }

    /// Collect `profit` during `[release, deadline]`: afterwards
    /// `new(t) = old(t)` for `t < release` and
    /// `new(t) = max(old(t), old(min(t, deadline)) + profit)` otherwise.
    pub fn apply_window(&mut self, release: Time, deadline: Time, profit: Profit) -> Result<()> {
        if release < 0 || release > deadline || deadline >= self.horizon {
            return Err(SolveError::invalid(format!(
                "window [{release}, {deadline}] outside [0, {})",
                self.horizon
            )));
        }
        if profit < 0 {
            return Err(SolveError::invalid("negative profit"));
        }
        self.apply_window_unchecked(release, deadline, profit);
        Ok(())
    }

    pub(crate) fn apply_window_unchecked(&mut self, release: Time, deadline: Time, profit: Profit) {
        if profit == 0 {
            return;
        }
        self.add_at(release, profit);
        // The first `profit` units of increase after the deadline are now
        // dominated by collecting at the deadline; absorb them.
        let mut rest = profit;
        while rest > 0 {
            let Some((key, delta)) = self.first_after(deadline) else {
                break;
            };
            let take = delta.min(rest);
            self.add_at(key, -take);
            rest -= take;
        }
    }

    /// Pointwise maximum with another envelope over the same horizon.
    pub fn max_with(&mut self, other: &ProfitEnvelope) {
        let a = self.steps();
        let b = other.steps();
        let mut times: Vec<Time> = a.iter().chain(b.iter()).map(|&(t, _)| t).collect();
        times.sort_unstable();
        times.dedup();
        let (mut i, mut j) = (0, 0);
        let mut merged: Vec<(Time, Profit)> = Vec::with_capacity(times.len());
        for t in times {
            while i + 1 < a.len() && a[i + 1].0 <= t {
                i += 1;
            }
            while j + 1 < b.len() && b[j + 1].0 <= t {
                j += 1;
            }
            let v = a[i].1.max(b[j].1);
            if merged.last().is_none_or(|&(_, last)| last != v) {
                merged.push((t, v));
            }
        }
        *self = ProfitEnvelope {
            seed: self.seed,
            ..ProfitEnvelope::from_steps(self.horizon, &merged)
        };
    }

    /// Constant pieces as `(start, value)`, beginning with `(0, value(0))`.
    pub fn steps(&self) -> Vec<(Time, Profit)> {
        let mut jumps = Vec::with_capacity(self.breakpoints);
        collect(&self.root, &mut jumps);
        let mut out = Vec::with_capacity(jumps.len() + 1);
        let mut acc = 0;
        if jumps.first().is_none_or(|&(t, _)| t > 0) {
            out.push((0, 0));
        }
        for (t, d) in jumps {
            acc += d;
            out.push((t, acc));
        }
        out
    }

    fn next_prio(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.seed;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.seed = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Adds `delta` to the jump at `key`, creating or deleting the node.
    /// Only the nodes on the path to `key` are copied.
    fn add_at(&mut self, key: Time, delta: Profit) {
        if delta == 0 {
            return;
        }
        let root = self.root.take();
        if contains(&root, key) {
            let (root, removed) = adjust(root, key, delta);
            if removed {
                self.breakpoints -= 1;
            }
            self.root = root;
        } else {
            debug_assert!(delta > 0);
            self.breakpoints += 1;
            let prio = self.next_prio();
            self.root = Some(insert(root, Node::leaf(key, delta, prio)));
        }
    }

    fn first_after(&self, t: Time) -> Option<(Time, Profit)> {
        let mut best = None;
        let mut cur = &self.root;
        while let Some(node) = cur {
            if node.key > t {
                best = Some((node.key, node.delta));
                cur = &node.left;
            } else {
                cur = &node.right;
            }
        }
        best
    }
}

/// Same window contract as [`ProfitEnvelope`], restricted to breakpoints
/// drawn from a key set fixed up front. Increments live in a Fenwick tree
/// over the sorted keys; instead of snapshots, every change is logged and
/// can be rolled back.
pub(crate) struct UndoEnvelope {
    keys: Vec<Time>,
    tree: Vec<Profit>,
    delta: Vec<Profit>,
    log: Vec<(usize, Profit)>,
}

impl UndoEnvelope {
    /// `keys` must contain every release that will be applied.
    pub(crate) fn new(mut keys: Vec<Time>) -> Self {
        keys.sort_unstable();
        keys.dedup();
        let n = keys.len();
        UndoEnvelope {
            keys,
            tree: vec![0; n + 1],
            delta: vec![0; n],
            log: vec![],
        }
    }

    fn add(&mut self, k: usize, d: Profit) {
        self.delta[k] += d;
        let mut i = k + 1;
        while i < self.tree.len() {
            self.tree[i] += d;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of the first `count` increments.
    fn prefix(&self, count: usize) -> Profit {
        let mut i = count;
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i &= i - 1;
        }
        acc
    }

    /// Smallest `count` whose prefix exceeds `target`, minus one: the
    /// position of the first increment pushing the sum past `target`.
    fn first_exceeding(&self, mut target: Profit) -> Option<usize> {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.checked_next_power_of_two().unwrap_or(0).max(1);
        while step > 0 {
            if pos + step <= n && self.tree[pos + step] <= target {
                pos += step;
                target -= self.tree[pos];
            }
            step /= 2;
        }
        (pos < n).then_some(pos)
    }

    pub(crate) fn value_at(&self, t: Time) -> Profit {
        self.prefix(self.keys.partition_point(|&k| k <= t))
    }

    pub(crate) fn apply_window(&mut self, release: Time, deadline: Time, profit: Profit) {
        if profit == 0 {
            return;
        }
        let k = self.keys.binary_search(&release).expect("release is a registered key");
        self.add(k, profit);
        self.log.push((k, profit));
        let after = self.keys.partition_point(|&x| x <= deadline);
        let base = self.prefix(after);
        let mut rest = profit;
        while rest > 0 {
            let Some(j) = self.first_exceeding(base) else {
                break;
            };
            let take = self.delta[j].min(rest);
            self.add(j, -take);
            self.log.push((j, -take));
            rest -= take;
        }
    }

    pub(crate) fn mark(&self) -> usize {
        self.log.len()
    }

    pub(crate) fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (k, d) = self.log.pop().expect("log is longer than mark");
            self.add(k, -d);
        }
    }
}

fn contains(mut cur: &Link, key: Time) -> bool {
    while let Some(node) = cur {
        if node.key == key {
            return true;
        }
        cur = if key < node.key { &node.left } else { &node.right };
    }
    false
}

/// Changes the jump of an existing key; the flag reports a deleted node.
fn adjust(link: Link, key: Time, delta: Profit) -> (Link, bool) {
    let mut rc = link.expect("key is present");
    let node = Rc::make_mut(&mut rc);
    let removed = if key < node.key {
        let (l, removed) = adjust(node.left.take(), key, delta);
        node.left = l;
        removed
    } else if key > node.key {
        let (r, removed) = adjust(node.right.take(), key, delta);
        node.right = r;
        removed
    } else {
        node.delta += delta;
        debug_assert!(node.delta >= 0);
        if node.delta == 0 {
            return (merge(node.left.take(), node.right.take()), true);
        }
        false
    };
    node.update();
    (Some(rc), removed)
}

fn insert(link: Link, mut fresh: Rc<Node>) -> Rc<Node> {
    match link {
        Some(mut rc) if rc.prio >= fresh.prio => {
            let node = Rc::make_mut(&mut rc);
            if fresh.key < node.key {
                node.left = Some(insert(node.left.take(), fresh));
            } else {
                node.right = Some(insert(node.right.take(), fresh));
            }
            node.update();
            rc
        }
        other => {
            let (l, r) = split(other, fresh.key);
            let node = Rc::make_mut(&mut fresh);
            node.left = l;
            node.right = r;
            node.update();
            fresh
        }
    }
}

fn collect(link: &Link, out: &mut Vec<(Time, Profit)>) {
    if let Some(node) = link {
        collect(&node.left, out);
        out.push((node.key, node.delta));
        collect(&node.right, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn undo_envelope_matches_and_rolls_back() {
        let mut naive = vec![0; 40];
        let ops = [(3, 10, 4), (0, 2, 1), (12, 20, 3), (5, 5, 7), (3, 30, 2), (25, 39, 9)];
        let mut env = UndoEnvelope::new(ops.iter().map(|o| o.0).collect());
        let mut history = vec![(env.mark(), naive.clone())];
        for &(r, d, p) in &ops {
            env.apply_window(r, d, p);
            naive_apply(&mut naive, r, d, p);
            for t in 0..40 {
                assert_eq!(env.value_at(t), naive[t as usize], "at {t}");
            }
            history.push((env.mark(), naive.clone()));
        }
        for (mark, vals) in history.into_iter().rev() {
            env.undo_to(mark);
            for t in 0..40 {
                assert_eq!(env.value_at(t), vals[t as usize]);
            }
        }
    }

    /// Pointwise reference implementation of the window contract.
    fn naive_apply(vals: &mut [Profit], r: Time, d: Time, p: Profit) {
        let old = vals.to_vec();
        for t in (r as usize)..vals.len() {
            let at = (t as Time).min(d) as usize;
            vals[t] = old[t].max(old[at] + p);
        }
    }

    #[test]
    fn initial_step() {
        let env = ProfitEnvelope::new(20, 5, 3).unwrap();
        assert_eq!(env.query(4).unwrap(), 0);
        assert_eq!(env.query(5).unwrap(), 3);
        assert_eq!(env.query(19).unwrap(), 3);
        assert!(env.query(20).is_err());
        assert!(ProfitEnvelope::new(20, 21, 1).is_err());
        let zero = ProfitEnvelope::new(20, 0, 0).unwrap();
        assert!((0..20).all(|t| zero.query(t).unwrap() == 0));
    }

    #[test]
    fn window_on_top_of_step() {
        let mut env = ProfitEnvelope::new(20, 5, 3).unwrap();
        env.apply_window(10, 12, 4).unwrap();
        // hand evaluation: old(11) + 4 = 7
        assert_eq!(env.query(11).unwrap(), 7);
        assert_eq!(env.query(9).unwrap(), 3);
        assert_eq!(env.query(19).unwrap(), 7);
    }

    #[test]
    fn later_step_dominates_window() {
        let mut env = ProfitEnvelope::new(20, 8, 10).unwrap();
        env.apply_window(2, 4, 5).unwrap();
        assert_eq!(env.steps(), vec![(0, 0), (2, 5), (8, 10)]);
    }

    #[test]
    fn zero_profit_window_is_noop() {
        let mut env = ProfitEnvelope::new(20, 3, 2).unwrap();
        let before = env.steps();
        env.apply_window(1, 9, 0).unwrap();
        assert_eq!(env.steps(), before);
        assert!(env.apply_window(5, 20, 1).is_err());
        assert!(env.apply_window(6, 5, 1).is_err());
    }

    #[test]
    fn clone_is_a_snapshot() {
        let mut env = ProfitEnvelope::zero(50);
        env.apply_window(2, 4, 5).unwrap();
        let snap = env.clone();
        env.apply_window(3, 30, 7).unwrap();
        env.apply_window(10, 11, 1).unwrap();
        assert_eq!(snap.steps(), vec![(0, 0), (2, 5)]);
        assert_eq!(env.query(40).unwrap(), 13);
    }

    #[test]
    fn max_with_merges_pointwise() {
        let mut a = ProfitEnvelope::from_steps(30, &[(0, 0), (5, 4), (20, 6)]);
        let b = ProfitEnvelope::from_steps(30, &[(0, 1), (10, 5)]);
        a.max_with(&b);
        assert_eq!(a.steps(), vec![(0, 1), (5, 4), (10, 5), (20, 6)]);
    }

    fn window_seq() -> impl Strategy<Value = (Time, Vec<(Time, Time, Profit)>)> {
        (2..200i64).prop_flat_map(|h| {
            let w = (0..h, 0..h, 0..10i64).prop_map(|(a, b, p)| (a.min(b), a.max(b), p));
            (Just(h), proptest::collection::vec(w, 0..40))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn matches_array_oracle((h, seq) in window_seq()) {
            let mut env = ProfitEnvelope::zero(h);
            let mut vals = vec![0; h as usize];
            for &(r, d, p) in &seq {
                env.apply_window(r, d, p).unwrap();
                naive_apply(&mut vals, r, d, p);
                for t in 0..h {
                    prop_assert_eq!(env.query(t).unwrap(), vals[t as usize]);
                }
            }
        }

        #[test]
        fn repeated_window_stays_between_bounds((h, seq) in window_seq(), r in 0..50i64, len in 0..20i64, p in 1..8i64) {
            let r = r % h;
            let d = (r + len).min(h - 1);
            let mut env = ProfitEnvelope::zero(h);
            for &(a, b, q) in &seq {
                env.apply_window(a, b, q).unwrap();
            }
            let old = env.clone();
            env.apply_window(r, d, p).unwrap();
            env.apply_window(r, d, p).unwrap();
            for t in r..=d {
                let o = old.query(t).unwrap();
                let v = env.query(t).unwrap();
                prop_assert!(v >= o + p && v <= o + 2 * p);
            }
            for t in 1..h {
                prop_assert!(env.query(t - 1).unwrap() <= env.query(t).unwrap());
            }
        }
    }
}
