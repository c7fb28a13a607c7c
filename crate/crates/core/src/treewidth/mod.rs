//! Plain orienteering on graphs of bounded treewidth.

mod approx;
mod decomposition;
mod dp;

pub use approx::approx_tw;
pub use decomposition::{build_nice_decomposition, check_raw, NiceDecomposition, NiceKind, NiceNode};
pub use dp::{solve_tw, solve_tw_with, DEFAULT_MAX_WIDTH};

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cycle::Epsilon;
    use crate::model::{validate_walk, EdgeSpec, Instance, Profit, Time, Topology, VertexSpec};
    use crate::oracle::oracle_op;
    use crate::tree::{solve_tree, tests::random_tree};
    use proptest::prelude::*;

    fn cycle4(budget: Time) -> Instance {
        Instance::new(
            Topology::General,
            0,
            budget,
            vec![VertexSpec::plain(1); 4],
            (0..4).map(|i| EdgeSpec::new(i, (i + 1) % 4, 1)).collect(),
        )
    }

    fn solve(inst: &Instance) -> Profit {
        let dec = build_nice_decomposition(inst).unwrap();
        dec.check(inst).unwrap();
        let sol = solve_tw(inst, &dec).unwrap();
        let rep = validate_walk(inst, &sol.walk);
        assert!(rep.valid, "{:?}", rep.violation);
        assert_eq!(rep.profit, sol.profit);
        sol.profit
    }

    /// Connected subgraphs of random 2-trees.
    pub fn random_tw2(max_n: usize, max_cost: Time, max_profit: Profit) -> impl Strategy<Value = Instance> {
        (1..=max_n).prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..=max_profit, n),
                proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>(), 0..=max_cost, 0..=max_cost), n),
                0..n,
                0..=20i64,
            )
                .prop_map(move |(profits, picks, start, budget)| {
                    let mut edges: Vec<EdgeSpec> = vec![];
                    // triangles of the 2-tree as (u, v) edges to attach to
                    let mut anchors: Vec<(usize, usize)> = vec![];
                    for k in 1..n {
                        let (ix, keep, c1, c2) = picks[k];
                        if anchors.is_empty() {
                            edges.push(EdgeSpec::new(0, k, c1));
                            anchors.push((0, k));
                            continue;
                        }
                        let (u, v) = anchors[ix.index(anchors.len())];
                        edges.push(EdgeSpec::new(u, k, c1));
                        if keep {
                            edges.push(EdgeSpec::new(v, k, c2));
                        }
                        anchors.push((u, k));
                        anchors.push((v, k));
                    }
                    let vertices = profits.into_iter().map(VertexSpec::plain).collect();
                    Instance::new(Topology::General, start, budget, vertices, edges)
                })
        })
    }

    #[test]
    fn four_cycle() {
        assert_eq!(solve(&cycle4(4)), 4);
        assert_eq!(solve(&cycle4(3)), 4);
        assert_eq!(solve(&cycle4(2)), 3);
        assert_eq!(solve(&cycle4(0)), 1);
    }

    #[test]
    fn width_cap() {
        let mut edges = vec![];
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push(EdgeSpec::new(u, v, 1));
            }
        }
        let k5 = Instance::new(Topology::General, 0, 5, vec![VertexSpec::plain(1); 5], edges);
        let dec = build_nice_decomposition(&k5).unwrap();
        assert_eq!(dec.width, 4);
        assert!(matches!(solve_tw_with(&k5, &dec, 3), Err(crate::SolveError::ResourceLimit(_))));
        assert_eq!(solve_tw(&k5, &dec).unwrap().profit, 5);
    }

    #[test]
    fn approx_small_and_unit() {
        let two = Instance::new(
            Topology::Tree,
            0,
            1,
            vec![VertexSpec::plain(3), VertexSpec::plain(7)],
            vec![EdgeSpec::new(0, 1, 1)],
        );
        let dec = build_nice_decomposition(&two).unwrap();
        let eps: Epsilon = "0.1".parse().unwrap();
        assert_eq!(approx_tw(&two, &dec, eps).unwrap().profit, 10);
        let c = cycle4(2);
        let dec = build_nice_decomposition(&c).unwrap();
        let sol = approx_tw(&c, &dec, "1".parse().unwrap()).unwrap();
        assert_eq!(sol.profit, solve_tw(&c, &dec).unwrap().profit);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(250))]

        #[test]
        fn matches_tree_dp(inst in random_tree(10, 3, 4)) {
            prop_assert_eq!(solve(&inst), solve_tree(&inst).unwrap().profit);
        }

        #[test]
        fn matches_oracle_on_width_two(inst in random_tw2(7, 3, 4)) {
            prop_assert_eq!(solve(&inst), oracle_op(&inst).unwrap().profit);
        }

        #[test]
        fn approx_sandwich(inst in random_tree(8, 3, 100)) {
            let dec = build_nice_decomposition(&inst).unwrap();
            let sol = approx_tw(&inst, &dec, "0.5".parse().unwrap()).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            let opt = oracle_op(&inst).unwrap().profit;
            let n = inst.n() as Profit;
            // profit >= ceil((1 - 1/n) opt)
            prop_assert!(sol.profit * n >= (n - 1) * opt, "{} vs {}", sol.profit, opt);
            prop_assert!(sol.profit <= opt);
        }
    }
}
