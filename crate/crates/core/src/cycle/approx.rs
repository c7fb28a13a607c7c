use super::{compress_deadlines, short_walk, zero_length_walk, CycleView};
use crate::error::Result;
use crate::model::{validate_walk, Instance, Solution, Walk};

/// Better of two walks: the exact optimum over short windows only, and the
/// walk that never waits, which picks up every long window it passes.
pub fn approx2_op_1tw_cycle(inst: &Instance) -> Result<Solution> {
    let view = CycleView::new(inst)?;
    if view.len == 0 {
        let all: Vec<usize> = (0..view.n).collect();
        return Ok(Solution::scored(inst, zero_length_walk(&view, &all), "cycle-2approx"));
    }
    let (small, map) = compress_deadlines(inst)?;
    let sview = CycleView::new(&small)?;

    let short = short_walk(&sview, |v| if sview.is_long(v) { 0 } else { sview.profit[v] })?;
    let short = map.walk_to_original(inst, &short);

    let stop = sview.budget.min(sview.max_deadline());
    let mut sweep = Walk::starting_at(0, 0);
    let (mut v, mut t) = (0, 0);
    while t + sview.cost[v] <= stop {
        t += sview.cost[v];
        v = (v + 1) % sview.n;
        sweep.step(v, t);
    }
    let sweep = map.walk_to_original(inst, &sweep);

    let a = validate_walk(inst, &short).profit;
    let b = validate_walk(inst, &sweep).profit;
    let walk = if b > a { sweep } else { short };
    Ok(Solution::scored(inst, walk, "cycle-2approx"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::tests::{random_cycle, unit_cycle};
    use crate::cycle::solve_op_1tw_cycle_short;
    use crate::oracle::oracle_op;
    use proptest::prelude::*;

    #[test]
    fn short_only_is_exact() {
        let inst = unit_cycle(&[(0, 0, 1), (4, 4, 1), (2, 2, 1)], 12);
        let exact = solve_op_1tw_cycle_short(&inst).unwrap().profit;
        assert_eq!(approx2_op_1tw_cycle(&inst).unwrap().profit, exact);
    }

    #[test]
    fn long_only_collects_everything() {
        let inst = unit_cycle(&[(0, 9, 2), (3, 9, 3), (5, 9, 4)], 9);
        assert_eq!(approx2_op_1tw_cycle(&inst).unwrap().profit, 9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn within_factor_two(inst in random_cycle(5, 3, 14)) {
            let sol = approx2_op_1tw_cycle(&inst).unwrap();
            let rep = validate_walk(&inst, &sol.walk);
            prop_assert!(rep.valid, "{:?}", rep.violation);
            let opt = oracle_op(&inst).unwrap().profit;
            prop_assert!(sol.profit <= opt);
            prop_assert!(2 * sol.profit >= opt, "{} vs {}", sol.profit, opt);
        }
    }
}
