use covercount::cnf_marginal::rational_to_f64;
use covercount::oracle::gen_random_read5_cnf;
use covercount::{marginal_exact_recursive, marginal_truncated, MonotoneCnf, TruncationPolicy, DEFAULT_NODE_BUDGET};
use proptest::prelude::*;

fn well_formed() -> impl Strategy<Value = MonotoneCnf> {
    (any::<u64>(), 3usize..=12, 1usize..=16, 2usize..=5).prop_filter_map("no instance", |(seed, n, m, k)| {
        gen_random_read5_cnf(seed, n, m, 2..=k.min(n)).ok().and_then(|c| c.wellform().ok())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn truncated_values_in_unit_interval(c in well_formed(), depth in 0u32..12) {
        let policy = TruncationPolicy::default();
        for x in c.free_vars() {
            let r = marginal_truncated(&c, x, depth, &policy).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.value), "{}", r.value);
        }
    }

    #[test]
    fn untruncated_runs_match_exact(c in well_formed()) {
        let policy = TruncationPolicy::default();
        for x in c.free_vars() {
            let r = marginal_truncated(&c, x, 64, &policy).unwrap();
            prop_assume!(!r.truncated);
            let exact = rational_to_f64(&marginal_exact_recursive(&c, x, DEFAULT_NODE_BUDGET).unwrap());
            prop_assert!((r.value - exact).abs() <= 1e-12);
        }
    }

    #[test]
    fn node_count_within_tree_bound(c in well_formed(), depth in 0u32..6) {
        let policy = TruncationPolicy::default();
        for x in c.free_vars() {
            let r = marginal_truncated(&c, x, depth, &policy).unwrap();
            let bound = 2.0 * 16f64.powi(depth as i32) + 2.0 * c.n_vars() as f64;
            prop_assert!((r.nodes_visited as f64) <= bound, "{} > {bound}", r.nodes_visited);
        }
    }
}

#[test]
fn budget_is_reported() {
    let c = gen_random_read5_cnf(7, 12, 14, 2..=4).unwrap().wellform().unwrap();
    let x = c.free_vars()[0];
    let tight = TruncationPolicy::with_budget(1);
    assert!(c.degree(x) == 0 || marginal_truncated(&c, x, 10, &tight).is_err());
}
