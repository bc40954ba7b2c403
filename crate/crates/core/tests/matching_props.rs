use covercount::counter::count_matchings_exact;
use covercount::matching::{from_hypergraph, marginal_exact_amo, marginal_truncated_amo};
use covercount::oracle::{count_matchings_brute, exact_marginal_amo, gen_random_deg4_hypergraph, DEFAULT_ORACLE_CAP};
use covercount::{count_matchings, AmoInstance, CountMode, Hypergraph, Pin, VarId, DEFAULT_NODE_BUDGET};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    (any::<u64>(), 1usize..=14, 2usize..=3).prop_filter_map("degree caps unsatisfiable", |(seed, e, k)| {
        let v = (k * e).div_ceil(3).max(k + 1);
        gen_random_deg4_hypergraph(seed, v, e, k..=k).ok()
    })
}

/// Matchings of a simple graph: the first edge is either left out, or taken
/// together with a matching of the edges disjoint from it.
fn graph_matchings(edges: &[(usize, usize)]) -> u64 {
    match edges.split_first() {
        None => 1,
        Some((&(a, b), rest)) => {
            let disjoint: Vec<(usize, usize)> = rest.iter().copied().filter(|&(c, d)| c != a && c != b && d != a && d != b).collect();
            graph_matchings(rest) + graph_matchings(&disjoint)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_recursion_matches_oracle(h in hypergraph()) {
        let inst = from_hypergraph(&h).normalize().unwrap();
        for x in inst.free_vars() {
            let rec = marginal_exact_amo(&inst, x, DEFAULT_NODE_BUDGET).unwrap();
            let oracle = exact_marginal_amo(&inst, x, DEFAULT_ORACLE_CAP).unwrap();
            prop_assert_eq!(&rec, oracle.value());
        }
    }

    #[test]
    fn telescoping_matches_enumeration(h in hypergraph()) {
        let exact = count_matchings_exact(&from_hypergraph(&h), DEFAULT_NODE_BUDGET).unwrap();
        let brute = count_matchings_brute(&h).unwrap().0;
        prop_assert_eq!(exact, BigRational::from_integer(BigInt::from(brute)));
    }

    #[test]
    fn graph_counts_match_independent_enumerator(seed in any::<u64>(), e in 1usize..=14) {
        let v = (2 * e).div_ceil(3).max(3);
        let Ok(h) = gen_random_deg4_hypergraph(seed, v, e, 2..=2) else { return Ok(()) };
        let edges: Vec<(usize, usize)> = h.edges().iter().map(|e| (e[0], e[1])).collect();
        let exact = count_matchings_exact(&from_hypergraph(&h), DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(exact, BigRational::from_integer(BigInt::from(graph_matchings(&edges))));
    }

    #[test]
    fn normalized_instances_satisfy_invariants(h in hypergraph(), pins in prop::collection::vec(0u8..3, 14)) {
        let base = from_hypergraph(&h);
        let pins: Vec<Pin> = (0..base.n_vars()).map(|i| match pins[i] { 0 => Pin::Free, 1 => Pin::One, _ => Pin::Zero }).collect();
        let raw = AmoInstance::new(base.n_vars(), base.constraints().to_vec(), pins).unwrap();
        if let Ok(norm) = raw.normalize() {
            prop_assert!(norm.is_normalized());
            for c in norm.constraints() {
                prop_assert!(c.iter().all(|&v| norm.is_free(v)));
                let mut sorted = c.clone();
                sorted.sort();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), c.len());
            }
            for x in norm.free_vars() {
                prop_assert!(norm.degree(x) <= 3);
            }
        }
    }

    #[test]
    fn truncated_values_in_unit_interval(h in hypergraph(), depth in 0u32..10) {
        let inst = from_hypergraph(&h).normalize().unwrap();
        for x in inst.free_vars() {
            let r = marginal_truncated_amo(&inst, x, depth, DEFAULT_NODE_BUDGET).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.value));
        }
    }
}

#[test]
fn fixtures() {
    let cases = [
        (Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap(), 3.0),
        (Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap(), 4.0),
        (Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap(), 2.0),
        (Hypergraph::new(4, vec![]).unwrap(), 1.0),
    ];
    for (h, want) in cases {
        let est = count_matchings(&from_hypergraph(&h), CountMode::Adaptive { tol: 0.01 }, DEFAULT_NODE_BUDGET).unwrap();
        assert!((est.count() - want).abs() < 1e-9, "{:?}: {}", h, est.count());
    }
}

#[test]
fn two_zero_pins_in_one_constraint_is_unsatisfiable() {
    let inst = AmoInstance::new(3, vec![vec![VarId(0), VarId(1), VarId(2)]], vec![Pin::Zero, Pin::Zero, Pin::Free]).unwrap();
    assert!(inst.normalize().is_err());
    let est = count_matchings(&inst, CountMode::Heuristic { depth: 3 }, DEFAULT_NODE_BUDGET).unwrap();
    assert!(est.is_zero());
}
