use covercount::matching::from_hypergraph;
use covercount::oracle::{
    count_matchings_brute, exact_count_amo, exact_count_cnf, exact_count_cnf_naive, gen_random_deg4_hypergraph, gen_random_read5_cnf,
    DEFAULT_ORACLE_CAP,
};
use covercount::{MonotoneCnf, VarId};
use proptest::prelude::*;

fn formula() -> impl Strategy<Value = MonotoneCnf> {
    (any::<u64>(), 2usize..=14, 1usize..=18, 1usize..=5).prop_filter_map("degree caps unsatisfiable", |(seed, n, m, k)| {
        gen_random_read5_cnf(seed, n, m, 1..=k.min(n)).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bitmask_agrees_with_naive(c in formula()) {
        prop_assert_eq!(exact_count_cnf(&c, DEFAULT_ORACLE_CAP).unwrap(), exact_count_cnf_naive(&c).unwrap());
    }

    #[test]
    fn monotone_injection(c in formula()) {
        for x in 0..c.n_vars() as u32 {
            let x = VarId(x);
            let one = exact_count_cnf(&c.pin_one(x), DEFAULT_ORACLE_CAP).unwrap().0;
            if let Ok(zero) = c.pin_zero(x) {
                prop_assert!(exact_count_cnf(&zero, DEFAULT_ORACLE_CAP).unwrap().0 <= one);
            }
        }
    }

    #[test]
    fn count_bounded_by_assignments(c in formula()) {
        let z = exact_count_cnf(&c, DEFAULT_ORACLE_CAP).unwrap().0;
        prop_assert!(z <= num_bigint::BigUint::from(1u8) << c.n_vars());
    }

    #[test]
    fn amo_enumeration_agrees_with_matching_enumeration(seed in any::<u64>(), e in 1usize..=14, k in 2usize..=3) {
        let v = (k * e).div_ceil(3).max(k + 1);
        let Ok(h) = gen_random_deg4_hypergraph(seed, v, e, k..=k) else { return Ok(()) };
        prop_assert_eq!(exact_count_amo(&from_hypergraph(&h), DEFAULT_ORACLE_CAP).unwrap(), count_matchings_brute(&h).unwrap());
    }
}

#[test]
fn cap_is_enforced() {
    let chain = |n: u32| MonotoneCnf::new(n as usize, (0..n - 1).map(|i| vec![VarId(i), VarId(i + 1)]).collect()).unwrap();
    assert!(exact_count_cnf(&chain(31), DEFAULT_ORACLE_CAP).is_err());
    // variables in no clause are not enumerated
    assert!(exact_count_cnf(&MonotoneCnf::empty(40), DEFAULT_ORACLE_CAP).is_ok());
}
