use covercount::oracle::{exact_count_cnf, gen_random_read5_cnf, DEFAULT_ORACLE_CAP};
use covercount::{MonotoneCnf, VarId};
use num_bigint::BigUint;
use proptest::prelude::*;

fn raw_formula() -> impl Strategy<Value = MonotoneCnf> {
    (any::<u64>(), 2usize..=12, 1usize..=16, 1usize..=5).prop_filter_map("degree caps unsatisfiable", |(seed, n, m, k)| {
        gen_random_read5_cnf(seed, n, m, 1..=k.min(n)).ok()
    })
}

fn well_formed() -> impl Strategy<Value = MonotoneCnf> {
    raw_formula().prop_filter_map("empty after wellform", |c| c.wellform().ok())
}

fn z(c: &MonotoneCnf) -> BigUint {
    exact_count_cnf(c, DEFAULT_ORACLE_CAP).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wellform_preserves_count(c in raw_formula()) {
        let w = c.wellform().unwrap();
        prop_assert!(w.is_well_formed());
        prop_assert_eq!(z(&c), z(&w));
    }

    #[test]
    fn pin_identity(c in raw_formula(), pick in any::<prop::sample::Index>()) {
        let x = VarId(pick.index(c.n_vars()) as u32);
        let one = z(&c.pin_one(x));
        let total = match c.pin_zero(x) {
            Ok(zero) => one + z(&zero),
            Err(_) => one,
        };
        prop_assert_eq!(z(&c), total);
    }

    #[test]
    fn branch_instances_shrink(c in well_formed()) {
        for x in c.free_vars() {
            let plan = c.branch_plan(x);
            for (j, g) in plan.groups().iter().enumerate() {
                for (i, &y) in g.others.iter().enumerate() {
                    let Ok(child) = plan.child_instance(j, i) else { continue };
                    prop_assert!(child.size() < c.size());
                    prop_assert!(child.degree(y) < c.degree(y));
                }
            }
        }
    }

    #[test]
    fn pins_never_raise_degrees(c in well_formed(), pick in any::<prop::sample::Index>()) {
        let free = c.free_vars();
        prop_assume!(!free.is_empty());
        let x = free[pick.index(free.len())];
        let one = c.pin_one(x);
        for y in 0..c.n_vars() as u32 {
            prop_assert!(one.degree(VarId(y)) <= c.degree(VarId(y)));
        }
        if let Ok(zero) = c.pin_zero(x) {
            prop_assert!(zero.size() <= c.size());
            for y in 0..c.n_vars() as u32 {
                prop_assert!(zero.degree(VarId(y)) <= c.degree(VarId(y)));
            }
        }
    }
}
