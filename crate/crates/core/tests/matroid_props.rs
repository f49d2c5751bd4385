mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_kparity::matroid::{axiom_check, contract, contract_with_basis, restrict, truncate};
use submod_kparity::objective::{check_monotone, check_submodular, ObjectiveClass};
use submod_kparity::{sets, ConcreteMatroid, KParityConstraint, MatroidOracle, ValueOracle};

fn random_matroid(seed: u64, max_n: usize) -> ConcreteMatroid {
    let n = ChaCha8Rng::seed_from_u64(seed).gen_range(0..=max_n);
    matroid_on(seed, n)
}

fn matroid_on(seed: u64, n: usize) -> ConcreteMatroid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    match rng.gen_range(0..3) {
        0 => ConcreteMatroid::uniform(n, rng.gen_range(0..=n)),
        1 => {
            let nb = rng.gen_range(1..=n.max(1));
            let mut blocks = vec![Vec::new(); nb];
            for x in 0..n {
                blocks[rng.gen_range(0..nb)].push(x);
            }
            blocks.retain(|b| !b.is_empty());
            let caps = blocks.iter().map(|b| rng.gen_range(0..=b.len())).collect();
            ConcreteMatroid::partition(blocks, caps).unwrap()
        }
        _ => {
            let nodes = rng.gen_range(1..=5);
            let edges = (0..n).map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes))).collect();
            ConcreteMatroid::graphic(nodes, edges).unwrap()
        }
    }
}

fn same_oracle(a: &dyn MatroidOracle, b: &dyn MatroidOracle) -> bool {
    let ground: Vec<usize> = (0..a.ground_size()).collect();
    a.ground_size() == b.ground_size() && sets::subsets(&ground).all(|s| a.independent(&s) == b.independent(&s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn concrete_matroids_satisfy_axioms(seed in any::<u64>()) {
        let m = random_matroid(seed, 10);
        prop_assert!(axiom_check(&m).unwrap().passed());
    }

    #[test]
    fn rank_is_monotone_and_submodular(seed in any::<u64>()) {
        let m = random_matroid(seed, 8);
        let ground: Vec<usize> = (0..m.ground_size()).collect();
        let f = submod_kparity::objective::FnObjective::new(ObjectiveClass::MonotoneSubmodular, |s: &[usize]| {
            m.rank(s).unwrap() as f64
        });
        prop_assert!(check_monotone(&f, &ground, 0.0).unwrap().passed());
        prop_assert!(check_submodular(&f, &ground, 0.0).unwrap().passed());
    }

    #[test]
    fn minors_satisfy_axioms(seed in any::<u64>(), pick in any::<u64>()) {
        let m = random_matroid(seed, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let sub: Vec<usize> = (0..m.ground_size()).filter(|_| rng.gen_bool(0.5)).collect();
        prop_assert!(axiom_check(&restrict(&m, &sub).unwrap()).unwrap().passed());
        prop_assert!(axiom_check(&contract(&m, &sub).unwrap()).unwrap().passed());
        let r = rng.gen_range(0..=m.full_rank());
        prop_assert!(axiom_check(&truncate(&m, r).unwrap()).unwrap().passed());
    }

    #[test]
    fn contraction_does_not_depend_on_basis(seed in any::<u64>(), pick in any::<u64>()) {
        let m = random_matroid(seed, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let sub: Vec<usize> = (0..m.ground_size()).filter(|_| rng.gen_bool(0.5)).collect();
        let reference = contract(&m, &sub).unwrap();
        let r = m.rank(&sub).unwrap();
        for basis in sets::subsets(&sub) {
            if basis.len() == r && m.independent(&basis) {
                let other = contract_with_basis(&m, &sub, &basis).unwrap();
                prop_assert!(same_oracle(&reference, &other));
            }
        }
    }

    #[test]
    fn feasibility_is_down_closed(seed in any::<u64>()) {
        let inst = common::desk_instance(seed, None, 8);
        let c = &inst.constraint;
        for s in sets::subsets(&c.edge_ids()) {
            if c.feasible(&s).unwrap() {
                for t in sets::subsets(&s) {
                    prop_assert!(c.feasible(&t).unwrap());
                }
            }
        }
    }

    #[test]
    fn intersection_reduction_is_exact(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), k in 1usize..=3) {
        let n = ChaCha8Rng::seed_from_u64(s1).gen_range(0..=16 / k);
        let ms: Vec<Arc<dyn MatroidOracle>> = [s1, s2, s3][..k]
            .iter()
            .map(|&s| Arc::new(matroid_on(s, n)) as Arc<dyn MatroidOracle>)
            .collect();
        let c = KParityConstraint::from_intersection(ms.clone()).unwrap();
        prop_assert_eq!(c.k(), k);
        for s in sets::subsets(&(0..n).collect::<Vec<_>>()) {
            let all = ms.iter().all(|m| m.independent(&s));
            prop_assert_eq!(c.feasible(&s).unwrap(), all);
        }
        if n * k <= submod_kparity::matroid::AXIOM_CHECK_MAX_GROUND {
            prop_assert!(axiom_check(c.matroid().as_ref()).unwrap().passed());
        }
    }

    #[test]
    fn concrete_objectives_are_submodular_and_telescope(seed in any::<u64>()) {
        let inst = common::desk_instance(seed, None, 10);
        let f = &inst.objective;
        let ground = inst.constraint.edge_ids();
        prop_assert!(check_submodular(f, &ground, 0.0).unwrap().passed());
        if f.class() != ObjectiveClass::Submodular {
            prop_assert!(check_monotone(f, &ground, 0.0).unwrap().passed());
        }
        let mut order = ground.clone();
        use rand::seq::SliceRandom;
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut prefix = Vec::new();
        let mut total = f.value(&[]);
        for e in order {
            total += common::marginal(f, e, &prefix);
            prefix = sets::union(&prefix, &[e]);
        }
        prop_assert_eq!(total, f.value(&ground));
    }
}
