use std::collections::HashSet;

use permgroup::index2::index2_subgroups;
use permgroup::{Perm, PermAction, StabChain};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DEGREE: usize = 6;

fn closure(gens: &[Perm]) -> HashSet<Vec<u32>> {
    let id = Perm::identity(DEGREE);
    let mut seen = HashSet::from([id.0.clone()]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.0.clone()) {
                stack.push(y);
            }
        }
    }
    seen
}

fn perm() -> impl Strategy<Value = Perm> {
    Just((0..DEGREE as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(Perm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_order_matches_closure(gens in prop::collection::vec(perm(), 1..4), seed in any::<u64>()) {
        let elems = closure(&gens);
        let det = StabChain::new(PermAction::new(DEGREE), &gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rnd = StabChain::new_random(PermAction::new(DEGREE), &gens, &[], &mut rng, None);
        prop_assert_eq!(det.order(), elems.len() as u128);
        prop_assert_eq!(rnd.order(), elems.len() as u128);
        for e in &elems {
            prop_assert!(det.contains(&Perm(e.clone())));
        }
    }

    #[test]
    fn order_ignores_generator_order(mut gens in prop::collection::vec(perm(), 1..4)) {
        let a = StabChain::new(PermAction::new(DEGREE), &gens, &[]).order();
        gens.reverse();
        let b = StabChain::new(PermAction::new(DEGREE), &gens, &[]).order();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn index2_subgroups_are_normal_halves(gens in prop::collection::vec(perm(), 1..4)) {
        let act = PermAction::new(DEGREE);
        let g = StabChain::new(act.clone(), &gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let subs = index2_subgroups(&act, &gens, g.order(), &mut rng);
        let mut seen = HashSet::new();
        for h in &subs {
            prop_assert_eq!(2 * h.chain.order(), g.order());
            for x in &gens {
                for y in h.chain.generators() {
                    prop_assert!(h.chain.contains(&x.inverse().then(y).then(x)));
                }
            }
            let mut key: Vec<Vec<u32>> = closure(h.chain.generators()).into_iter().collect();
            key.sort();
            prop_assert!(seen.insert(key), "index-2 subgroups are distinct");
        }
        // Brute force: an index-2 subgroup is the kernel of a sign character,
        // determined by the signs of the generators.
        let elems: Vec<Vec<u32>> = closure(&gens).into_iter().collect();
        let mut expected = 0;
        for mask in 1u32..(1 << gens.len()) {
            let mut sign = std::collections::HashMap::from([(Perm::identity(DEGREE).0, 0u32)]);
            let mut stack = vec![Perm::identity(DEGREE)];
            let mut ok = true;
            while let Some(x) = stack.pop() {
                let s = sign[&x.0];
                for (i, g) in gens.iter().enumerate() {
                    let y = x.then(g);
                    let t = s ^ (mask >> i & 1);
                    match sign.get(&y.0) {
                        Some(&u) if u != t => ok = false,
                        Some(_) => {}
                        None => {
                            sign.insert(y.0.clone(), t);
                            stack.push(y);
                        }
                    }
                }
            }
            if ok && sign.len() == elems.len() && sign.values().any(|&s| s == 1) {
                expected += 1;
            }
        }
        prop_assert_eq!(subs.len(), expected);
    }
}
