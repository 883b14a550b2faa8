use std::sync::Arc;

use coinv_core::fqm::{count_orthogonal_brute_force, orthogonal_group, FqModule};
use coinv_core::glue::{table2_build, ClassTag};
use coinv_core::linalg::rat;
use coinv_core::shape::{orthogonal_order, shape_order};
use num_rational::BigRational;
use proptest::prelude::*;

fn cyclic(d: u32, a: i64, den: i64) -> FqModule {
    FqModule::new(vec![d], &[rat(a, den)], &[vec![rat(2 * a, den)]]).unwrap()
}

fn plane(k: i64, split: bool) -> FqModule {
    let z = rat(0, 1);
    let b = rat(1, k);
    let (q, d) = if split { (z.clone(), z.clone()) } else { (rat(1, k), rat(2, k)) };
    FqModule::new(vec![k as u32; 2], &[q.clone(), q], &[vec![d.clone(), b.clone()], vec![b, d]]).unwrap()
}

fn sum(parts: &[FqModule]) -> FqModule {
    parts[1..].iter().fold(parts[0].clone(), |acc, p| acc.direct_sum(p))
}

fn both_routes(m: &FqModule) -> u128 {
    let o = orthogonal_group(Arc::new(m.clone()), 3).unwrap();
    assert_eq!(o.search_order, o.chain_order);
    for g in o.group.generators() {
        assert!(g.is_orthogonal(m));
    }
    o.chain_order
}

#[test]
fn classical_groups_over_small_fields() {
    let u = plane(2, true);
    let cases = [
        (sum(&[u.clone(), u.clone()]), orthogonal_order("GO", 4, 1, 2)),
        (sum(&[u.clone(), u.clone(), u.clone()]), orthogonal_order("GO", 6, 1, 2)),
        (sum(&[cyclic(3, 1, 3), cyclic(3, 1, 3), cyclic(3, 1, 3)]), orthogonal_order("GO", 3, 0, 3)),
        (sum(&[cyclic(3, 1, 3), cyclic(3, 2, 3), cyclic(3, 1, 3), cyclic(3, 2, 3)]), orthogonal_order("GO", 4, 1, 3)),
    ];
    let expected = [72, 40320, 48, 1152];
    for ((m, formula), e) in cases.iter().zip(expected) {
        assert_eq!(*formula, Some(e));
        assert_eq!(both_routes(m), e);
        assert_eq!(count_orthogonal_brute_force(m) as u128, e);
    }
}

#[test]
fn discriminant_forms_match_shapes() {
    let shapes = [
        (ClassTag::C4, "2^{11}.Sym_6"),
        (ClassTag::E6, "GO_4^+(2) x GO_4^+(3)"),
        (ClassTag::G6, "GO_3(3) x PSO^+_4(3).2^2"),
        (ClassTag::E8, "2^6.Dih_{12}"),
        (ClassTag::F10, "Dih_8 x Sym_4"),
    ];
    for (class, shape) in shapes {
        let d = table2_build(class).l.discriminant().unwrap().module;
        assert!(d.is_nondegenerate());
        assert_eq!(both_routes(&d), shape_order(shape).unwrap(), "{class}");
    }
}

fn block() -> impl Strategy<Value = FqModule> {
    prop_oneof![
        (prop::sample::select(vec![3u32, 5, 7, 9]), 0usize..2).prop_map(|(d, s)| {
            let nr = (2..d as i64).find(|&a| (1..d as i64).all(|x| x * x % d as i64 != a)).unwrap();
            cyclic(d, if s == 0 { 1 } else { nr }, d as i64)
        }),
        (prop::sample::select(vec![2u32, 4, 8]), prop::sample::select(vec![1i64, 3, 5, 7]))
            .prop_filter("q = u/4 on Z/2 needs u in {1, 3}", |(d, u)| *d > 2 || *u < 5)
            .prop_map(|(d, u)| cyclic(d, u, 2 * d as i64)),
        (prop::sample::select(vec![2i64, 4]), any::<bool>()).prop_map(|(k, s)| plane(k, s)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orders_match_brute_force(parts in prop::collection::vec(block(), 1..4)) {
        let m = sum(&parts);
        prop_assume!(m.size() <= 128);
        prop_assert!(m.is_nondegenerate());
        prop_assert_eq!(both_routes(&m), count_orthogonal_brute_force(&m) as u128);
    }

    #[test]
    fn order_is_seed_independent(parts in prop::collection::vec(block(), 1..3), seed in any::<u64>()) {
        let m = Arc::new(sum(&parts));
        prop_assume!(m.size() <= 128);
        let a = orthogonal_group(m.clone(), seed).unwrap().chain_order;
        let b = orthogonal_group(m, seed.wrapping_add(1)).unwrap().chain_order;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn rational_q_values_round_trip() {
    let m = cyclic(8, 3, 16);
    let x = m.encode(&[3]);
    assert_eq!(m.q_rational(x), BigRational::new(27.into(), 16.into()) - rat(1, 1));
}
