use coinv_core::glue::{elementary_divisor_multiset, lattice_facts, table2_build, ClassTag};
use coinv_core::shape::abelian_type;

fn check(class: ClassTag, rank: usize, disc: &str) {
    let b = table2_build(class);
    let f = lattice_facts(&b).unwrap();
    assert_eq!(f.rank, rank, "{class}");
    assert!(f.even && f.rootless, "{class}");
    assert_eq!(
        elementary_divisor_multiset(&f.discriminant_factors),
        elementary_divisor_multiset(&abelian_type(disc).unwrap()),
        "{class}"
    );
    assert_eq!(f.g_order, Some(b.n), "{class}");
    assert!(f.fixed_point_free, "{class}");
    assert!(f.one_minus_g_dual_is_l, "{class}");
    assert!(f.gamma_generates && f.eq_gchi, "{class}");
}

#[test]
fn class_4c() {
    check(ClassTag::C4, 14, "2^24^4");
}

#[test]
fn class_6e() {
    check(ClassTag::E6, 16, "2^43^4");
}

#[test]
fn class_6g() {
    check(ClassTag::G6, 18, "2^63^3");
}

#[test]
fn class_8e() {
    check(ClassTag::E8, 18, "2.4.8^2");
}

#[test]
fn class_10f() {
    check(ClassTag::F10, 20, "2^45^2");
}
