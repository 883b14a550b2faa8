use coinv_core::glue::{table2_build, ClassTag};
use coinv_core::irr::{build_irr, hk_untwisted_action, sg_set, sigma_label_action};

#[test]
fn sigma_and_hk_preserve_q_for_plain_classes() {
    for class in [ClassTag::C4, ClassTag::E6, ClassTag::E8] {
        let b = table2_build(class);
        let irr = build_irr(&b).unwrap();
        let lm = &irr.lambda_module;
        for k in 0..lm.rank() {
            let alpha = irr.disc.representative(irr.lambda_to_disc[lm.gen(k)]);
            let s = sigma_label_action(&irr, &alpha).unwrap();
            assert!(s.untwisted.preserves_q(&irr.module), "{class}");
            assert!(s.untwisted.is_partial_isomorphism(&irr.module), "{class}");
            if let Some(f) = s.full {
                assert!(f.is_orthogonal(&irr.module), "{class}");
            }
        }
        for k in 0..irr.n as i64 {
            let p = hk_untwisted_action(&irr, &b.gamma, k).unwrap();
            assert!(p.preserves_q(&irr.module) && p.is_partial_isomorphism(&irr.module), "{class} h_{k}");
        }
    }
}

#[test]
fn doubled_classes_reject_plain_label_maps() {
    let b = table2_build(ClassTag::F10);
    let irr = build_irr(&b).unwrap();
    assert!(irr.doubled());
    assert!(hk_untwisted_action(&irr, &b.gamma, 1).is_err());
    let s = sg_set(&irr);
    assert!(s.sg.contains(&irr.vacuum_grade_one()));
}
