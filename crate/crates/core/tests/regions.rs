use halfstokes::regions::{
    classify, count_printed_b2, membership, verify_sign_inequalities, B2Variant, RegionKind,
};
use halfstokes::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sets_are_pairwise_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1_000_000 {
        let x = [rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0)];
        for variant in [B2Variant::Printed, B2Variant::Corrected] {
            let m = membership(&x, 1, variant).unwrap();
            assert!(m.iter().filter(|&&b| b).count() <= 1, "{x:?} {m:?}");
        }
    }
}

#[test]
fn listed_classifications() {
    let l = classify(&[5.0, 5.0], 1, B2Variant::Printed).unwrap();
    assert_eq!(
        (l.kind, l.name()),
        (Some(RegionKind::A1), "A_11".to_string())
    );
    let l = classify(&[100.0, 1.0], 1, B2Variant::Printed).unwrap();
    assert_eq!(l.kind, Some(RegionKind::B1));
    assert!(matches!(
        classify(&[5.0, 5.0], 2, B2Variant::Printed),
        Err(Error::Domain(_))
    ));
}

#[test]
fn printed_b12_is_empty_and_corrected_b12_is_not() {
    assert_eq!(count_printed_b2(3, 1, 1_000_000, 50.0, 4).unwrap(), 0);
    let r = verify_sign_inequalities(3, 1, 20_000, 8).unwrap();
    let b2 = &r.reports[3];
    assert_eq!(b2.samples, 20_000);
    assert_eq!(b2.violations, 0);
    for rep in &r.reports[..2] {
        assert_eq!(rep.violations, 0, "{}", rep.name);
    }
}

proptest! {
    #[test]
    fn a_sets_are_scale_monotone(x1 in -40.0f64..40.0, x2 in -40.0f64..40.0, lam in 1.0f64..20.0) {
        let a = membership(&[x1, x2], 1, B2Variant::Corrected).unwrap();
        let b = membership(&[lam * x1, lam * x2], 1, B2Variant::Corrected).unwrap();
        if a[0] {
            prop_assert!(b[0]);
        }
        if a[1] {
            prop_assert!(b[1]);
        }
    }

    #[test]
    fn classify_agrees_with_membership(x in prop::collection::vec(-60.0f64..60.0, 2..4)) {
        let m = membership(&x, 1, B2Variant::Corrected).unwrap();
        let l = classify(&x, 1, B2Variant::Corrected).unwrap();
        let kinds = [RegionKind::A1, RegionKind::A2, RegionKind::B1, RegionKind::B2];
        let first = m.iter().position(|&b| b).map(|k| kinds[k]);
        prop_assert_eq!(l.kind, first);
        prop_assert_eq!(l.i.is_some(), first.is_some());
    }
}
