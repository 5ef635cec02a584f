mod common;

use common::library;
use halfstokes::quad::{integrate, integrate_nd, integrate_singular_1d, Endpoint, QuadSpec};
use proptest::prelude::*;

#[test]
fn error_estimates_are_honest() {
    let s = QuadSpec::default().with_rel_tol(1e-10);
    let lib = library();
    assert_eq!(lib.len(), 20);
    for (name, f, truth) in &lib {
        let r = f(&s);
        assert!(
            (r.value - truth).abs() <= 3.0 * r.error_estimate,
            "{name}: {} vs {truth}, estimate {}",
            r.value,
            r.error_estimate
        );
        assert!(
            (r.value - truth).abs() <= 1e-8 * truth.abs(),
            "{name}: {} vs {truth}",
            r.value
        );
    }
}

#[test]
fn reruns_are_bit_identical() {
    let s = QuadSpec::default().with_rel_tol(1e-10);
    for (name, f, _) in &library() {
        let (a, b) = (f(&s), f(&s));
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{name}");
        assert_eq!(
            a.error_estimate.to_bits(),
            b.error_estimate.to_bits(),
            "{name}"
        );
    }
    let mc = QuadSpec {
        mc_samples: 100_000,
        ..s
    };
    let f = |x: &[f64]| x.iter().sum::<f64>();
    let a = integrate_nd(f, &[(0.0, 1.0); 4], &mc).unwrap();
    let b = integrate_nd(f, &[(0.0, 1.0); 4], &mc).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert!((a.value - 2.0).abs() <= 3.0 * a.error_estimate);
}

proptest! {
    #[test]
    fn polynomials_are_exact(c in prop::collection::vec(-3.0f64..3.0, 1..8), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let s = QuadSpec::default();
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let anti = |x: f64| c.iter().enumerate().map(|(k, &v)| v * x.powi(k as i32 + 1) / (k + 1) as f64).sum::<f64>();
        let r = integrate(p, a, b, &s).unwrap();
        let want = anti(b) - anti(a);
        let scale: f64 = c.iter().map(|v| v.abs()).sum::<f64>() * 3f64.powi(c.len() as i32);
        prop_assert!((r.value - want).abs() <= 1e-13 * scale);
    }

    #[test]
    fn pure_powers_are_exact(p in -0.95f64..0.0, b in 0.1f64..3.0) {
        let s = QuadSpec::default();
        let r = integrate_singular_1d(|_, d| d.powf(p), 0.0, b, p, Endpoint::Lower, &s).unwrap();
        let want = b.powf(p + 1.0) / (p + 1.0);
        prop_assert!((r.value - want).abs() <= 1e-13 * want);
        let u = integrate_singular_1d(|_, d| d.powf(p), 0.0, b, p, Endpoint::Upper, &s).unwrap();
        prop_assert!((u.value - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn reversing_bounds_flips_sign(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let s = QuadSpec::default();
        let f = |x: f64| (x * 1.3).cos() + x * x;
        let r1 = integrate(f, a, b, &s).unwrap().value;
        let r2 = integrate(f, b, a, &s).unwrap().value;
        prop_assert!((r1 + r2).abs() <= 1e-14 * (r1.abs() + 1.0));
    }
}
