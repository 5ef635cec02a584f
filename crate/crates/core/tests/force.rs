use halfstokes::force::{force_at, g_normal, g_tangential, mixed_norm_sweep, ForceProfiles};
use halfstokes::quad::{integrate_nd, QuadSpec};
use halfstokes::{HalfSpacePoint, ModelParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup() -> (ModelParams, ForceProfiles) {
    (ModelParams::default(), ForceProfiles::standard(3))
}

fn pt(x: [f64; 3]) -> HalfSpacePoint {
    HalfSpacePoint::from_slice(&x).unwrap()
}

#[test]
fn tangential_bump_has_unit_mass() {
    let (_, pr) = setup();
    let r = pr.bump_radius;
    let m = integrate_nd(
        |y| g_tangential(y, &pr),
        &[(-r, r), (-r, r)],
        &QuadSpec::default().with_rel_tol(1e-9),
    )
    .unwrap();
    assert!((m.value - 1.0).abs() < 1e-6, "{}", m.value);
}

#[test]
fn force_is_divergence_free() {
    let (p, pr) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    for _ in 0..100 {
        let y = [
            rng.gen_range(-0.85..0.85),
            rng.gen_range(-0.85..0.85),
            rng.gen_range(0.05..1.85),
        ];
        let t = rng.gen_range(0.55..1.5);
        let f = |y: [f64; 3]| force_at(&pt(y), t, &p, &pr).unwrap();
        let mut div = 0.0;
        let mut scale = 0.0;
        for k in 0..3 {
            let (mut a, mut b) = (y, y);
            a[k] += h;
            b[k] -= h;
            let d = (f(a)[k] - f(b)[k]) / (2.0 * h);
            div += d;
            scale += d.abs();
        }
        // outside the bump support every component vanishes
        if scale > 0.0 {
            assert!(div.abs() < 1e-4 * scale, "{y:?}: {div} vs {scale}");
        }
    }
}

/// Second-order one-sided k-th derivative by Richardson extrapolation of forward differences.
fn one_sided(f: impl Fn(f64) -> f64, x: f64, k: usize, h: f64) -> f64 {
    let fwd = |h: f64| {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += sign * binom * f(x + j as f64 * h);
            binom *= (k - j) as f64 / (j + 1) as f64;
        }
        acc / h.powi(k as i32)
    };
    2.0 * fwd(h / 2.0) - fwd(h)
}

#[test]
fn normal_profile_is_smooth_at_the_cutoff_ends() {
    let (p, pr) = setup();
    let g = |y: f64| g_normal(y, &p, &pr);
    let e = 1.0 - p.beta;
    // left limits at 1 are those of y^{1−β}
    let exact = [e, e * (e - 1.0), e * (e - 1.0) * (e - 2.0)];
    for k in 1..=3 {
        let left = one_sided(g, 1.0, k, -4e-3);
        let right = one_sided(g, 1.0, k, 4e-3);
        assert!((left - exact[k - 1]).abs() < 1e-4, "k = {k}: left {left}");
        assert!(
            (right - exact[k - 1]).abs() < 1e-4,
            "k = {k}: right {right}"
        );
        let at_end = one_sided(g, pr.cutoff_end, k, -4e-3);
        assert!(at_end.abs() < 1e-4, "k = {k}: {at_end}");
    }
}

#[test]
fn near_boundary_scaling_of_f2() {
    let (p, pr) = setup();
    let t = 0.6;
    let limit = (1.0 - p.beta) * g_tangential(&[0.0, 0.0], &pr) * p.a;
    for y_n in [1e-2, 1e-4, 1e-8] {
        let f = force_at(&pt([0.0, 0.0, y_n]), t, &p, &pr).unwrap();
        let r = f[1] / (y_n.powf(-p.beta) * (t - 0.5f64).powf(-p.alpha));
        assert!((r - limit).abs() < 1e-12 * limit, "{y_n}: {r} vs {limit}");
    }
}

#[test]
fn mixed_norm_converges_inside_and_grows_at_the_endpoint() {
    let pr = ForceProfiles::standard(3);
    let s = QuadSpec::default().with_rel_tol(1e-6);
    let floors = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    let p = ModelParams::new(3, 0.5, 0.4, 1.0).unwrap();
    let inside = mixed_norm_sweep(1.5, 2.0, &floors, &p, &pr, &s).unwrap();
    assert!(inside.finite_expected);
    assert!(inside.increment_ratio < 0.7, "{inside:?}");
    let q = ModelParams::default();
    let edge = mixed_norm_sweep(1.0 / q.alpha, 2.0, &floors, &q, &pr, &s).unwrap();
    assert!(!edge.finite_expected);
    assert!(edge.growing && edge.increment_ratio > 0.9, "{edge:?}");
}

proptest! {
    #[test]
    fn force_has_only_components_two_and_n(
        y1 in -1.0f64..1.0, y2 in -1.0f64..1.0, yn in 0.0f64..2.5, t in 0.0f64..2.0,
    ) {
        let (p, pr) = setup();
        let f = force_at(&pt([y1, y2, yn]), t, &p, &pr).unwrap();
        prop_assert_eq!(f[0], 0.0);
        if yn == 0.0 || t <= 0.5 {
            prop_assert_eq!(f[2], 0.0);
        }
        prop_assert!(f.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn bump_is_nonnegative_and_supported(y1 in -1.5f64..1.5, y2 in -1.5f64..1.5) {
        let (_, pr) = setup();
        let v = g_tangential(&[y1, y2], &pr);
        prop_assert!(v >= 0.0);
        if y1 * y1 + y2 * y2 >= pr.bump_radius * pr.bump_radius {
            prop_assert_eq!(v, 0.0);
        }
    }
}
