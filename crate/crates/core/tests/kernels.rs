use halfstokes::force::ForceProfiles;
use halfstokes::kernels::{
    heat_kernel, heat_kernel_normal_deriv, hermite_coeffs, hermite_poly, newton_deriv,
    newton_kernel, phi_profile,
};
use halfstokes::quad::{integrate, integrate_nd, QuadSpec};
use halfstokes::regions::{membership, B2Variant};
use halfstokes::{HalfSpacePoint, ModelParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

const PI: f64 = std::f64::consts::PI;

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-10)
}

fn heat_mass(d: usize, t: f64) -> f64 {
    let l = 12.0 * t.sqrt();
    let s = spec();
    if d <= 3 {
        let bounds = vec![(-l, l); d];
        return integrate_nd(|x| heat_kernel(x, t).unwrap(), &bounds, &s)
            .unwrap()
            .value;
    }
    // |S^{d−1}| ∫ r^{d−1} Γ(r e₁, t) dr for the radial kernel
    let sphere = 2.0 * PI.powf(0.5 * d as f64) / gamma(0.5 * d as f64);
    let radial = integrate(
        |r| {
            let mut x = vec![0.0; d];
            x[0] = r;
            r.powi(d as i32 - 1) * heat_kernel(&x, t).unwrap()
        },
        0.0,
        l,
        &s,
    )
    .unwrap()
    .value;
    sphere * radial
}

#[test]
fn heat_kernel_has_unit_mass() {
    for d in 1..=4 {
        for t in [0.1, 1.0] {
            let m = heat_mass(d, t);
            assert!((m - 1.0).abs() < 1e-6, "d = {d}, t = {t}: {m}");
        }
    }
}

#[test]
fn heat_semigroup_in_one_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = spec();
    for _ in 0..10 {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let t: f64 = rng.gen_range(0.05..1.0);
        let r: f64 = rng.gen_range(0.05..1.0);
        let l = 12.0 * (t + r).sqrt() + x.abs();
        let v = integrate(
            |z| heat_kernel(&[x - z], t).unwrap() * heat_kernel(&[z], r).unwrap(),
            -l,
            l,
            &s,
        )
        .unwrap()
        .value;
        let want = heat_kernel(&[x], t + r).unwrap();
        assert!((v - want).abs() < 1e-5 * want, "{x} {t} {r}: {v} vs {want}");
    }
}

#[test]
fn hermite_recursion_is_exact() {
    // P_{l+1} = −2ηP_l − 2lP_{l−1}
    let mut prev = vec![0i64];
    let mut cur = vec![1i64];
    for l in 0..6 {
        let mut next = vec![0i64; cur.len() + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] -= 2 * c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] -= 2 * l as i64 * c;
        }
        assert_eq!(hermite_coeffs(l + 1), next, "l = {}", l + 1);
        for q in -8..=8 {
            let eta = q as f64 / 4.0;
            let horner = next.iter().rev().fold(0.0, |acc, &c| acc * eta + c as f64);
            assert_eq!(hermite_poly(l + 1, eta), horner);
        }
        prev = cur;
        cur = next;
    }
}

#[test]
fn normal_derivatives_match_finite_differences() {
    let h = 1e-4;
    for t in [0.05, 0.3, 1.0] {
        for x in [-1.3, -0.2, 0.0, 0.4, 0.9, 2.1] {
            for l in 1..=4 {
                let d = heat_kernel_normal_deriv(x, t, l).unwrap();
                let a = heat_kernel_normal_deriv(x + h, t, l - 1).unwrap();
                let b = heat_kernel_normal_deriv(x - h, t, l - 1).unwrap();
                let fd = (a - b) / (2.0 * h);
                let scale = t.powf(-0.5 * (l as f64 + 1.0));
                assert!(
                    (d - fd).abs() < 1e-5 * scale.max(d.abs()),
                    "{x} {t} {l}: {d} vs {fd}"
                );
            }
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let r: f64 = rng.gen_range(0.5..10.0);
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter().map(|a| r * a / n).collect()
}

#[test]
fn newton_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..100 {
        let d = 3 + k % 2;
        let x = random_point(&mut rng, d);
        let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let h = 1e-4 * r;
        let shift = |v: &[f64], i: usize, e: f64| {
            let mut w = v.to_vec();
            w[i] += e;
            w
        };
        let grad: Vec<f64> = (0..d)
            .map(|i| {
                let mut m = vec![0; d];
                m[i] = 1;
                newton_deriv(&x, &m).unwrap()
            })
            .collect();
        let gscale = grad.iter().map(|a| a * a).sum::<f64>().sqrt();
        for (i, g) in grad.iter().enumerate() {
            let fd = (newton_kernel(&shift(&x, i, h)).unwrap()
                - newton_kernel(&shift(&x, i, -h)).unwrap())
                / (2.0 * h);
            assert!((g - fd).abs() < 1e-5 * gscale, "{x:?} {i}");
        }
        let hscale = gscale / r;
        for i in 0..d {
            for j in 0..d {
                let mut m = vec![0; d];
                m[i] += 1;
                m[j] += 1;
                let v = newton_deriv(&x, &m).unwrap();
                let mut mi = vec![0; d];
                mi[i] = 1;
                let fd = (newton_deriv(&shift(&x, j, h), &mi).unwrap()
                    - newton_deriv(&shift(&x, j, -h), &mi).unwrap())
                    / (2.0 * h);
                assert!((v - fd).abs() < 1e-5 * hscale, "{x:?} {i}{j}");
            }
        }
    }
}

#[test]
fn newton_kernel_is_harmonic() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..50 {
        let d = 3 + k % 2;
        let x = random_point(&mut rng, d);
        let parts: Vec<f64> = (0..d)
            .map(|i| {
                let mut m = vec![0; d];
                m[i] = 2;
                newton_deriv(&x, &m).unwrap()
            })
            .collect();
        let lap: f64 = parts.iter().sum();
        let scale: f64 = parts.iter().map(|a| a.abs()).sum();
        assert!(lap.abs() < 1e-6 * scale, "{x:?}: {lap}");
    }
}

#[test]
fn newton_flux_through_spheres_is_one() {
    let s = spec();
    for r in [0.5, 1.0, 3.0] {
        let f3 = integrate_nd(
            |a| {
                let (th, ph) = (a[0], a[1]);
                let x = [
                    r * th.sin() * ph.cos(),
                    r * th.sin() * ph.sin(),
                    r * th.cos(),
                ];
                let radial: f64 = (0..3)
                    .map(|i| {
                        let mut m = [0; 3];
                        m[i] = 1;
                        newton_deriv(&x, &m).unwrap() * x[i] / r
                    })
                    .sum();
                radial * r * r * th.sin()
            },
            &[(0.0, PI), (0.0, 2.0 * PI)],
            &s,
        )
        .unwrap()
        .value;
        assert!((f3 - 1.0).abs() < 1e-4, "d = 3, r = {r}: {f3}");
        let f4 = integrate_nd(
            |a| {
                let (p1, p2, p3) = (a[0], a[1], a[2]);
                let x = [
                    r * p1.cos(),
                    r * p1.sin() * p2.cos(),
                    r * p1.sin() * p2.sin() * p3.cos(),
                    r * p1.sin() * p2.sin() * p3.sin(),
                ];
                let radial: f64 = (0..4)
                    .map(|i| {
                        let mut m = [0; 4];
                        m[i] = 1;
                        newton_deriv(&x, &m).unwrap() * x[i] / r
                    })
                    .sum();
                radial * r.powi(3) * p1.sin().powi(2) * p2.sin()
            },
            &[(0.0, PI), (0.0, PI), (0.0, 2.0 * PI)],
            &s,
        )
        .unwrap()
        .value;
        assert!((f4 - 1.0).abs() < 1e-4, "d = 4, r = {r}: {f4}");
    }
}

#[test]
fn phi_sign_pattern_on_a_sets() {
    let params = ModelParams::default();
    let profiles = ForceProfiles::standard(3);
    let s = QuadSpec::default().with_rel_tol(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut neg, mut pos) = (0, 0);
    while neg < 50 || pos < 50 {
        let x = [rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)];
        let [a1, a2, _, _] = membership(&x, 1, B2Variant::Corrected).unwrap();
        if !(a1 && neg < 50 || a2 && pos < 50) {
            continue;
        }
        let p = HalfSpacePoint::new(x.to_vec(), 0.0).unwrap();
        let v = phi_profile(&p, 1, &params, &profiles, &s).unwrap().value;
        if a1 {
            assert!(v < 0.0, "A_11 {x:?}: {v}");
            neg += 1;
        } else {
            assert!(v > 0.0, "A_12 {x:?}: {v}");
            pos += 1;
        }
    }
}

proptest! {
    #[test]
    fn heat_kernel_scaling(x in prop::collection::vec(-3.0f64..3.0, 1..5), t in 0.01f64..2.0, lam in 0.2f64..5.0) {
        let d = x.len() as f64;
        let y: Vec<f64> = x.iter().map(|a| lam * a).collect();
        let a = heat_kernel(&y, lam * lam * t).unwrap();
        let b = lam.powf(-d) * heat_kernel(&x, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs() + 1e-300);
    }

    #[test]
    fn heat_kernel_positive_and_even(x in prop::collection::vec(-3.0f64..3.0, 1..5), t in 0.01f64..2.0) {
        let v = heat_kernel(&x, t).unwrap();
        let m: Vec<f64> = x.iter().map(|a| -a).collect();
        prop_assert!(v > 0.0);
        prop_assert_eq!(v, heat_kernel(&m, t).unwrap());
    }

    #[test]
    fn normal_derivative_parity(x in -3.0f64..3.0, t in 0.01f64..2.0, l in 0usize..7) {
        let a = heat_kernel_normal_deriv(x, t, l).unwrap();
        let b = heat_kernel_normal_deriv(-x, t, l).unwrap();
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-13 * a.abs().max(1e-300));
        if l == 0 {
            prop_assert!((a - heat_kernel(&[x], t).unwrap()).abs() <= 1e-13 * a);
        }
    }

    #[test]
    fn newton_kernel_is_radial_and_homogeneous(x in prop::collection::vec(-5.0f64..5.0, 3..5), lam in 0.2f64..5.0) {
        let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assume!(r > 1e-3);
        let d = x.len();
        let y: Vec<f64> = x.iter().map(|a| lam * a).collect();
        let a = newton_kernel(&y).unwrap();
        let b = lam.powf(2.0 - d as f64) * newton_kernel(&x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        let mut e = vec![0.0; d];
        e[d - 1] = r;
        prop_assert!((newton_kernel(&e).unwrap() - newton_kernel(&x).unwrap()).abs() <= 1e-12 * b.abs() / lam.powf(2.0 - d as f64));
    }
}
