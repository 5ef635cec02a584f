use halfstokes::analysis::{fit_log_log, log_space};
use halfstokes::fields::{
    bad_term_bw, bad_term_bw_normal_deriv, good_term_d2wg, normal_deriv_w, pressure, pressure_pib,
    pressure_pig, velocity_v, velocity_w, velocity_w_nonlocal,
};
use halfstokes::force::{BumpRule, BumpWeight, ForceProfiles};
use halfstokes::kernels::{bump_profile, phi_profile, psi_profile, ProfileKernel};
use halfstokes::quad::QuadSpec;
use halfstokes::{HalfSpacePoint, ModelParams, SpaceTimePoint};
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

const PI: f64 = std::f64::consts::PI;

fn pt(x: [f64; 3]) -> HalfSpacePoint {
    HalfSpacePoint::from_slice(&x).unwrap()
}

fn at(x: [f64; 3], t: f64) -> SpaceTimePoint {
    SpaceTimePoint::new(pt(x), t)
}

fn setup() -> (ModelParams, ForceProfiles, QuadSpec) {
    (
        ModelParams::default(),
        ForceProfiles::standard(3),
        QuadSpec::default().with_rel_tol(1e-8),
    )
}

/// F(x′) and Δ′F(x′) by central differences of a tangential profile.
fn with_laplacian(f: impl Fn([f64; 3]) -> f64, x: [f64; 3]) -> (f64, f64) {
    let h = 0.05;
    let f0 = f(x);
    let mut lap = 0.0;
    for k in 0..2 {
        let mut p = x;
        let mut m = x;
        p[k] += h;
        m[k] -= h;
        lap += (f(p) - 2.0 * f0 + f(m)) / (h * h);
    }
    (f0, lap)
}

/// ∫_0^T u^{−α}(T − u)^{γ}(F + (T − u)ΔF) du in closed form.
fn time_moment(t: f64, alpha: f64, gamma_exp: f64, f: f64, lap: f64) -> f64 {
    t.powf(1.0 - alpha + gamma_exp) * beta(1.0 - alpha, 1.0 + gamma_exp) * f
        + t.powf(2.0 - alpha + gamma_exp) * beta(1.0 - alpha, 2.0 + gamma_exp) * lap
}

/// ∫_0^∞ (1−β)y^{−β}Γ₁(y, τ) dy = c τ^{−β/2}.
fn image_constant(b: f64) -> f64 {
    (1.0 - b) * gamma((1.0 - b) / 2.0) * 4f64.powf(-b / 2.0) / (2.0 * PI.sqrt())
}

/// ∫_0^∞ (1−β)y^{−β}Γ₁′(y, τ) dy = −c τ^{−(1+β)/2}.
fn image_slope_constant(b: f64) -> f64 {
    -(1.0 - b) * gamma(1.0 - b / 2.0) * 4f64.powf(-b / 2.0) / (2.0 * PI.sqrt())
}

#[test]
fn bad_term_matches_semigroup_oracle() {
    let (p, pr, s) = setup();
    for (x, sgn) in [
        ([5.0, 5.0, 0.0], 1.0),
        ([5.0, -5.0, 0.0], -1.0),
        ([-3.0, 6.0, 0.0], -1.0),
    ] {
        let t = 0.002;
        let (f, lap) = with_laplacian(|y| phi_profile(&pt(y), 1, &p, &pr, &s).unwrap().value, x);
        let oracle =
            -4.0 * p.a * image_constant(p.beta) * time_moment(t, p.alpha, -p.beta / 2.0, f, lap);
        let v = bad_term_bw(&at(x, 0.5 + t), 1, &p, &pr, &s).unwrap();
        assert!(
            (v.value - oracle).abs() < 1e-6 * oracle.abs(),
            "{x:?}: {} vs {oracle}",
            v.value
        );
        assert_eq!(v.value.signum(), sgn, "{x:?}");
    }
}

#[test]
fn bad_pressure_matches_semigroup_oracle() {
    let (p, pr, s) = setup();
    for x in [[0.0, 5.0, 1.0], [1.0, -4.0, 0.5], [-2.0, 3.0, 0.0]] {
        let t = 0.001;
        let (f, lap) = with_laplacian(|y| psi_profile(&pt(y), &p, &pr, &s).unwrap().value, x);
        let c = image_slope_constant(p.beta);
        let oracle = p.a * c * time_moment(t, p.alpha, -(1.0 + p.beta) / 2.0, f, lap);
        let v = pressure_pib(&at(x, 0.5 + t), &p, &pr, &s).unwrap();
        assert!(
            (v.value - oracle).abs() < 1e-6 * oracle.abs(),
            "{x:?}: {} vs {oracle}",
            v.value
        );
    }
}

#[test]
fn good_pressure_matches_semigroup_oracle() {
    let (p, pr, s) = setup();
    let rule = BumpRule::level(&pr, 2, 2, BumpWeight::Value).unwrap();
    let x = [0.0, 5.0, 1.0];
    let t = 0.001;
    let (f, lap) = with_laplacian(
        |y| bump_profile(&rule, &y[..2], y[2], ProfileKernel::D2(1, 2)),
        x,
    );
    let oracle = p.a * image_constant(p.beta) * time_moment(t, p.alpha, -p.beta / 2.0, f, lap);
    let v = pressure_pig(&at(x, 0.5 + t), &p, &pr, &s).unwrap();
    assert!(
        (v.value - oracle).abs() < 1e-6 * oracle.abs(),
        "{} vs {oracle}",
        v.value
    );
    let total = pressure(&at(x, 0.5 + t), &p, &pr, &s).unwrap();
    let b = pressure_pib(&at(x, 0.5 + t), &p, &pr, &s).unwrap();
    assert!((total.value - 4.0 * (v.value + b.value)).abs() <= 1e-14 * total.value.abs());
}

#[test]
fn bad_pressure_sign_follows_minus_sgn_x2() {
    let (p, pr, s) = setup();
    for x in [
        [0.0, 5.0, 1.0],
        [3.0, 2.5, 0.2],
        [-4.0, 6.0, 0.7],
        [1.0, 2.0, 1.5],
        [7.0, 3.0, 0.0],
        [0.0, -5.0, 1.0],
        [3.0, -2.5, 0.2],
        [-4.0, -6.0, 0.7],
        [1.0, -2.0, 1.5],
        [7.0, -3.0, 0.0],
    ] {
        let v = pressure_pib(&at(x, 0.5 + 1e-3), &p, &pr, &s).unwrap().value;
        let psi = psi_profile(&pt(x), &p, &pr, &s).unwrap().value;
        assert_eq!(psi.signum(), x[1].signum(), "{x:?}");
        assert_eq!(v.signum(), -x[1].signum(), "{x:?}: {v}");
    }
}

#[test]
fn normal_derivative_is_consistent_with_w() {
    let (p, pr, s) = setup();
    let (x, t, h) = ([5.0, 5.0, 0.05], 0.502, 1e-3);
    let w = |xn: f64| {
        velocity_w_nonlocal(&at([x[0], x[1], xn], t), 1, &p, &pr, &s)
            .unwrap()
            .value
    };
    let fd = (w(x[2] + h) - w(x[2] - h)) / (2.0 * h);
    let d = normal_deriv_w(&at(x, t), 1, &p, &pr, &s).unwrap();
    assert!(
        (d.value - fd).abs() < 1e-3 * d.value.abs(),
        "{} vs {fd}",
        d.value
    );
}

#[test]
fn velocity_is_divergence_free_away_from_the_force() {
    let (p, pr, s) = setup();
    let (x, t, h) = ([4.0, 5.0, 0.15], 0.51, 2e-3);
    let mut div = 0.0;
    let mut scale = 0.0;
    for k in 0..3 {
        let mut a = x;
        let mut b = x;
        a[k] += h;
        b[k] -= h;
        let wa = velocity_w(&at(a, t), k + 1, &p, &pr, &s).unwrap().value;
        let wb = velocity_w(&at(b, t), k + 1, &p, &pr, &s).unwrap().value;
        let d = (wa - wb) / (2.0 * h);
        div += d;
        scale += d.abs();
    }
    assert!(div.abs() < 1e-3 * scale, "div {div}, scale {scale}");
}

#[test]
fn no_slip_on_boundary() {
    let (p, pr, s) = setup();
    for x in [[5.0, 5.0, 0.0], [-3.0, 2.0, 0.0], [2.5, -6.0, 0.0]] {
        for i in 1..=3 {
            let w = velocity_w(&at(x, 0.53), i, &p, &pr, &s).unwrap();
            assert!(w.value.abs() <= 1e-14, "{x:?} {i}: {}", w.value);
        }
    }
}

#[test]
fn boundary_pieces_vanish_at_zero_height() {
    let (p, pr, s) = setup();
    let x = at([5.0, 5.0, 0.0], 0.505);
    assert_eq!(good_term_d2wg(&x, 1, &p, &pr, &s).unwrap().value, 0.0);
    let d = normal_deriv_w(&x, 1, &p, &pr, &s).unwrap();
    let b = bad_term_bw(&x, 1, &p, &pr, &s).unwrap();
    assert_eq!(d.value, b.value);
}

#[test]
fn translation_with_force_center() {
    let (p, pr, s) = setup();
    let shift = [1.5, -0.5];
    let moved = pr.clone().with_center(shift.to_vec());
    let (x, t) = ([5.0, 5.0, 0.1], 0.503);
    let y = [x[0] + shift[0], x[1] + shift[1], x[2]];
    let a = bad_term_bw(&at(x, t), 1, &p, &pr, &s).unwrap().value;
    let b = bad_term_bw(&at(y, t), 1, &p, &moved, &s).unwrap().value;
    assert!((a - b).abs() < 1e-9 * a.abs(), "{a} vs {b}");
    let a = velocity_w_nonlocal(&at(x, t), 2, &p, &pr, &s)
        .unwrap()
        .value;
    let b = velocity_w_nonlocal(&at(y, t), 2, &p, &moved, &s)
        .unwrap()
        .value;
    assert!((a - b).abs() < 1e-9 * a.abs(), "{a} vs {b}");
}

#[test]
fn heat_part_decays_fast_near_force_onset() {
    let (p, pr, s) = setup();
    let samples: Vec<(f64, f64)> = log_space(5e-3, 5e-2, 5)
        .into_iter()
        .map(|t| {
            (
                t,
                velocity_v(&at([2.0, 0.0, 0.5], 0.5 + t), 2, &p, &pr, &s)
                    .unwrap()
                    .value,
            )
        })
        .collect();
    let fit = fit_log_log(&samples).unwrap();
    assert!(fit.exponent >= 3.0, "{fit:?}");
    let v3 = velocity_v(&at([1.5, 1.5, 0.5], 0.55), 3, &p, &pr, &s)
        .unwrap()
        .value;
    assert!(v3.is_finite());
}

#[test]
fn bad_term_normal_derivative_matches_differences() {
    let (p, pr, s) = setup();
    let (x, t, h) = ([5.0, 5.0, 0.04], 0.503, 1e-3);
    let b = |xn: f64| {
        bad_term_bw(&at([x[0], x[1], xn], t), 1, &p, &pr, &s)
            .unwrap()
            .value
    };
    let fd = (b(x[2] + h) - b(x[2] - h)) / (2.0 * h);
    let d = bad_term_bw_normal_deriv(&at(x, t), 1, &p, &pr, &s).unwrap();
    assert!(
        (d.value - fd).abs() < 1e-3 * d.value.abs(),
        "{} vs {fd}",
        d.value
    );
}
