use halfstokes::quad::QuadSpec;
use halfstokes::shearflow::{
    duhamel_pde_residual, shear_normal_deriv, shear_velocity, ShearForm, ShearParams,
};
use proptest::prelude::*;

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-10)
}

#[test]
fn velocity_is_bounded_and_monotone_in_height() {
    let sp = ShearParams::new(0.25).unwrap();
    let mut sup: f64 = 0.0;
    for k in 0..9 {
        let t = -3.9 + 3.8 * k as f64 / 8.0;
        let mut prev = 0.0;
        for j in 0..=20 {
            let x = 10.0 * j as f64 / 20.0;
            let w = shear_velocity(x, t, &sp, ShearForm::Duhamel, &spec())
                .unwrap()
                .value;
            if j == 0 {
                assert_eq!(w, 0.0);
            } else if x <= 2.0 {
                assert!(w > prev, "t = {t}, x = {x}");
            } else {
                // erf saturates in double precision far from the wall
                assert!(w >= prev, "t = {t}, x = {x}");
            }
            prev = w;
            sup = sup.max(w);
        }
    }
    assert!(sup.is_finite() && sup > 0.0);
}

#[test]
fn duhamel_form_solves_the_heat_equation() {
    let sp = ShearParams::new(0.25).unwrap();
    let pts: Vec<(f64, f64)> = [0.3, 0.8, 1.5]
        .iter()
        .flat_map(|&x| [-3.0, -2.0, -1.0].map(|t| (x, t)))
        .collect();
    let r = duhamel_pde_residual(&sp, &pts, 1e-3, &spec()).unwrap();
    assert!(r < 1e-3, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_derivative_is_positive(alpha in 0.05f64..0.49, x in 0.0f64..3.0, t in -3.95f64..-0.01) {
        let sp = ShearParams::new(alpha).unwrap();
        let d = shear_normal_deriv(x, t, &sp, ShearForm::Duhamel, &spec()).unwrap().value;
        prop_assert!(d > 0.0);
    }

    #[test]
    fn forms_agree(alpha in 0.05f64..0.49, x in 0.01f64..3.0, t in -3.9f64..-0.05) {
        let sp = ShearParams::new(alpha).unwrap();
        let s = QuadSpec::default().with_rel_tol(1e-9);
        let a = shear_normal_deriv(x, t, &sp, ShearForm::Duhamel, &s).unwrap().value;
        let b = shear_normal_deriv(x, t, &sp, ShearForm::Printed, &s).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-7 * a.abs());
    }
}
