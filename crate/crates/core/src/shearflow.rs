//! Explicit shear flow w(x₃, t) driven by g(t) = |t|^{−1+α} and its boundary derivative rate.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::analysis::calg::layer_breaks;
use crate::analysis::fit::{fit_power_law, log_space, PowerLawFit};
use crate::error::{domain, Result};
use crate::quad::{integrate_singular_breaks, Endpoint, QuadResult, QuadSpec};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearParams {
    pub alpha: f64,
}

impl ShearParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return domain(format!("shear alpha {alpha} must lie in (0, 1/2)"));
        }
        Ok(Self { alpha })
    }

    pub fn g(&self, s: f64) -> f64 {
        s.abs().powf(self.alpha - 1.0)
    }
}

/// Which representation of w is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShearForm {
    /// (2/√π)∫_{−4}^t g(t−τ−4) dτ ∫₀^{x₃/√(4(τ+4))} e^{−ξ²} dξ
    Printed,
    /// ∫_{−4}^t g(s) erf(x₃/(2√(t−s))) ds
    Duhamel,
}

fn check(x3: f64, t: f64) -> Result<()> {
    if !(x3 >= 0.0) {
        return domain("x3 must be nonnegative");
    }
    if !(t > -4.0 && t < 0.0) {
        return domain(format!("t = {t} must lie in (−4, 0)"));
    }
    Ok(())
}

fn breaks(x3: f64, t: f64, len: f64) -> Vec<f64> {
    let mut b = layer_breaks(t.abs() / 16.0, len);
    if x3 > 0.0 {
        b.extend(layer_breaks(x3 * x3 / 64.0, len));
    }
    b
}

/// w(x₃, t) in the requested form.
pub fn shear_velocity(
    x3: f64,
    t: f64,
    sp: &ShearParams,
    form: ShearForm,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check(x3, t)?;
    if x3 == 0.0 {
        return Ok(QuadResult::zero());
    }
    let len = t + 4.0;
    match form {
        ShearForm::Printed => {
            // τ ∈ (−4, t); the distance d = τ + 4 from the lower end sets the inner limit
            integrate_singular_breaks(
                |tau, d| sp.g(t - tau - 4.0) * erf(x3 / (4.0 * d).sqrt()),
                -4.0,
                t,
                0.0,
                Endpoint::Lower,
                &breaks(x3, t, len),
                spec,
            )
        }
        ShearForm::Duhamel => integrate_singular_breaks(
            |s, d| sp.g(s) * erf(x3 / (2.0 * d.sqrt())),
            -4.0,
            t,
            0.0,
            Endpoint::Upper,
            &breaks(x3, t, len),
            spec,
        ),
    }
}

/// ∂_{x₃}w by differentiating the inner error function under the integral.
pub fn shear_normal_deriv(
    x3: f64,
    t: f64,
    sp: &ShearParams,
    form: ShearForm,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    check(x3, t)?;
    let len = t + 4.0;
    match form {
        ShearForm::Printed => integrate_singular_breaks(
            |tau, d| sp.g(t - tau - 4.0) * (-x3 * x3 / (4.0 * d)).exp() / (PI * d).sqrt(),
            -4.0,
            t,
            if x3 == 0.0 { -0.5 } else { 0.0 },
            Endpoint::Lower,
            &breaks(x3, t, len),
            spec,
        ),
        ShearForm::Duhamel => integrate_singular_breaks(
            |s, d| sp.g(s) * (-x3 * x3 / (4.0 * d)).exp() / (PI * d).sqrt(),
            -4.0,
            t,
            -0.5,
            Endpoint::Upper,
            &breaks(x3, t, len),
            spec,
        ),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShearRateReport {
    pub alpha: f64,
    pub form: ShearForm,
    pub target: f64,
    pub samples: Vec<(f64, f64)>,
    pub fit: PowerLawFit,
}

/// Fits the x₃-exponent of ∂_{x₃}w along t = −x₃²/8 over x₃ ∈ [10⁻³, 10⁻¹].
pub fn shear_normal_deriv_rate(
    sp: &ShearParams,
    form: ShearForm,
    spec: &QuadSpec,
) -> Result<ShearRateReport> {
    shear_rate_on_window(sp, form, &log_space(1e-3, 1e-1, 9), spec)
}

/// As [`shear_normal_deriv_rate`] over an arbitrary x₃ window.
pub fn shear_rate_on_window(
    sp: &ShearParams,
    form: ShearForm,
    window: &[f64],
    spec: &QuadSpec,
) -> Result<ShearRateReport> {
    let samples: Vec<(f64, f64)> = window
        .iter()
        .copied()
        .map(|x| shear_normal_deriv(x, -x * x / 8.0, sp, form, spec).map(|r| (x, r.value)))
        .collect::<Result<_>>()?;
    let fit = fit_power_law(&samples)?;
    Ok(ShearRateReport {
        alpha: sp.alpha,
        form,
        target: -1.0 + 2.0 * sp.alpha,
        samples,
        fit,
    })
}

/// Max relative residual of w_t − w_{x₃x₃} − g(t) by centered differences on `points`.
pub fn duhamel_pde_residual(
    sp: &ShearParams,
    points: &[(f64, f64)],
    h: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    let w = |x: f64, t: f64| shear_velocity(x, t, sp, ShearForm::Duhamel, spec).map(|r| r.value);
    let mut worst: f64 = 0.0;
    for &(x, t) in points {
        let wt = (w(x, t + h)? - w(x, t - h)?) / (2.0 * h);
        let wxx = (w(x + h, t)? - 2.0 * w(x, t)? + w(x - h, t)?) / (h * h);
        let g = sp.g(t);
        let scale = g.abs().max(wt.abs()).max(wxx.abs());
        worst = worst.max((wt - wxx - g).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_agree() {
        let sp = ShearParams::new(0.25).unwrap();
        let s = QuadSpec::default();
        for &(x, t) in &[(0.1, -1.0), (1.0, -0.01), (3.0, -3.5)] {
            let a = shear_velocity(x, t, &sp, ShearForm::Printed, &s)
                .unwrap()
                .value;
            let b = shear_velocity(x, t, &sp, ShearForm::Duhamel, &s)
                .unwrap()
                .value;
            assert!((a - b).abs() <= 1e-8 * b.abs(), "{a} {b}");
        }
    }

    #[test]
    fn boundary_value_and_domain() {
        let sp = ShearParams::new(0.25).unwrap();
        let s = QuadSpec::default();
        assert_eq!(
            shear_velocity(0.0, -1.0, &sp, ShearForm::Printed, &s)
                .unwrap()
                .value,
            0.0
        );
        assert!(shear_velocity(0.1, 0.5, &sp, ShearForm::Printed, &s).is_err());
        assert!(ShearParams::new(0.5).is_err());
    }
}
