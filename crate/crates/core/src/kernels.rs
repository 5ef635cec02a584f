//! Heat kernels, the Newtonian kernel and its derivatives, and the far-field profiles φ_i, ψ.

use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::force::{BumpRule, BumpWeight, ForceProfiles};
use crate::model::{norm2, HalfSpacePoint, ModelParams};
use crate::quad::{QuadResult, QuadSpec};

const PI: f64 = std::f64::consts::PI;

/// Γ_d(x, t) = (4πt)^{−d/2} e^{−|x|²/4t} with d = x.len().
pub fn heat_kernel(x: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("heat kernel needs t > 0, got {t}"));
    }
    Ok(gauss_nd(x, t))
}

#[inline]
pub(crate) fn gauss_nd(x: &[f64], t: f64) -> f64 {
    let d = x.len() as f64;
    (4.0 * PI * t).powf(-0.5 * d) * (-norm2(x) / (4.0 * t)).exp()
}

/// Integer coefficients of P_l, lowest degree first.
pub fn hermite_coeffs(l: usize) -> Vec<i64> {
    let mut p = vec![1i64];
    for _ in 0..l {
        let mut next = vec![0i64; p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            if k > 0 {
                next[k - 1] += k as i64 * c;
            }
            next[k + 1] -= 2 * c;
        }
        p = next;
    }
    p
}

/// P_l(η) with P_0 = 1 and P_l = P′_{l−1} − 2ηP_{l−1}, so that D^l e^{−η²} = P_l(η)e^{−η²}.
pub fn hermite_poly(l: usize, eta: f64) -> f64 {
    hermite_coeffs(l)
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * eta + c as f64)
}

/// l-th derivative in x of the one-dimensional heat kernel Γ₁(x, t).
pub fn heat_kernel_normal_deriv(x: f64, t: f64, l: usize) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("heat kernel needs t > 0, got {t}"));
    }
    Ok(gauss1_deriv(x, t, l))
}

#[inline]
pub(crate) fn gauss1_deriv(x: f64, t: f64, l: usize) -> f64 {
    let s = 2.0 * t.sqrt();
    let eta = x / s;
    let p = match l {
        0 => 1.0,
        1 => -2.0 * eta,
        2 => 4.0 * eta * eta - 2.0,
        3 => 12.0 * eta - 8.0 * eta * eta * eta,
        _ => hermite_poly(l, eta),
    };
    p * (-eta * eta).exp() / ((4.0 * PI * t).sqrt() * s.powi(l as i32))
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// c_d = 1/(d(d−2)ω_d).
pub fn newton_constant(d: usize) -> f64 {
    1.0 / (d as f64 * (d as f64 - 2.0) * unit_ball_volume(d))
}

/// N(x) = −c_d|x|^{2−d}.
pub fn newton_kernel(x: &[f64]) -> Result<f64> {
    let d = x.len();
    if d < 3 {
        return domain("Newtonian kernel needs d ≥ 3");
    }
    let r2 = norm2(x);
    if r2 == 0.0 {
        return Err(Error::Singularity("Newtonian kernel at the origin".into()));
    }
    Ok(-newton_constant(d) * r2.powf(1.0 - d as f64 / 2.0))
}

/// Partial derivative of N with per-coordinate orders `multi_index` (total order ≤ 2).
pub fn newton_deriv(x: &[f64], multi_index: &[usize]) -> Result<f64> {
    let d = x.len();
    if multi_index.len() != d {
        return domain("multi-index length must equal the dimension");
    }
    if d < 3 {
        return domain("Newtonian kernel needs d ≥ 3");
    }
    if norm2(x) == 0.0 {
        return Err(Error::Singularity(
            "Newtonian derivative at the origin".into(),
        ));
    }
    let mut dirs = Vec::new();
    for (k, &o) in multi_index.iter().enumerate() {
        for _ in 0..o {
            dirs.push(k);
        }
    }
    match dirs.as_slice() {
        [] => newton_kernel(x),
        [i] => Ok(newton_d1(x, *i)),
        [i, j] => Ok(newton_d2(x, *i, *j)),
        _ => domain("Newtonian derivatives of order above 2 are not implemented"),
    }
}

/// D_iN(x) = c_d(d−2)x_i/|x|^d, 0-based i.
#[inline]
pub(crate) fn newton_d1(x: &[f64], i: usize) -> f64 {
    let d = x.len();
    let r2 = norm2(x);
    newton_constant(d) * (d as f64 - 2.0) * x[i] * r2.powf(-0.5 * d as f64)
}

/// D_iD_jN(x) = c_d(d−2)[δ_ij|x|^{−d} − d x_i x_j |x|^{−d−2}], 0-based i, j.
#[inline]
pub(crate) fn newton_d2(x: &[f64], i: usize, j: usize) -> f64 {
    let d = x.len();
    let r2 = norm2(x);
    let rd = r2.powf(-0.5 * d as f64);
    let delta = if i == j { 1.0 } else { 0.0 };
    newton_constant(d) * (d as f64 - 2.0) * rd * (delta - d as f64 * x[i] * x[j] / r2)
}

/// Specialization of D_iN and D_iD_jN for d = 3.
#[inline]
pub(crate) fn newton3_d1(x: [f64; 3], i: usize) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    x[i] / (4.0 * PI * r2 * r2.sqrt())
}

#[inline]
pub(crate) fn newton3_d2(x: [f64; 3], i: usize, j: usize) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let r3 = r2 * r2.sqrt();
    let delta = if i == j { 1.0 } else { 0.0 };
    (delta - 3.0 * x[i] * x[j] / r2) / (4.0 * PI * r3)
}

/// Which Newtonian derivative a profile integrates against g^T.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKernel {
    /// D_{x_i}N, 0-based i
    D1(usize),
    /// D_{x_i}D_{x_j}N, 0-based i, j
    D2(usize, usize),
}

impl ProfileKernel {
    #[inline]
    pub(crate) fn eval(&self, z: &[f64]) -> f64 {
        if z.len() == 3 {
            let p = [z[0], z[1], z[2]];
            match *self {
                ProfileKernel::D1(i) => newton3_d1(p, i),
                ProfileKernel::D2(i, j) => newton3_d2(p, i, j),
            }
        } else {
            match *self {
                ProfileKernel::D1(i) => newton_d1(z, i),
                ProfileKernel::D2(i, j) => newton_d2(z, i, j),
            }
        }
    }
}

/// ∫ K(x′ − y′, x_n) w(y′) dy′ over the support of g^T, with w = g^T or D₂g^T.
pub fn bump_profile(rule: &BumpRule, x_t: &[f64], x_n: f64, kernel: ProfileKernel) -> f64 {
    bump_profile_with_abs(rule, x_t, x_n, kernel).0
}

pub(crate) fn bump_profile_with_abs(
    rule: &BumpRule,
    x_t: &[f64],
    x_n: f64,
    kernel: ProfileKernel,
) -> (f64, f64) {
    let m = x_t.len();
    let mut z = [0.0; 4];
    z[m] = x_n;
    let (mut acc, mut abs) = (0.0, 0.0);
    for (y, w) in rule.iter() {
        for k in 0..m {
            z[k] = x_t[k] - y[k];
        }
        let v = w * kernel.eval(&z[..=m]);
        acc += v;
        abs += v.abs();
    }
    (acc, abs)
}

fn refined_profile(
    x: &HalfSpacePoint,
    kernel: ProfileKernel,
    weight: BumpWeight,
    profiles: &ForceProfiles,
    quad: &QuadSpec,
) -> Result<QuadResult> {
    let m = x.tangential.len();
    let mut prev: Option<f64> = None;
    let mut evals = 0;
    let mut diff = f64::INFINITY;
    for level in 0..6 {
        let rule = BumpRule::level(profiles, m, level, weight)?;
        let (v, abs) = bump_profile_with_abs(&rule, &x.tangential, x.normal, kernel);
        evals += rule.len();
        if let Some(p) = prev {
            diff = (v - p).abs();
            if diff <= quad.tolerance_for(v) || diff <= 100.0 * f64::EPSILON * abs {
                return Ok(QuadResult::new(v, diff, evals));
            }
        }
        prev = Some(v);
    }
    let v = prev.unwrap_or(0.0);
    Err(Error::Accuracy {
        value: v,
        error_estimate: diff,
        evaluations: evals,
    })
}

fn check_far(x: &HalfSpacePoint, params: &ModelParams) -> Result<()> {
    x.check_dim(params.n)?;
    if x.tangential_norm() < 2.0 {
        return domain(format!(
            "profiles are evaluated for |x′| ≥ 2, got {}",
            x.tangential_norm()
        ));
    }
    Ok(())
}

/// φ_i(x′, x_n) = ∫ D_{x_i}D_{x_2}N(x′ − y′, x_n) g^T(y′) dy′, i 1-based.
pub fn phi_profile(
    x: &HalfSpacePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    quad: &QuadSpec,
) -> Result<QuadResult> {
    check_far(x, params)?;
    if i < 1 || i >= params.n {
        return domain(format!("tangential index {i} out of range"));
    }
    refined_profile(
        x,
        ProfileKernel::D2(i - 1, 1),
        BumpWeight::Value,
        profiles,
        quad,
    )
}

/// ψ(x′, x_n) = ∫ D_{x_2}N(x′ − y′, x_n) g^T(y′) dy′.
pub fn psi_profile(
    x: &HalfSpacePoint,
    params: &ModelParams,
    profiles: &ForceProfiles,
    quad: &QuadSpec,
) -> Result<QuadResult> {
    check_far(x, params)?;
    refined_profile(x, ProfileKernel::D1(1), BumpWeight::Value, profiles, quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_listed_polynomials() {
        assert_eq!(hermite_coeffs(2), vec![-2, 0, 4]);
        assert_eq!(hermite_coeffs(3), vec![0, 12, 0, -8]);
        assert_eq!(hermite_poly(2, 0.0), -2.0);
        assert_eq!(hermite_poly(3, 1.0), 4.0);
    }

    #[test]
    fn normalization_point() {
        let t = 1.0 / (4.0 * PI);
        assert!((heat_kernel(&[0.0, 0.0, 0.0], t).unwrap() - 1.0).abs() < 1e-15);
        assert!((heat_kernel_normal_deriv(0.0, t, 0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(heat_kernel_normal_deriv(0.0, 0.3, 1).unwrap(), 0.0);
        assert!(heat_kernel(&[1.0], 0.0).is_err());
    }

    #[test]
    fn closed_form_value() {
        let v = heat_kernel(&[1.0, 0.0, 0.0], 1.0).unwrap();
        let want = (4.0 * PI).powf(-1.5) * (-0.25f64).exp();
        assert!((v - want).abs() < 1e-16);
    }

    #[test]
    fn newton_values() {
        let c3 = newton_constant(3);
        assert!((c3 - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(
            (newton_kernel(&[1.0, 0.0, 0.0]).unwrap() + 0.079_577_471_545_947_67).abs() < 1e-15
        );
        assert!((newton_kernel(&[0.0, 2.0, 0.0]).unwrap() + 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!(matches!(
            newton_kernel(&[0.0; 3]),
            Err(Error::Singularity(_))
        ));
        assert!(newton_deriv(&[1.0, 1.0, 1.0], &[1, 1, 1]).is_err());
    }

    #[test]
    fn specialized_matches_general() {
        let x = [0.3, -1.2, 0.8];
        for i in 0..3 {
            assert!((newton3_d1(x, i) - newton_d1(&x, i)).abs() < 1e-15);
            for j in 0..3 {
                assert!((newton3_d2(x, i, j) - newton_d2(&x, i, j)).abs() < 1e-14);
            }
        }
    }
}
