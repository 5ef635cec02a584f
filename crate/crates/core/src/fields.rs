//! Velocity and pressure pieces driven by the singular force, by separable quadrature.
//!
//! With f₂ = a g^T(y′)(g^N)′(y_n)h(s) every piece factors into a time integral of h, a 1-D
//! normal weight built from Γ₁ and g^N, and a smoothed tangential profile Γ′_τ ∗ (D N ∗ g^T).
//! The smoothed profiles are tabulated by Chebyshev interpolation in (z_n, τ).

use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::force::{
    g_normal, g_normal_deriv, g_tangential, g_tangential_deriv, BumpRule, BumpWeight, ForceProfiles,
};
use crate::kernels::{bump_profile_with_abs, gauss1_deriv, gauss_nd, ProfileKernel};
use crate::model::{norm, ModelParams, SpaceTimePoint};
use crate::quad::{
    convolve_tangential, integrate_breaks, integrate_nd, integrate_singular_breaks, Endpoint,
    GaussianRule, QuadResult, QuadSpec, EFFECTIVE_RADIUS,
};

const PI: f64 = std::f64::consts::PI;
/// Normal reach of Γ₁ in units of √τ.
const REACH: f64 = 14.0;
const MAX_RULE_LEVEL: u32 = 2;
const MAX_CHEB: usize = 33;
const BUMP_LEVELS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldComponent {
    /// 1-based velocity component.
    Velocity(usize),
    Pressure,
}

impl fmt::Display for FieldComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldComponent::Velocity(i) => write!(f, "{i}"),
            FieldComponent::Pressure => write!(f, "p"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub location: SpaceTimePoint,
    pub component: FieldComponent,
    pub value: f64,
    pub error_estimate: f64,
}

impl FieldSample {
    fn new(x: &SpaceTimePoint, component: FieldComponent, value: f64, error_estimate: f64) -> Self {
        Self {
            location: x.clone(),
            component,
            value,
            error_estimate,
        }
    }

    fn zero(x: &SpaceTimePoint, component: FieldComponent) -> Self {
        Self::new(x, component, 0.0, 0.0)
    }

    fn scaled(r: QuadResult, c: f64, x: &SpaceTimePoint, component: FieldComponent) -> Self {
        Self::new(x, component, c * r.value, c.abs() * r.error_estimate)
    }
}

/// The three pieces of D_{x_n}w_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalDerivPieces {
    /// D_{x_n}V_i
    pub duhamel: FieldSample,
    /// D_{x_2}W^G_i
    pub good: FieldSample,
    /// B^w_i
    pub bad: FieldSample,
}

impl NormalDerivPieces {
    pub fn total(&self) -> FieldSample {
        let mut s = self.bad.clone();
        s.value = self.duhamel.value + self.good.value + self.bad.value;
        s.error_estimate =
            self.duhamel.error_estimate + self.good.error_estimate + self.bad.error_estimate;
        s
    }

    /// |D₂W^G + D_nV| / |B^w|.
    pub fn subleading_ratio(&self) -> f64 {
        (self.duhamel.value + self.good.value).abs() / self.bad.value.abs()
    }
}

fn check_setup(x: &SpaceTimePoint, params: &ModelParams, spec: &QuadSpec) -> Result<()> {
    params.validate()?;
    spec.validate()?;
    x.point.check_dim(params.n)?;
    if !(3..=4).contains(&params.n) {
        return domain(format!(
            "fields are evaluated for n = 3 or 4, got {}",
            params.n
        ));
    }
    if !x.t.is_finite() {
        return domain("time must be finite");
    }
    Ok(())
}

fn check_far(x: &SpaceTimePoint) -> Result<()> {
    if x.point.tangential_norm() < 2.0 {
        return domain(format!(
            "field pieces are evaluated for |x′| ≥ 2, got {}",
            x.point.tangential_norm()
        ));
    }
    Ok(())
}

fn check_tangential_index(i: usize, n: usize) -> Result<()> {
    if i < 1 || i >= n {
        return domain(format!("tangential index {i} out of range 1..{}", n - 1));
    }
    Ok(())
}

/// Chebyshev coefficients from values at the Lobatto points cos(πj/N), j = 0..N.
fn cheb_coeffs(values: &[f64]) -> Vec<f64> {
    let k = values.len();
    if k == 1 {
        return values.to_vec();
    }
    let n = (k - 1) as f64;
    let mut c = vec![0.0; k];
    for (m, cm) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == k - 1 { 0.5 } else { 1.0 };
            s += w * v * (PI * (j * m) as f64 / n).cos();
        }
        *cm = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[k - 1] *= 0.5;
    c
}

fn clenshaw(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + s * b1 - b2
}

fn lobatto(a: f64, b: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![b];
    }
    (0..k)
        .map(|j| 0.5 * (a + b) + 0.5 * (b - a) * (PI * j as f64 / (k - 1) as f64).cos())
        .collect()
}

fn unit(x: f64, a: f64, b: f64) -> f64 {
    if b > a {
        ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

/// Γ′_τ ∗ (K(·, z_n) ∗ w)(x′) by a Gaussian rule around x′ and a bump rule over supp g^T.
struct SmoothedProfile<'a> {
    x_t: &'a [f64],
    kernel: ProfileKernel,
    gauss: GaussianRule,
    bump: BumpRule,
}

impl SmoothedProfile<'_> {
    fn eval(&self, z_n: f64, tau: f64) -> (f64, f64) {
        if tau == 0.0 {
            return bump_profile_with_abs(&self.bump, self.x_t, z_n, self.kernel);
        }
        let m = self.x_t.len();
        let (mut acc, mut abs) = (0.0, 0.0);
        for (z, w) in self.gauss.points(self.x_t, tau) {
            let (v, a) = bump_profile_with_abs(&self.bump, &z[..m], z_n, self.kernel);
            acc += w * v;
            abs += w * a;
        }
        (acc, abs)
    }
}

/// Chebyshev table of (z_n, τ) ↦ Γ′_τ ∗ (K(·, z_n) ∗ w)(x′) on [z_lo, z_hi] × [0, τ_max].
struct ProfileTable {
    z: (f64, f64),
    tau_max: f64,
    coeffs: Vec<Vec<f64>>,
    scale: f64,
    error: f64,
}

impl ProfileTable {
    #[allow(clippy::too_many_arguments)]
    fn build(
        x_t: &[f64],
        z: (f64, f64),
        tau_max: f64,
        kernel: ProfileKernel,
        weight: BumpWeight,
        profiles: &ForceProfiles,
        spec: &QuadSpec,
    ) -> Result<Self> {
        let m = x_t.len();
        let center: Vec<f64> = if profiles.center.len() == m {
            profiles.center.clone()
        } else {
            vec![0.0; m]
        };
        let offset: Vec<f64> = x_t.iter().zip(&center).map(|(a, b)| a - b).collect();
        let gap = norm(&offset) - profiles.bump_radius;
        if !(gap >= 1.0) {
            return domain(format!(
                "point lies {gap} from the support of g^T, need at least 1"
            ));
        }
        let width = 2.0 * tau_max.sqrt();
        let radius = if width > 0.0 {
            ((gap - 0.1) / width).min(EFFECTIVE_RADIUS)
        } else {
            EFFECTIVE_RADIUS
        };
        if radius < 3.0 {
            return domain(format!(
                "time window τ ≤ {tau_max} reaches the support of g^T from |x′ − c| = {}",
                norm(&offset)
            ));
        }
        // Gaussian tail times the largest density reachable outside the ball.
        let tail_mass = (-radius * radius).exp();
        let near: Vec<f64> = x_t
            .iter()
            .zip(&offset)
            .map(|(x, o)| x - o / norm(&offset) * (gap - 0.1))
            .collect();

        let rules = |level: u32| -> Result<SmoothedProfile<'_>> {
            let s = 1usize << level;
            Ok(SmoothedProfile {
                x_t,
                kernel,
                gauss: GaussianRule::new(m, 6 * s, 12 * s, radius)?,
                bump: BumpRule::level(profiles, m, level, weight)?,
            })
        };
        let mut level = 0;
        let mut rule = rules(0)?;
        let mut level_diff;
        loop {
            let next = rules(level + 1)?;
            level_diff = 0.0f64;
            let mut converged = true;
            for zc in [z.0, z.1] {
                let (a, abs) = rule.eval(zc, tau_max);
                let (b, _) = next.eval(zc, tau_max);
                let d = (a - b).abs();
                level_diff = level_diff.max(d);
                if d > 0.1 * spec.tolerance_for(b) && d > 100.0 * f64::EPSILON * abs {
                    converged = false;
                }
            }
            if converged {
                break;
            }
            level += 1;
            rule = next;
            if level >= MAX_RULE_LEVEL {
                break;
            }
        }
        let sup_far = bump_profile_with_abs(&rule.bump, &near, z.0, kernel).1;
        let truncation = tail_mass * sup_far;

        let mut kz = if z.1 > z.0 { 9 } else { 1 };
        let mut kt = 9;
        loop {
            let zs = lobatto(z.0, z.1, kz);
            let ts: Vec<f64> = lobatto(0.0, tau_max, kt)
                .iter()
                .map(|t| t.max(0.0))
                .collect();
            let mut values = vec![vec![0.0; kt]; kz];
            for (p, &zp) in zs.iter().enumerate() {
                for (q, &tq) in ts.iter().enumerate() {
                    values[p][q] = rule.eval(zp, tq).0;
                }
            }
            let scale = values.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            let rows: Vec<Vec<f64>> = values.iter().map(|r| cheb_coeffs(r)).collect();
            let mut coeffs = vec![vec![0.0; kt]; kz];
            for q in 0..kt {
                let col: Vec<f64> = rows.iter().map(|r| r[q]).collect();
                for (p, c) in cheb_coeffs(&col).into_iter().enumerate() {
                    coeffs[p][q] = c;
                }
            }
            let tail_t: f64 = coeffs
                .iter()
                .map(|r| r[kt - 1].abs() + r[kt - 2].abs())
                .sum();
            let tail_z: f64 = if kz > 1 {
                coeffs[kz - 1]
                    .iter()
                    .chain(&coeffs[kz - 2])
                    .map(|c| c.abs())
                    .sum()
            } else {
                0.0
            };
            let tol = 0.01 * spec.tolerance_for(scale);
            let refine_t = tail_t > tol && kt < MAX_CHEB;
            let refine_z = tail_z > tol && kz > 1 && kz < MAX_CHEB;
            if !refine_t && !refine_z {
                return Ok(Self {
                    z,
                    tau_max,
                    coeffs,
                    scale,
                    error: level_diff + tail_t + tail_z + truncation,
                });
            }
            if refine_t {
                kt = 2 * kt - 1;
            }
            if refine_z {
                kz = 2 * kz - 1;
            }
        }
    }

    fn eval(&self, z_n: f64, tau: f64) -> f64 {
        let sz = unit(z_n, self.z.0, self.z.1);
        let st = unit(tau, 0.0, self.tau_max);
        let rows: Vec<f64> = self.coeffs.iter().map(|r| clenshaw(r, st)).collect();
        clenshaw(&rows, sz)
    }

    fn rel_error(&self) -> f64 {
        if self.scale > 0.0 {
            self.error / self.scale
        } else {
            0.0
        }
    }
}

/// One-dimensional weights in the normal variable.
#[derive(Debug, Clone, Copy)]
enum NormalWeight {
    /// ∫ (g^N)′(y) Γ₁(d + y, τ) dy
    Image(f64),
    /// ∫ (g^N)′(y) Γ₁′(d + y, τ) dy
    ImageSlope(f64),
    /// ∫ g(y) [D^l Γ₁(x_n − y, τ) − D^l Γ₁(x_n + y, τ)] dy, g = (g^N)′ or g^N
    Odd { x_n: f64, l: usize, slope: bool },
}

fn normal_weight(
    w: NormalWeight,
    tau: f64,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let end = profiles.cutoff_end;
    let s = tau.sqrt();
    let mut breaks: Vec<f64> = (-3..=8).map(|k| s * 2f64.powi(k)).collect();
    breaks.push(profiles.cutoff_start);
    match w {
        NormalWeight::Image(d) | NormalWeight::ImageSlope(d) if d > 0.0 => {
            let l = 2.0 * tau / d;
            breaks.extend((0..=6).map(|k| l * 2f64.powi(k)));
        }
        NormalWeight::Odd { x_n, .. } => {
            breaks.extend((-8..=8).map(|j| x_n + 0.5 * j as f64 * s));
        }
        _ => {}
    }
    breaks.retain(|&b| b > 0.0 && b < end);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let f = |_: f64, y: f64| -> f64 {
        match w {
            NormalWeight::Image(d) => {
                g_normal_deriv(y, params, profiles) * gauss1_deriv(d + y, tau, 0)
            }
            NormalWeight::ImageSlope(d) => {
                g_normal_deriv(y, params, profiles) * gauss1_deriv(d + y, tau, 1)
            }
            NormalWeight::Odd { x_n, l, slope } => {
                let g = if slope {
                    g_normal_deriv(y, params, profiles)
                } else {
                    g_normal(y, params, profiles)
                };
                g * (gauss1_deriv(x_n - y, tau, l) - gauss1_deriv(x_n + y, tau, l))
            }
        }
    };
    integrate_singular_breaks(f, 0.0, end, -params.beta, Endpoint::Lower, &breaks, spec)
}

/// Collects the first error raised inside a quadrature callback and the largest inner error ratio.
struct Inner {
    error: RefCell<Option<Error>>,
    rel: RefCell<f64>,
}

impl Inner {
    fn new() -> Self {
        Self {
            error: RefCell::new(None),
            rel: RefCell::new(0.0),
        }
    }

    fn take(&self, r: Result<QuadResult>) -> f64 {
        match r {
            Ok(q) => {
                if q.value != 0.0 {
                    let mut rel = self.rel.borrow_mut();
                    *rel = rel.max(q.error_estimate / q.value.abs());
                }
                q.value
            }
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    fn finish(self, r: Result<QuadResult>) -> Result<QuadResult> {
        if let Some(e) = self.error.into_inner() {
            return Err(e);
        }
        let mut r = r?;
        r.error_estimate += self.rel.into_inner() * r.value.abs();
        Ok(r)
    }
}

/// ∫_0^T u^{−α} F(T − u) du with the h singularity handled on [0, T/2] and an F singularity of
/// order `sigma_upper` at τ = 0 on [T/2, T]. `normal_scale` adds breaks where e^{−x_n²/4τ} turns on.
fn time_integral<F: Fn(f64) -> f64>(
    t_excess: f64,
    alpha: f64,
    sigma_upper: f64,
    normal_scale: f64,
    f: F,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let half = 0.5 * t_excess;
    let lower = integrate_singular_breaks(
        |u, d| d.powf(-alpha) * f(t_excess - u),
        0.0,
        half,
        -alpha,
        Endpoint::Lower,
        &[],
        spec,
    )?;
    let mut breaks: Vec<f64> = Vec::new();
    if normal_scale > 0.0 {
        let c = normal_scale * normal_scale / 4.0;
        breaks.extend((-3..=6).map(|k| c * 2f64.powi(-k)));
        breaks.retain(|&b| b > 0.0 && b < half);
    }
    let upper = integrate_singular_breaks(
        |u, d| u.powf(-alpha) * f(d),
        half,
        t_excess,
        sigma_upper,
        Endpoint::Upper,
        &breaks,
        spec,
    )?;
    Ok(lower + upper)
}

fn inner_spec(spec: &QuadSpec) -> QuadSpec {
    spec.with_rel_tol((0.1 * spec.rel_tol).max(1e-13))
}

/// −4a ∫ h(s) ∫_0^{x_n} Bn(x_n − z_n, t − s) Φ(x′, z_n, t − s) dz_n ds for the profile kernel given.
fn layered_potential(
    x: &SpaceTimePoint,
    kernel: ProfileKernel,
    weight: BumpWeight,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let t_excess = x.t - 0.5;
    let x_n = x.point.normal;
    if t_excess <= 0.0 || x_n == 0.0 {
        return Ok(QuadResult::zero());
    }
    let reach = x_n.min(REACH * t_excess.sqrt());
    let table = ProfileTable::build(
        &x.point.tangential,
        (x_n - reach, x_n),
        t_excess,
        kernel,
        weight,
        profiles,
        spec,
    )?;
    let ispec = inner_spec(spec);
    let inner = Inner::new();
    let f = |tau: f64| -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let top = x_n.min(REACH * tau.sqrt());
        let s = tau.sqrt();
        let breaks: Vec<f64> = (-3..=4)
            .map(|k| s * 2f64.powi(k))
            .filter(|&b| b < top)
            .collect();
        let r = integrate_breaks(
            |zeta| {
                let bn = inner.take(normal_weight(
                    NormalWeight::Image(zeta),
                    tau,
                    params,
                    profiles,
                    &ispec,
                ));
                bn * table.eval(x_n - zeta, tau)
            },
            0.0,
            top,
            &breaks,
            &ispec,
        );
        inner.take(r)
    };
    let r = time_integral(t_excess, params.alpha, -0.5 * params.beta, 0.0, f, spec);
    let mut r = inner.finish(r)?;
    r.error_estimate += table.rel_error() * r.value.abs();
    Ok(r.scale(-4.0 * params.a))
}

/// a ∫ h(s) ν(τ) Φ(x′, z_n, τ) ds with a fixed height z_n and normal weight ν.
#[allow(clippy::too_many_arguments)]
fn boundary_potential(
    x: &SpaceTimePoint,
    z_n: f64,
    normal: NormalWeight,
    sigma_upper: f64,
    kernel: ProfileKernel,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let t_excess = x.t - 0.5;
    if t_excess <= 0.0 {
        return Ok(QuadResult::zero());
    }
    let table = ProfileTable::build(
        &x.point.tangential,
        (z_n, z_n),
        t_excess,
        kernel,
        BumpWeight::Value,
        profiles,
        spec,
    )?;
    let ispec = inner_spec(spec);
    let inner = Inner::new();
    let scale = match normal {
        NormalWeight::Image(d) | NormalWeight::ImageSlope(d) => d,
        _ => 0.0,
    };
    let f = |tau: f64| -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        inner.take(normal_weight(normal, tau, params, profiles, &ispec)) * table.eval(z_n, tau)
    };
    let r = time_integral(t_excess, params.alpha, sigma_upper, scale, f, spec);
    let mut r = inner.finish(r)?;
    r.error_estimate += table.rel_error() * r.value.abs();
    Ok(r.scale(params.a))
}

/// B^w_i(x, t) = −4a ∫ h(s) Bn(x_n, τ) Γ′_τ ∗ φ_i(·, 0)(x′) ds, i tangential.
pub fn bad_term_bw(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    check_tangential_index(i, params.n)?;
    let c = FieldComponent::Velocity(i);
    if x.t <= 0.5 {
        return Ok(FieldSample::zero(x, c));
    }
    check_far(x)?;
    let r = boundary_potential(
        x,
        0.0,
        NormalWeight::Image(x.point.normal),
        -0.5 * params.beta,
        ProfileKernel::D2(i - 1, 1),
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, -4.0, x, c))
}

/// D_{x_n}B^w_i(x, t), i tangential.
pub fn bad_term_bw_normal_deriv(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    check_tangential_index(i, params.n)?;
    let c = FieldComponent::Velocity(i);
    if x.t <= 0.5 {
        return Ok(FieldSample::zero(x, c));
    }
    check_far(x)?;
    let r = boundary_potential(
        x,
        0.0,
        NormalWeight::ImageSlope(x.point.normal),
        -0.5 * (1.0 + params.beta),
        ProfileKernel::D2(i - 1, 1),
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, -4.0, x, c))
}

/// W_i(x, t) = ∫∫ L_{i2}(x, y, t − s) f₂(y, s) dy ds, i = 1..n.
pub fn velocity_w_nonlocal(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    if i < 1 || i > params.n {
        return domain(format!("component {i} out of range 1..{}", params.n));
    }
    let c = FieldComponent::Velocity(i);
    if x.t <= 0.5 || x.point.normal == 0.0 {
        return Ok(FieldSample::zero(x, c));
    }
    check_far(x)?;
    let r = layered_potential(
        x,
        ProfileKernel::D2(i - 1, 1),
        BumpWeight::Value,
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, 1.0, x, c))
}

/// D_{x_2}W^G_i with W^G_i = ∫∫ L_{ni}(x, y, t − s) f₂(y, s) dy ds, i tangential.
pub fn good_term_d2wg(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    check_tangential_index(i, params.n)?;
    let c = FieldComponent::Velocity(i);
    if x.t <= 0.5 || x.point.normal == 0.0 {
        return Ok(FieldSample::zero(x, c));
    }
    check_far(x)?;
    let n = params.n;
    let r = layered_potential(
        x,
        ProfileKernel::D2(i - 1, n - 1),
        BumpWeight::D2,
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, 1.0, x, c))
}

/// Γ′_τ ∗ w(x′) for w = g^T or D₂g^T.
///
/// Outside supp g^T the convolution is summed over refined bump rules, which keeps relative
/// accuracy when the value is exponentially small. Inside, a Gaussian rule around x′ is used.
struct TangentialHeat<'a> {
    x_t: &'a [f64],
    weight: BumpWeight,
    profiles: &'a ForceProfiles,
    rules: Vec<BumpRule>,
    center: Vec<f64>,
    floor: f64,
}

impl<'a> TangentialHeat<'a> {
    /// `tau_max` sets an absolute floor of rel_tol·|Γ′_{τ_max} ∗ w(x′)| for the smaller times.
    fn new(
        x_t: &'a [f64],
        weight: BumpWeight,
        profiles: &'a ForceProfiles,
        tau_max: f64,
        spec: &QuadSpec,
    ) -> Result<Self> {
        let m = x_t.len();
        let center: Vec<f64> = if profiles.center.len() == m {
            profiles.center.clone()
        } else {
            vec![0.0; m]
        };
        let offset: Vec<f64> = x_t.iter().zip(&center).map(|(a, b)| a - b).collect();
        let rules = if norm(&offset) > profiles.bump_radius {
            (0..=BUMP_LEVELS)
                .map(|l| BumpRule::level(profiles, m, l, weight))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let mut heat = Self {
            x_t,
            weight,
            profiles,
            rules,
            center,
            floor: 0.0,
        };
        if !heat.rules.is_empty() {
            heat.floor = spec.rel_tol * heat.eval(tau_max, spec)?.value.abs();
        }
        Ok(heat)
    }

    fn eval(&self, tau: f64, spec: &QuadSpec) -> Result<QuadResult> {
        if self.rules.is_empty() {
            let (weight, profiles) = (self.weight, self.profiles);
            return convolve_tangential(
                self.x_t,
                tau,
                |z| match weight {
                    BumpWeight::Value => g_tangential(z, profiles),
                    BumpWeight::D2 => g_tangential_deriv(z, 1, profiles),
                },
                spec,
            );
        }
        let m = self.x_t.len();
        let mut d = [0.0; 3];
        let mut prev: Option<f64> = None;
        let mut evals = 0;
        for rule in &self.rules {
            let (mut acc, mut abs) = (0.0, 0.0);
            for (y, w) in rule.iter() {
                for k in 0..m {
                    d[k] = self.x_t[k] - y[k];
                }
                let v = w * gauss_nd(&d[..m], tau);
                acc += v;
                abs += v.abs();
            }
            evals += rule.len();
            if let Some(p) = prev {
                let diff = (acc - p).abs();
                if diff <= spec.tolerance_for(acc).max(self.floor)
                    || diff <= 100.0 * f64::EPSILON * abs
                {
                    return Ok(QuadResult::new(acc, diff, evals));
                }
            }
            prev = Some(acc);
        }
        // The Gaussian is too narrow for the fixed rules: adaptive cubature over the support box.
        let r0 = self.profiles.bump_radius;
        let bounds: Vec<(f64, f64)> = self.center.iter().map(|c| (c - r0, c + r0)).collect();
        let (weight, profiles) = (self.weight, self.profiles);
        let x_t = self.x_t;
        let r = integrate_nd(
            |y| {
                let w = match weight {
                    BumpWeight::Value => g_tangential(y, profiles),
                    BumpWeight::D2 => g_tangential_deriv(y, 1, profiles),
                };
                if w == 0.0 {
                    return 0.0;
                }
                let mut d = [0.0; 3];
                for k in 0..m {
                    d[k] = x_t[k] - y[k];
                }
                w * gauss_nd(&d[..m], tau)
            },
            &bounds,
            &spec.with_rel_tol(spec.rel_tol.max(1e-10)),
        )?;
        Ok(QuadResult::new(
            r.value,
            r.error_estimate,
            evals + r.evaluations,
        ))
    }
}

fn duhamel(
    x: &SpaceTimePoint,
    i: usize,
    l: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    let n = params.n;
    let c = FieldComponent::Velocity(i);
    let t_excess = x.t - 0.5;
    if t_excess <= 0.0 || (i != 2 && i != n) {
        return Ok(FieldSample::zero(x, c));
    }
    let (slope, weight, sign) = if i == 2 {
        (true, BumpWeight::Value, 1.0)
    } else {
        (false, BumpWeight::D2, -1.0)
    };
    let x_n = x.point.normal;
    let heat = TangentialHeat::new(&x.point.tangential, weight, profiles, t_excess, spec)?;
    let ispec = inner_spec(spec);
    let inner = Inner::new();
    let f = |tau: f64| -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let tang = inner.take(heat.eval(tau, &ispec));
        if tang == 0.0 {
            return 0.0;
        }
        let w = NormalWeight::Odd { x_n, l, slope };
        inner.take(normal_weight(w, tau, params, profiles, &ispec)) * tang
    };
    let sigma = -0.5 * (l as f64 + params.beta);
    let r = time_integral(t_excess, params.alpha, sigma, 0.0, f, spec);
    let r = inner.finish(r)?;
    Ok(FieldSample::scaled(r, sign * params.a, x, c))
}

/// V_i(x, t) = ∫∫ (Γ(x − y, t − s) − Γ(x − y*, t − s)) f_i(y, s) dy ds.
pub fn velocity_v(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    if i < 1 || i > params.n {
        return domain(format!("component {i} out of range 1..{}", params.n));
    }
    duhamel(x, i, 0, params, profiles, spec)
}

/// D_{x_n}V_i(x, t).
pub fn normal_deriv_v(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    if i < 1 || i > params.n {
        return domain(format!("component {i} out of range 1..{}", params.n));
    }
    duhamel(x, i, 1, params, profiles, spec)
}

/// w_i = V_i + W_i.
pub fn velocity_w(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    let v = velocity_v(x, i, params, profiles, spec)?;
    let w = velocity_w_nonlocal(x, i, params, profiles, spec)?;
    Ok(FieldSample::new(
        x,
        FieldComponent::Velocity(i),
        v.value + w.value,
        v.error_estimate + w.error_estimate,
    ))
}

/// D_{x_n}V_i, D_{x_2}W^G_i and B^w_i at one point, i tangential.
pub fn normal_deriv_pieces(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<NormalDerivPieces> {
    check_setup(x, params, spec)?;
    check_tangential_index(i, params.n)?;
    check_far(x)?;
    Ok(NormalDerivPieces {
        duhamel: normal_deriv_v(x, i, params, profiles, spec)?,
        good: good_term_d2wg(x, i, params, profiles, spec)?,
        bad: bad_term_bw(x, i, params, profiles, spec)?,
    })
}

/// D_{x_n}w_i = D_{x_n}V_i + D_{x_2}W^G_i + B^w_i.
pub fn normal_deriv_w(
    x: &SpaceTimePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    Ok(normal_deriv_pieces(x, i, params, profiles, spec)?.total())
}

fn check_pressure(x: &SpaceTimePoint) -> Result<()> {
    if x.point.tangential.len() < 2 || x.point.tangential[1].abs() < 2.0 {
        return domain("pressure pieces are evaluated for |x₂| ≥ 2");
    }
    Ok(())
}

/// Π^B(x, t) = a ∫ h(s) [∫ (g^N)′ Γ₁′(y_n, τ) dy_n] Γ′_τ ∗ ψ(·, x_n)(x′) ds.
pub fn pressure_pib(
    x: &SpaceTimePoint,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    let c = FieldComponent::Pressure;
    if x.t <= 0.5 {
        return Ok(FieldSample::zero(x, c));
    }
    check_pressure(x)?;
    let r = boundary_potential(
        x,
        x.point.normal,
        NormalWeight::ImageSlope(0.0),
        -0.5 * (1.0 + params.beta),
        ProfileKernel::D1(1),
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, 1.0, x, c))
}

/// Π^G(x, t) = a ∫ h(s) [∫ (g^N)′ Γ₁(y_n, τ) dy_n] Γ′_τ ∗ (D₂D_nN(·, x_n) ∗ g^T)(x′) ds.
pub fn pressure_pig(
    x: &SpaceTimePoint,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    check_setup(x, params, spec)?;
    let c = FieldComponent::Pressure;
    if x.t <= 0.5 {
        return Ok(FieldSample::zero(x, c));
    }
    check_pressure(x)?;
    let r = boundary_potential(
        x,
        x.point.normal,
        NormalWeight::Image(0.0),
        -0.5 * params.beta,
        ProfileKernel::D2(1, params.n - 1),
        params,
        profiles,
        spec,
    )?;
    Ok(FieldSample::scaled(r, 1.0, x, c))
}

/// Π = 4(Π^G + Π^B).
pub fn pressure(
    x: &SpaceTimePoint,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<FieldSample> {
    let g = pressure_pig(x, params, profiles, spec)?;
    let b = pressure_pib(x, params, profiles, spec)?;
    Ok(FieldSample::new(
        x,
        FieldComponent::Pressure,
        4.0 * (g.value + b.value),
        4.0 * (g.error_estimate + b.error_estimate),
    ))
}
