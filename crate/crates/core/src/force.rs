//! The divergence-free boundary-singular force and its profiles g^T, g^N, h.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::{norm2, HalfSpacePoint, ModelParams};
use crate::quad::rules::{composite_gauss_legendre, gauss_legendre};
use crate::quad::{integrate_breaks, integrate_nd, QuadSpec};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceProfiles {
    pub bump_radius: f64,
    pub cutoff_start: f64,
    pub cutoff_end: f64,
    /// Constant c making ∫ g^T = 1 in R^{n−1}.
    pub normalization: f64,
    /// Center of the tangential bump; the origin by default.
    pub center: Vec<f64>,
}

impl ForceProfiles {
    pub fn new(n: usize, bump_radius: f64, cutoff_end: f64) -> Result<Self> {
        if !(bump_radius > 0.0 && bump_radius < 1.0) {
            return domain(format!("bump radius {bump_radius} must lie in (0, 1)"));
        }
        if !(cutoff_end > 1.0 && cutoff_end < 2.0) {
            return domain(format!("cutoff end {cutoff_end} must lie in (1, 2)"));
        }
        if n < 3 {
            return domain("dimension must be at least 3");
        }
        let normalization = 1.0 / bump_mass(n - 1, bump_radius)?;
        Ok(Self {
            bump_radius,
            cutoff_start: 1.0,
            cutoff_end,
            normalization,
            center: vec![0.0; n - 1],
        })
    }

    pub fn standard(n: usize) -> Self {
        Self::new(n, 0.9, 1.9).expect("standard profiles are valid")
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        self.center = center;
        self
    }

    pub fn dim_tangential(&self) -> usize {
        self.center.len()
    }
}

/// ∫_{R^m} exp(−1/(r₀² − |y|²)) dy by the radial reduction.
fn bump_mass(m: usize, r0: f64) -> Result<f64> {
    let sphere = 2.0 * PI.powf(m as f64 / 2.0) / statrs::function::gamma::gamma(m as f64 / 2.0);
    let spec = QuadSpec {
        rel_tol: 1e-13,
        ..QuadSpec::default()
    };
    let r = integrate_breaks(
        |r: f64| {
            let q = r0 * r0 - r * r;
            if q <= 0.0 {
                0.0
            } else {
                (-1.0 / q).exp() * r.powi(m as i32 - 1)
            }
        },
        0.0,
        r0,
        &[0.5 * r0, 0.8 * r0, 0.95 * r0],
        &spec,
    )?;
    Ok(sphere * r.value)
}

/// g^T(y′) = c·exp(−1/(r₀² − |y′ − center|²)) inside the ball, 0 outside.
pub fn g_tangential(y: &[f64], profiles: &ForceProfiles) -> f64 {
    let q = profiles.bump_radius.powi(2) - dist2(y, &profiles.center);
    if q <= 0.0 {
        0.0
    } else {
        profiles.normalization * (-1.0 / q).exp()
    }
}

/// Gradient of g^T, 0-based coordinate k.
pub fn g_tangential_deriv(y: &[f64], k: usize, profiles: &ForceProfiles) -> f64 {
    let q = profiles.bump_radius.powi(2) - dist2(y, &profiles.center);
    if q <= 0.0 {
        0.0
    } else {
        let yk = y[k] - profiles.center.get(k).copied().unwrap_or(0.0);
        profiles.normalization * (-1.0 / q).exp() * (-2.0 * yk / (q * q))
    }
}

fn dist2(y: &[f64], c: &[f64]) -> f64 {
    if c.is_empty() {
        return norm2(y);
    }
    y.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
fn e_fn(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smoothstep B(u) = E(u)/(E(u) + E(1−u)) and its derivative.
fn smoothstep(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    if u >= 1.0 {
        return (1.0, 0.0);
    }
    let a = e_fn(u);
    let b = e_fn(1.0 - u);
    let s = a + b;
    let d = a * b * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u))) / (s * s);
    (a / s, d)
}

/// Cutoff S and S′ at s.
pub fn cutoff(s: f64, profiles: &ForceProfiles) -> (f64, f64) {
    let c0 = profiles.cutoff_start;
    let ce = profiles.cutoff_end;
    if s <= c0 {
        (1.0, 0.0)
    } else if s >= ce {
        (0.0, 0.0)
    } else {
        let w = ce - c0;
        let (b, db) = smoothstep((ce - s) / w);
        (b, -db / w)
    }
}

/// g^N(y_n) = y_n^{1−β}·S(y_n).
pub fn g_normal(y_n: f64, params: &ModelParams, profiles: &ForceProfiles) -> f64 {
    if y_n <= 0.0 {
        return 0.0;
    }
    y_n.powf(1.0 - params.beta) * cutoff(y_n, profiles).0
}

/// (g^N)′(y_n) = (1−β)y_n^{−β}S + y_n^{1−β}S′.
pub fn g_normal_deriv(y_n: f64, params: &ModelParams, profiles: &ForceProfiles) -> f64 {
    if y_n <= 0.0 {
        return 0.0;
    }
    let (s, ds) = cutoff(y_n, profiles);
    let b = params.beta;
    (1.0 - b) * y_n.powf(-b) * s + y_n.powf(1.0 - b) * ds
}

/// h(t) = (t − ½)^{−α} for t > ½, else 0.
pub fn h_time(t: f64, params: &ModelParams) -> f64 {
    if t <= 0.5 {
        0.0
    } else {
        (t - 0.5).powf(-params.alpha)
    }
}

/// f(y, t): component 2 is a g^T (g^N)′ h, component n is −a D₂g^T g^N h.
pub fn force_at(
    y: &HalfSpacePoint,
    t: f64,
    params: &ModelParams,
    profiles: &ForceProfiles,
) -> Result<Vec<f64>> {
    y.check_dim(params.n)?;
    let n = params.n;
    let mut f = vec![0.0; n];
    let h = h_time(t, params);
    if h == 0.0 {
        return Ok(f);
    }
    f[1] = params.a
        * g_tangential(&y.tangential, profiles)
        * g_normal_deriv(y.normal, params, profiles)
        * h;
    f[n - 1] = -params.a
        * g_tangential_deriv(&y.tangential, 1, profiles)
        * g_normal(y.normal, params, profiles)
        * h;
    Ok(f)
}

/// ‖f‖ in L^{q₁}(0, 1; L^{p₁}) with t − ½ and y_n both truncated below at `floor`.
pub fn force_mixed_norm(
    q1: f64,
    p1: f64,
    floor: f64,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<f64> {
    if !(q1 >= 1.0 && p1 >= 1.0) {
        return domain(format!("exponents ({q1}, {p1}) must be at least 1"));
    }
    if !(floor > 0.0 && floor < 0.5) {
        return domain(format!("floor {floor} must lie in (0, 1/2)"));
    }
    let m = params.n - 1;
    let r0 = profiles.bump_radius;
    let mut bounds: Vec<(f64, f64)> = profiles.center.iter().map(|c| (c - r0, c + r0)).collect();
    bounds.resize(m, (-r0, r0));
    // y_n = e^u
    bounds.push((floor.ln(), profiles.cutoff_end.ln()));
    let space = integrate_nd(
        |z| {
            let y_n = z[m].exp();
            let f2 = g_tangential(&z[..m], profiles) * g_normal_deriv(y_n, params, profiles);
            let fn_ = g_tangential_deriv(&z[..m], 1, profiles) * g_normal(y_n, params, profiles);
            (f2 * f2 + fn_ * fn_).powf(0.5 * p1) * y_n
        },
        &bounds,
        spec,
    )?;
    let e = 1.0 - params.alpha * q1;
    let time = if e.abs() < 1e-12 {
        (0.5 / floor).ln()
    } else {
        (0.5f64.powf(e) - floor.powf(e)) / e
    };
    Ok(params.a * time.powf(1.0 / q1) * space.value.powf(1.0 / p1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormReport {
    pub q1: f64,
    pub p1: f64,
    pub floors: Vec<f64>,
    pub norms: Vec<f64>,
    /// q₁ < 1/α and p₁ < 1/β.
    pub finite_expected: bool,
    /// Norms increase as the floor decreases, with the last refinement adding more than 1%.
    pub growing: bool,
    /// Last increment of the norm over the one before; geometric decay signals convergence.
    pub increment_ratio: f64,
}

/// [`force_mixed_norm`] along decreasing floors.
pub fn mixed_norm_sweep(
    q1: f64,
    p1: f64,
    floors: &[f64],
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<MixedNormReport> {
    let mut floors = floors.to_vec();
    floors.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let norms: Vec<f64> = floors
        .iter()
        .map(|&f| force_mixed_norm(q1, p1, f, params, profiles, spec))
        .collect::<Result<_>>()?;
    let growing = norms.len() > 1
        && norms.windows(2).all(|w| w[1] > w[0])
        && norms[norms.len() - 1] > 1.01 * norms[norms.len() - 2];
    let k = norms.len();
    let increment_ratio = if k >= 3 {
        (norms[k - 1] - norms[k - 2]) / (norms[k - 2] - norms[k - 3])
    } else {
        f64::NAN
    };
    Ok(MixedNormReport {
        q1,
        p1,
        increment_ratio,
        floors,
        norms,
        finite_expected: q1 < 1.0 / params.alpha && p1 < 1.0 / params.beta,
        growing,
    })
}

/// Weight function carried by a [`BumpRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpWeight {
    /// g^T
    Value,
    /// ∂_{y_2} g^T
    D2,
}

/// Fixed quadrature over the support of g^T with the weight function folded into the weights.
#[derive(Debug, Clone)]
pub struct BumpRule {
    m: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BumpRule {
    pub fn new(
        profiles: &ForceProfiles,
        m: usize,
        per_panel: usize,
        angular: usize,
        weight: BumpWeight,
    ) -> Result<Self> {
        if !(2..=3).contains(&m) {
            return domain(format!(
                "bump rule for tangential dimension {m} not supported"
            ));
        }
        let r0 = profiles.bump_radius;
        let edges: Vec<f64> = [0.0, 0.45, 0.7, 0.85, 0.94, 1.0]
            .iter()
            .map(|e| e * r0)
            .collect();
        let (r, wr) = composite_gauss_legendre(&edges, per_panel);
        let center: Vec<f64> = if profiles.center.len() == m {
            profiles.center.clone()
        } else {
            vec![0.0; m]
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push = |y: &[f64], w: f64| {
            let v = match weight {
                BumpWeight::Value => g_tangential(y, profiles),
                BumpWeight::D2 => g_tangential_deriv(y, 1, profiles),
            };
            if v != 0.0 {
                nodes.extend_from_slice(y);
                weights.push(w * v);
            }
        };
        if m == 2 {
            let k = angular.max(4);
            for (ri, wi) in r.iter().zip(&wr) {
                for j in 0..k {
                    let th = 2.0 * PI * (j as f64 + 0.5) / k as f64;
                    let y = [center[0] + ri * th.cos(), center[1] + ri * th.sin()];
                    push(&y, ri * wi * 2.0 * PI / k as f64);
                }
            }
        } else {
            let k = (angular / 2).max(4);
            let (c, wc) = gauss_legendre(k);
            let kp = 2 * k;
            for (ri, wi) in r.iter().zip(&wr) {
                for (ct, wct) in c.iter().zip(&wc) {
                    let st = (1.0 - ct * ct).sqrt();
                    for j in 0..kp {
                        let ph = 2.0 * PI * (j as f64 + 0.5) / kp as f64;
                        let y = [
                            center[0] + ri * st * ph.cos(),
                            center[1] + ri * st * ph.sin(),
                            center[2] + ri * ct,
                        ];
                        push(&y, ri * ri * wi * wct * 2.0 * PI / kp as f64);
                    }
                }
            }
        }
        Ok(Self { m, nodes, weights })
    }

    pub fn level(
        profiles: &ForceProfiles,
        m: usize,
        level: u32,
        weight: BumpWeight,
    ) -> Result<Self> {
        let s = 1usize << level;
        Self::new(profiles, m, 6 * s, 16 * s, weight)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.m)
            .zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}
