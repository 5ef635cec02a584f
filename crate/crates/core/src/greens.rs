//! Half-space Green tensor K_ij, the non-local tensor L_ij and the pressure kernel P_j (n = 3).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{gauss1_deriv, gauss_nd, newton3_d1, newton3_d2};
use crate::model::HalfSpacePoint;
use crate::quad::rules::gauss_legendre;
use crate::quad::QuadSpec;

const PI: f64 = std::f64::consts::PI;
const MAX_LEVEL: usize = 3;
/// Half-width (in units of √t) of the Gaussian support kept in radial integrals.
const REACH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: f64,
    pub error_estimate: f64,
    /// Right side of the pointwise L bound with unit constant.
    pub bound_value: f64,
}

/// Derivative orders D_t^k D_{x_n}^{l_n} D_{x′}^{l′}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LDerivative {
    pub k: usize,
    pub l_prime: Vec<usize>,
    pub l_n: usize,
}

impl LDerivative {
    pub fn none() -> Self {
        Self {
            k: 0,
            l_prime: vec![0, 0],
            l_n: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l_prime.len() != 2 {
            return domain("tangential derivative orders need 2 entries");
        }
        if self.k > 2 || self.l_n > 2 || self.l_prime.iter().sum::<usize>() > 2 {
            return domain("derivative orders above 2 are not supported");
        }
        Ok(())
    }
}

/// Newtonian factor in a tangential convolution, 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NewtonFactor {
    First(usize),
    Second(usize, usize),
}

impl NewtonFactor {
    #[inline]
    fn eval(self, z: [f64; 3]) -> f64 {
        match self {
            NewtonFactor::First(i) => newton3_d1(z, i),
            NewtonFactor::Second(i, j) => newton3_d2(z, i, j),
        }
    }

    fn with_normal(self) -> Result<Self> {
        match self {
            NewtonFactor::First(i) => Ok(NewtonFactor::Second(i, 2)),
            NewtonFactor::Second(..) => domain("third Newtonian derivatives are not supported"),
        }
    }
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    fn level(level: usize) -> Self {
        let (x, w) = gauss_legendre(6 + 4 * level);
        Self { x, w }
    }

    fn panels(&self, edges: &[f64], out: &mut Vec<(f64, f64)>) {
        for e in edges.windows(2) {
            let c = 0.5 * (e[0] + e[1]);
            let h = 0.5 * (e[1] - e[0]);
            for (xi, wi) in self.x.iter().zip(&self.w) {
                out.push((c + h * xi, h * wi));
            }
        }
    }
}

/// Sorted, deduplicated breaks inside [lo, hi]; panels longer than `max_len` are split evenly.
fn edges(mut br: Vec<f64>, lo: f64, hi: f64, max_len: f64) -> Vec<f64> {
    br.push(lo);
    br.push(hi);
    br.retain(|&b| b >= lo && b <= hi && b.is_finite());
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tiny = 1e-14 * hi.abs().max(1e-300);
    br.dedup_by(|a, b| (*a - *b).abs() <= tiny);
    let mut out = vec![br[0]];
    for e in br.windows(2) {
        let m = ((e[1] - e[0]) / max_len).ceil().max(1.0) as usize;
        for k in 1..=m {
            out.push(e[0] + (e[1] - e[0]) * k as f64 / m as f64);
        }
    }
    out
}

/// ∫_{R²} D^a Γ′(ξ′ − z′, t) K(z′, z_n) dz′ in polar coordinates about z′ = 0.
///
/// Returns the value and Σ|w·f| for the cancellation floor.
fn tangential_newton(
    xi: [f64; 2],
    z_n: f64,
    t: f64,
    a: [usize; 2],
    kf: NewtonFactor,
    rule: &Rule,
) -> (f64, f64) {
    let s = t.sqrt();
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let lo = (r - REACH * s).max(0.0);
    let hi = r + REACH * s;
    let mut br: Vec<f64> = [-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|c| r + c * s)
        .collect();
    if z_n > 0.0 {
        let mut q = z_n / 8.0;
        while q < hi && br.len() < 80 {
            br.push(q);
            q *= 2.0;
        }
    }
    let radial = edges(br, lo, hi, s);
    let mut rho_nodes = Vec::new();
    rule.panels(&radial, &mut rho_nodes);

    let phi = xi[1].atan2(xi[0]);
    let mut ang = Vec::new();
    let (mut acc, mut abs) = (0.0, 0.0);
    for &(rho, wr) in &rho_nodes {
        if rho <= 0.0 {
            continue;
        }
        let kappa = rho * r / (2.0 * t);
        let mut ub = vec![-PI, -0.5 * PI, 0.0, 0.5 * PI, PI];
        if kappa > 1.0 {
            let w = 1.0 / kappa.sqrt();
            let mut q = w;
            while q < PI {
                ub.push(q);
                ub.push(-q);
                q *= 2.0;
            }
        }
        ang.clear();
        rule.panels(&edges(ub, -PI, PI, PI), &mut ang);
        let mut inner = 0.0;
        for &(u, wu) in &ang {
            let th = phi + u;
            let (c, sn) = (th.cos(), th.sin());
            let zx = rho * c;
            let zy = rho * sn;
            let g = gauss1_deriv(xi[0] - zx, t, a[0]) * gauss1_deriv(xi[1] - zy, t, a[1]);
            if g == 0.0 {
                continue;
            }
            let v = wu * g * kf.eval([zx, zy, z_n]);
            inner += v;
            abs += (wr * rho * v).abs();
        }
        acc += wr * rho * inner;
    }
    (acc, abs)
}

/// Nodes for ∫₀^{x_n} F(z_n) Γ₁^{(b)}(x_n + y_n − z_n, t) dz_n.
fn normal_nodes(x_n: f64, y_n: f64, t: f64, rule: &Rule) -> Vec<(f64, f64)> {
    let s = t.sqrt();
    let h = s.min(2.0 * t / y_n.max(1e-300));
    let mut br = Vec::new();
    let mut q = x_n / 2.0;
    for _ in 0..14 {
        br.push(q);
        q /= 2.0;
    }
    for c in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        br.push(x_n - c * h);
    }
    let mut out = Vec::new();
    rule.panels(&edges(br, 0.0, x_n, s), &mut out);
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, m| acc * (n + 1 - m) as f64 / m as f64)
}

/// One term c·Γ₁^{(b)}(·) ⊗ D^a Γ′ of the expanded derivative of the heat kernel.
struct Term {
    c: f64,
    b: usize,
    a: [usize; 2],
}

/// Expansion of D_t^k D_{x′}^{l′} D_{x_j} with D_t = ∂_n² + Δ′.
fn terms(j: usize, d: &LDerivative) -> Vec<Term> {
    let mut out = Vec::new();
    for p in 0..=d.k {
        let m = d.k - p;
        for q in 0..=m {
            let mut a = [d.l_prime[0] + 2 * q, d.l_prime[1] + 2 * (m - q)];
            a[j] += 1;
            out.push(Term {
                c: binom(d.k, p) * binom(m, q),
                b: 2 * p,
                a,
            });
        }
    }
    out
}

/// (value, Σ|·|) of the L derivative at one quadrature level.
#[allow(clippy::too_many_arguments)]
fn l_level(
    xi: [f64; 2],
    x_n: f64,
    y_n: f64,
    t: f64,
    i: usize,
    j: usize,
    d: &LDerivative,
    level: usize,
) -> Result<(f64, f64)> {
    let rule = Rule::level(level);
    let kf = NewtonFactor::First(i);
    let nodes = normal_nodes(x_n, y_n, t, &rule);
    let mut total = 0.0;
    let mut abs = 0.0;
    for term in terms(j, d) {
        let b = term.b + d.l_n;
        let (v, av) = nodes
            .par_iter()
            .map(|&(z, w)| {
                let g = w * gauss1_deriv(x_n + y_n - z, t, b);
                let (tv, ta) = tangential_newton(xi, z, t, term.a, kf, &rule);
                (g * tv, g.abs() * ta)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, 0.0), |p, q| (p.0 + q.0, p.1 + q.1));
        let mut part = v;
        abs += av;
        if d.l_n >= 1 {
            let (tv, ta) = tangential_newton(xi, x_n, t, term.a, kf, &rule);
            let g = gauss1_deriv(y_n, t, term.b + d.l_n - 1);
            part += g * tv;
            abs += (g * ta).abs();
        }
        if d.l_n == 2 {
            let (tv, ta) = tangential_newton(xi, x_n, t, term.a, kf.with_normal()?, &rule);
            let g = gauss1_deriv(y_n, t, term.b);
            part += g * tv;
            abs += (g * ta).abs();
        }
        total += term.c * part;
    }
    Ok((-4.0 * total, 4.0 * abs))
}

/// Refines fixed levels until successive values agree.
fn refine<F: Fn(usize) -> Result<(f64, f64)>>(f: F, spec: &QuadSpec) -> Result<(f64, f64)> {
    let (mut prev, _) = f(0)?;
    let mut diff = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let (v, abs) = f(level)?;
        diff = (v - prev).abs();
        if diff <= spec.tolerance_for(v) || diff <= 100.0 * f64::EPSILON * abs {
            return Ok((v, diff));
        }
        prev = v;
    }
    Err(Error::Accuracy {
        value: prev,
        error_estimate: diff,
        evaluations: MAX_LEVEL + 1,
    })
}

fn check_3d(x: &HalfSpacePoint, y: &HalfSpacePoint) -> Result<()> {
    x.check_dim(3)?;
    y.check_dim(3)?;
    if x.normal < 0.0 || y.normal < 0.0 {
        return domain("points must lie in the closed half space");
    }
    Ok(())
}

fn check_index(i: usize) -> Result<()> {
    if !(1..=3).contains(&i) {
        return domain(format!("index {i} outside 1..=3"));
    }
    Ok(())
}

/// e^{−y_n²/t} / (t^k (t + x_n²)^{l_n/2} (|x − y*|² + t)^{(n+|l′|)/2}).
pub fn l_bound_value(x: &HalfSpacePoint, y: &HalfSpacePoint, t: f64, d: &LDerivative) -> f64 {
    let n = x.dim() as f64;
    let lp: usize = d.l_prime.iter().sum();
    let ys = y.reflected();
    let dist2: f64 = x
        .to_vec()
        .iter()
        .zip(&ys)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    (-y.normal * y.normal / t).exp()
        / (t.powi(d.k as i32)
            * (t + x.normal * x.normal).powf(0.5 * d.l_n as f64)
            * (dist2 + t).powf(0.5 * (n + lp as f64)))
}

/// D_t^k D_{x_n}^{l_n} D_{x′}^{l′} L_ij(x, y, t) with 1-based indices.
pub fn l_tensor_deriv(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    t: f64,
    i: usize,
    j: usize,
    d: &LDerivative,
    spec: &QuadSpec,
) -> Result<KernelEval> {
    check_3d(x, y)?;
    check_index(i)?;
    check_index(j)?;
    d.validate()?;
    if !(t > 0.0) {
        return domain(format!("time {t} must be positive"));
    }
    let bound_value = l_bound_value(x, y, t, d);
    if j == 3 || (x.normal == 0.0 && d.l_n == 0) {
        return Ok(KernelEval {
            value: 0.0,
            error_estimate: 0.0,
            bound_value,
        });
    }
    let xi = [
        x.tangential[0] - y.tangential[0],
        x.tangential[1] - y.tangential[1],
    ];
    if x.normal == 0.0 {
        let (v, e) = refine(
            |lv| l_boundary_level(xi, y.normal, t, i - 1, j - 1, d, lv),
            spec,
        )?;
        return Ok(KernelEval {
            value: v,
            error_estimate: e,
            bound_value,
        });
    }
    let (v, e) = refine(
        |lv| l_level(xi, x.normal, y.normal, t, i - 1, j - 1, d, lv),
        spec,
    )?;
    Ok(KernelEval {
        value: v,
        error_estimate: e,
        bound_value,
    })
}

/// Boundary terms alone, for x_n = 0 where the z_n range is empty.
fn l_boundary_level(
    xi: [f64; 2],
    y_n: f64,
    t: f64,
    i: usize,
    j: usize,
    d: &LDerivative,
    level: usize,
) -> Result<(f64, f64)> {
    let rule = Rule::level(level);
    let kf = NewtonFactor::First(i);
    let (mut total, mut abs) = (0.0, 0.0);
    for term in terms(j, d) {
        let (tv, ta) = tangential_newton(xi, 0.0, t, term.a, kf, &rule);
        let g = gauss1_deriv(y_n, t, term.b + d.l_n - 1);
        let mut part = g * tv;
        abs += (g * ta).abs();
        if d.l_n == 2 {
            let (tv, ta) = tangential_newton(xi, 0.0, t, term.a, kf.with_normal()?, &rule);
            let g = gauss1_deriv(y_n, t, term.b);
            part += g * tv;
            abs += (g * ta).abs();
        }
        total += term.c * part;
    }
    Ok((-4.0 * total, 4.0 * abs))
}

/// L_ij(x, y, t) with 1-based indices.
pub fn l_tensor(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    t: f64,
    i: usize,
    j: usize,
    spec: &QuadSpec,
) -> Result<KernelEval> {
    l_tensor_deriv(x, y, t, i, j, &LDerivative::none(), spec)
}

/// K_ij = δ_ij(Γ(x − y, t) − Γ(x − y*, t)) + L_ij.
pub fn green_tensor(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    t: f64,
    i: usize,
    j: usize,
    spec: &QuadSpec,
) -> Result<KernelEval> {
    check_3d(x, y)?;
    if x == y {
        return Err(Error::Singularity("Green tensor at x = y".into()));
    }
    let l = l_tensor(x, y, t, i, j, spec)?;
    let mut value = l.value;
    if i == j {
        let xv = x.to_vec();
        let d: Vec<f64> = xv.iter().zip(y.to_vec()).map(|(a, b)| a - b).collect();
        let ds: Vec<f64> = xv.iter().zip(y.reflected()).map(|(a, b)| a - b).collect();
        value += gauss_nd(&d, t) - gauss_nd(&ds, t);
    }
    Ok(KernelEval { value, ..l })
}

/// T(ξ′, z_n) = ∫ Γ′(ξ′ − w′, t) D^m N(w′, z_n) dw′ for one Newtonian factor.
#[cfg(test)]
pub(crate) fn tangential_newton_refined(
    xi: [f64; 2],
    z_n: f64,
    t: f64,
    a: [usize; 2],
    kf: NewtonFactor,
    spec: &QuadSpec,
) -> Result<(f64, f64)> {
    refine(
        |lv| Ok(tangential_newton(xi, z_n, t, a, kf, &Rule::level(lv))),
        spec,
    )
}

/// P_j(x, y, t) = 4[Γ₁(y_n)T(D_jD_nN) + Γ₁′(y_n)T(D_jN)] evaluated at height x_n.
pub fn pressure_kernel(
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    t: f64,
    j: usize,
    spec: &QuadSpec,
) -> Result<KernelEval> {
    check_3d(x, y)?;
    check_index(j)?;
    if !(t > 0.0) {
        return domain(format!("time {t} must be positive"));
    }
    if j == 3 {
        return Ok(KernelEval {
            value: 0.0,
            error_estimate: 0.0,
            bound_value: f64::NAN,
        });
    }
    if x.normal <= 0.0 {
        return domain("pressure kernel needs x_n > 0");
    }
    let xi = [
        x.tangential[0] - y.tangential[0],
        x.tangential[1] - y.tangential[1],
    ];
    let jj = j - 1;
    let f = |lv: usize| {
        let rule = Rule::level(lv);
        let (a, aa) =
            tangential_newton(xi, x.normal, t, [0, 0], NewtonFactor::Second(jj, 2), &rule);
        let (b, ba) = tangential_newton(xi, x.normal, t, [0, 0], NewtonFactor::First(jj), &rule);
        let g0 = gauss1_deriv(y.normal, t, 0);
        let g1 = gauss1_deriv(y.normal, t, 1);
        Ok((4.0 * (g0 * a + g1 * b), 4.0 * (g0 * aa + (g1 * ba).abs())))
    };
    let (v, e) = refine(f, spec)?;
    Ok(KernelEval {
        value: v,
        error_estimate: e,
        bound_value: f64::NAN,
    })
}

/// Grid point for the L bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LBoundPoint {
    pub x: HalfSpacePoint,
    pub y: HalfSpacePoint,
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub derivative: LDerivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LBoundSample {
    pub point: LBoundPoint,
    pub eval: KernelEval,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LBoundReport {
    pub samples: Vec<LBoundSample>,
    /// Points skipped because the bound underflows below 1e−300.
    pub skipped: usize,
    pub max_ratio: f64,
    pub argmax: Option<usize>,
}

/// Evaluates |D L| / bound over `grid` (sequentially, each evaluation is parallel inside).
pub fn verify_l_bound(grid: &[LBoundPoint], spec: &QuadSpec) -> Result<LBoundReport> {
    let mut samples = Vec::new();
    let mut skipped = 0;
    for p in grid {
        let b = l_bound_value(&p.x, &p.y, p.t, &p.derivative);
        if !(b > 1e-300) {
            skipped += 1;
            continue;
        }
        let eval = l_tensor_deriv(&p.x, &p.y, p.t, p.i, p.j, &p.derivative, spec)?;
        let ratio = eval.value.abs() / eval.bound_value;
        if !ratio.is_finite() {
            return Err(Error::Accuracy {
                value: eval.value,
                error_estimate: eval.error_estimate,
                evaluations: 0,
            });
        }
        samples.push(LBoundSample {
            point: p.clone(),
            eval,
            ratio,
        });
    }
    let argmax = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.ratio.partial_cmp(&b.1.ratio).unwrap())
        .map(|(k, _)| k);
    let max_ratio = argmax.map_or(0.0, |k| samples[k].ratio);
    Ok(LBoundReport {
        samples,
        skipped,
        max_ratio,
        argmax,
    })
}
