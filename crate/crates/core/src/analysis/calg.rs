//! The double integral calG(x_n, t) and its two-sided envelopes.

use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, log_space, PowerLawFit};
use crate::error::{domain, Result};
use crate::model::ModelParams;
use crate::quad::{integrate_singular_breaks, Endpoint, QuadResult, QuadSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFunArgs {
    pub x_n: f64,
    pub t: f64,
    pub gamma: f64,
}

/// Which two-sided bound applies: the clean time power law or the x_n-singular one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalGBranch {
    TimePower,
    NormalPower,
}

pub fn branch(beta: f64, gamma: f64) -> CalGBranch {
    if gamma - beta / 2.0 > -1.5 {
        CalGBranch::TimePower
    } else {
        CalGBranch::NormalPower
    }
}

/// Breakpoints (distances from 0) resolving a Gaussian layer of width `w` inside (0, len).
pub(crate) fn layer_breaks(w: f64, len: f64) -> Vec<f64> {
    let mut b = Vec::new();
    let mut d = w;
    while d < len && b.len() < 40 {
        b.push(d);
        d *= 2.0;
    }
    b
}

/// Y(x_n, σ) = ∫₀² y^{−β} e^{−(x_n+y)²/4σ} dy.
fn normal_factor(x_n: f64, sigma: f64, beta: f64, spec: &QuadSpec) -> Result<QuadResult> {
    let w = sigma.sqrt().min(2.0 * sigma / x_n.max(1e-300));
    integrate_singular_breaks(
        |_, y| y.powf(-beta) * (-(x_n + y).powi(2) / (4.0 * sigma)).exp(),
        0.0,
        2.0,
        -beta,
        Endpoint::Lower,
        &layer_breaks(w, 2.0),
        spec,
    )
}

/// calG(x_n, t) = ∫_{½}^t ∫₀² y^{−β}(τ−½)^{−α}(t−τ)^γ e^{−(x_n+y)²/(4(t−τ))} dy dτ.
pub fn calg(args: GFunArgs, params: &ModelParams, spec: &QuadSpec) -> Result<QuadResult> {
    let GFunArgs { x_n, t, gamma } = args;
    let (alpha, beta) = (params.alpha, params.beta);
    if !(t > 0.5) {
        return domain(format!("calG needs t > 1/2, got {t}"));
    }
    if !(x_n >= 0.0) {
        return domain("calG needs x_n ≥ 0");
    }
    let sing = gamma + (1.0 - beta) / 2.0;
    if x_n == 0.0 && sing <= -1.0 {
        return domain("calG diverges at x_n = 0 when γ − β/2 ≤ −3/2");
    }
    let inner = QuadSpec {
        rel_tol: spec.rel_tol * 1e-2,
        ..*spec
    };
    let half = 0.5 * (t - 0.5);
    let lower = integrate_singular_breaks(
        |_, d| {
            let sigma = t - 0.5 - d;
            let y = normal_factor(x_n, sigma, beta, &inner)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            d.powf(-alpha) * sigma.powf(gamma) * y
        },
        0.5,
        0.5 + half,
        -alpha,
        Endpoint::Lower,
        &[],
        spec,
    )?;
    let upper_exp = if x_n == 0.0 { sing.min(0.0) } else { 0.0 };
    let breaks = if x_n > 0.0 {
        layer_breaks(x_n * x_n / 64.0, half)
    } else {
        Vec::new()
    };
    let upper = integrate_singular_breaks(
        |_, sigma| {
            let y = normal_factor(x_n, sigma, beta, &inner)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            if y == 0.0 {
                return 0.0;
            }
            (t - 0.5 - sigma).powf(-alpha) * sigma.powf(gamma) * y
        },
        t - half,
        t,
        upper_exp,
        Endpoint::Upper,
        &breaks,
        spec,
    )?;
    Ok(lower + upper)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalGSample {
    pub x_n: f64,
    pub t: f64,
    pub value: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalGBoundsReport {
    pub branch: CalGBranch,
    pub gamma: f64,
    pub samples: Vec<CalGSample>,
    /// Empirical constants: min of calG/lower envelope and max of calG/upper envelope.
    pub c_lower: f64,
    pub c_upper: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Envelope prefactor without the Gaussian factor.
fn envelope(x_n: f64, t: f64, params: &ModelParams, gamma: f64) -> f64 {
    let s = t - 0.5;
    match branch(params.beta, gamma) {
        CalGBranch::TimePower => s.powf(1.5 - params.beta / 2.0 - params.alpha + gamma),
        CalGBranch::NormalPower => {
            s.powf(-params.alpha) * x_n.powf(3.0 - params.beta + 2.0 * gamma)
        }
    }
}

/// Ratios of calG to the lower (e^{−x_n²/2(t−½)}) and upper (e^{−x_n²/8(t−½)}) envelopes over a grid.
pub fn verify_calg_bounds(
    grid: &[(f64, f64)],
    params: &ModelParams,
    gamma: f64,
    spec: &QuadSpec,
) -> Result<CalGBoundsReport> {
    use rayon::prelude::*;
    let samples: Vec<CalGSample> = grid
        .par_iter()
        .map(|&(x_n, t)| {
            let v = calg(GFunArgs { x_n, t, gamma }, params, spec)?.value;
            let e = envelope(x_n, t, params, gamma);
            let q = x_n * x_n / (t - 0.5);
            Ok(CalGSample {
                x_n,
                t,
                value: v,
                ratio_lower: v / (e * (-q / 2.0).exp()),
                ratio_upper: v / (e * (-q / 8.0).exp()),
            })
        })
        .collect::<Result<_>>()?;
    let c_lower = samples
        .iter()
        .map(|s| s.ratio_lower)
        .fold(f64::INFINITY, f64::min);
    let c_upper = samples.iter().map(|s| s.ratio_upper).fold(0.0, f64::max);
    let all = samples.iter().flat_map(|s| [s.ratio_lower, s.ratio_upper]);
    let min_ratio = all.clone().fold(f64::INFINITY, f64::min);
    let max_ratio = all.fold(0.0, f64::max);
    Ok(CalGBoundsReport {
        branch: branch(params.beta, gamma),
        gamma,
        samples,
        c_lower,
        c_upper,
        min_ratio,
        max_ratio,
    })
}

/// Grid used for the branch-1 envelope check: x_n = c√(t−½).
pub fn envelope_grid(points_per_axis: usize) -> Vec<(f64, f64)> {
    let mut g = Vec::new();
    for s in log_space(1e-4, 1e-2, points_per_axis) {
        for k in 0..points_per_axis {
            let c = 2.0 * k as f64 / (points_per_axis - 1) as f64;
            g.push((c * s.sqrt(), 0.5 + s));
        }
    }
    g
}

/// Fitted (t−½)-exponent of calG at x_n = 0 over `window`.
pub fn calg_time_exponent(
    params: &ModelParams,
    gamma: f64,
    window: &[f64],
    spec: &QuadSpec,
) -> Result<PowerLawFit> {
    use rayon::prelude::*;
    let pts: Vec<(f64, f64)> = window
        .par_iter()
        .map(|&s| {
            calg(
                GFunArgs {
                    x_n: 0.0,
                    t: 0.5 + s,
                    gamma,
                },
                params,
                spec,
            )
            .map(|r| (s, r.value))
        })
        .collect::<Result<_>>()?;
    fit_power_law(&pts)
}

/// Fitted x_n-exponent of calG·(t−½)^α along t − ½ = ρ x_n².
pub fn calg_normal_exponent(
    params: &ModelParams,
    gamma: f64,
    rho: f64,
    x_window: &[f64],
    spec: &QuadSpec,
) -> Result<PowerLawFit> {
    use rayon::prelude::*;
    let pts: Vec<(f64, f64)> = x_window
        .par_iter()
        .map(|&x| {
            let s = rho * x * x;
            calg(
                GFunArgs {
                    x_n: x,
                    t: 0.5 + s,
                    gamma,
                },
                params,
                spec,
            )
            .map(|r| (x, r.value * s.powf(params.alpha)))
        })
        .collect::<Result<_>>()?;
    fit_power_law(&pts)
}

/// Slope of log calG against x_n²/(t−½) at fixed t.
pub fn calg_gaussian_slope(
    params: &ModelParams,
    gamma: f64,
    t: f64,
    q_values: &[f64],
    spec: &QuadSpec,
) -> Result<f64> {
    let s = t - 0.5;
    let mut pts = Vec::new();
    for &q in q_values {
        let x = (q * s).sqrt();
        pts.push((
            q,
            calg(GFunArgs { x_n: x, t, gamma }, params, spec)?
                .value
                .ln(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_selection() {
        assert_eq!(branch(0.4, -0.5), CalGBranch::TimePower);
        assert_eq!(branch(0.4, -1.5), CalGBranch::NormalPower);
    }

    #[test]
    fn monotone_in_normal_variable() {
        let p = ModelParams::default();
        let s = QuadSpec::default();
        let mut last = f64::INFINITY;
        for &x in &[0.0, 0.01, 0.05, 0.1, 0.3] {
            let v = calg(
                GFunArgs {
                    x_n: x,
                    t: 0.51,
                    gamma: -0.5,
                },
                &p,
                &s,
            )
            .unwrap()
            .value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn divergent_branch_rejected_at_boundary() {
        let p = ModelParams::default();
        let r = calg(
            GFunArgs {
                x_n: 0.0,
                t: 0.51,
                gamma: -1.5,
            },
            &p,
            &QuadSpec::default(),
        );
        assert!(r.is_err());
    }
}
