//! Boundary Hölder rate of W, its time rate, and the empirical onset constant of the D_nB^w lower bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fit::{fit_power_law, log_space, PowerLawFit};
use crate::error::{domain, Result};
use crate::fields::{bad_term_bw_normal_deriv, velocity_w_nonlocal};
use crate::force::ForceProfiles;
use crate::model::{HalfSpacePoint, ModelParams, SpaceTimePoint};
use crate::quad::QuadSpec;
use crate::regions::{membership, B2Variant};

/// ε₀ = 3 − 2α − β.
pub fn epsilon0(params: &ModelParams) -> f64 {
    3.0 - 2.0 * params.alpha - params.beta
}

/// Window of heights used by [`holder_exponent`].
pub fn holder_window() -> Vec<f64> {
    log_space(1e-2, 1e-1, 9)
}

fn point(x_t: &[f64], x_n: f64, t: f64) -> Result<SpaceTimePoint> {
    let mut v = x_t.to_vec();
    v.push(x_n);
    Ok(SpaceTimePoint::new(HalfSpacePoint::from_slice(&v)?, t))
}

fn check_holder_setup(x_t: &[f64], i: usize, params: &ModelParams) -> Result<()> {
    if x_t.len() + 1 != params.n {
        return domain(format!(
            "tangential point has {} coordinates, expected {}",
            x_t.len(),
            params.n - 1
        ));
    }
    let [a1, a2, _, _] = membership(x_t, i, B2Variant::Corrected)?;
    if !(a1 || a2) {
        return domain(format!("x′ = {x_t:?} is not in A_{i}1 ∪ A_{i}2"));
    }
    let e = epsilon0(params);
    if !(e > 0.0 && e < 2.0) {
        return domain(format!("ε₀ = {e} outside (0, 2)"));
    }
    Ok(())
}

/// Fits the x_n-exponent of |W_i(x′, x_n, t) − W_i(x′, 0, t)| along t = ½ + 2x_n².
pub fn holder_exponent(
    x_t: &[f64],
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<PowerLawFit> {
    holder_exponent_on(x_t, i, params, profiles, &holder_window(), spec)
}

/// [`holder_exponent`] over an explicit window of heights.
pub fn holder_exponent_on(
    x_t: &[f64],
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    window: &[f64],
    spec: &QuadSpec,
) -> Result<PowerLawFit> {
    check_holder_setup(x_t, i, params)?;
    let pts: Vec<(f64, f64)> = window
        .par_iter()
        .map(|&x_n| {
            let t = 0.5 + 2.0 * x_n * x_n;
            let w = velocity_w_nonlocal(&point(x_t, x_n, t)?, i, params, profiles, spec)?;
            let w0 = velocity_w_nonlocal(&point(x_t, 0.0, t)?, i, params, profiles, spec)?;
            Ok((x_n, w.value - w0.value))
        })
        .collect::<Result<_>>()?;
    fit_power_law(&pts)
}

/// Fits the (t−½)-exponent of |W_i(x, t)| at fixed x with x_n² ≥ t − ½ over the window.
pub fn holder_time_exponent(
    x: &HalfSpacePoint,
    i: usize,
    params: &ModelParams,
    profiles: &ForceProfiles,
    window: &[f64],
    spec: &QuadSpec,
) -> Result<PowerLawFit> {
    check_holder_setup(&x.tangential, i, params)?;
    let top = window.iter().cloned().fold(0.0, f64::max);
    if x.normal * x.normal < top {
        return domain(format!(
            "x_n² = {} below the largest t − ½ = {top}",
            x.normal * x.normal
        ));
    }
    let pts: Vec<(f64, f64)> = window
        .par_iter()
        .map(|&s| {
            let w = velocity_w_nonlocal(
                &SpaceTimePoint::new(x.clone(), 0.5 + s),
                i,
                params,
                profiles,
                spec,
            )?;
            Ok((s, w.value))
        })
        .collect::<Result<_>>()?;
    fit_power_law(&pts)
}

/// Sampling grid for [`lower_bound_onset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetGrid {
    pub heights: Vec<f64>,
    pub rhos: Vec<f64>,
    pub floor: f64,
}

impl Default for OnsetGrid {
    fn default() -> Self {
        Self {
            heights: vec![0.025, 0.05, 0.1],
            rhos: log_space(0.05, 5.0, 11),
            floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetSample {
    pub x_n: f64,
    /// ρ = √(t−½)/x_n.
    pub rho: f64,
    pub t_excess: f64,
    pub value: f64,
    /// (t−½)^{1−(1+β+2α)/2} e^{−x_n²/2(t−½)}.
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetReport {
    pub x_tangential: Vec<f64>,
    pub i: usize,
    pub floor: f64,
    pub samples: Vec<OnsetSample>,
    /// Largest grid ρ such that every sample with smaller or equal ρ keeps the sign of its
    /// smallest-ρ sample and has |ratio| ≥ floor.
    pub c_l: Option<f64>,
    /// The bound held on the whole grid, so c_l is limited by the grid.
    pub grid_limited: bool,
    pub min_ratio: f64,
}

/// Empirical c_l for |D_nB^w_i| ≥ floor·(t−½)^{1−(1+β+2α)/2}e^{−x_n²/2(t−½)} on √(t−½) ≤ c_l x_n.
pub fn lower_bound_onset(
    x_t: &[f64],
    i: usize,
    grid: &OnsetGrid,
    params: &ModelParams,
    profiles: &ForceProfiles,
    spec: &QuadSpec,
) -> Result<OnsetReport> {
    let (heights, floor) = (&grid.heights, grid.floor);
    if heights.is_empty() || grid.rhos.is_empty() || !(floor > 0.0) {
        return domain("onset grid needs heights, ρ values and a positive floor");
    }
    let mut rhos = grid.rhos.clone();
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pairs: Vec<(f64, f64)> = heights
        .iter()
        .flat_map(|&h| rhos.iter().map(move |&r| (h, r)))
        .collect();
    let expo = 1.0 - 0.5 * (1.0 + params.beta + 2.0 * params.alpha);
    let samples: Vec<OnsetSample> = pairs
        .par_iter()
        .map(|&(x_n, rho)| {
            let s = (rho * x_n).powi(2);
            let v =
                bad_term_bw_normal_deriv(&point(x_t, x_n, 0.5 + s)?, i, params, profiles, spec)?;
            let shape = s.powf(expo) * (-x_n * x_n / (2.0 * s)).exp();
            Ok(OnsetSample {
                x_n,
                rho,
                t_excess: s,
                value: v.value,
                shape,
                ratio: v.value / shape,
            })
        })
        .collect::<Result<_>>()?;
    let holds = |k: usize| {
        (0..heights.len()).all(|j| {
            let row = &samples[j * rhos.len()..(j + 1) * rhos.len()];
            let sign = row[0].ratio.signum();
            row[k].ratio.signum() == sign && row[k].ratio.abs() >= floor
        })
    };
    let upto = (0..rhos.len()).take_while(|&k| holds(k)).count();
    let min_ratio = samples
        .iter()
        .map(|s| s.ratio.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(OnsetReport {
        x_tangential: x_t.to_vec(),
        i,
        floor,
        c_l: upto.checked_sub(1).map(|k| rhos[k]),
        grid_limited: upto == rhos.len(),
        samples,
        min_ratio,
    })
}
