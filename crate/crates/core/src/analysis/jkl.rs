//! The remainder J_kl between a Gaussian-smoothed Newtonian derivative and the derivative itself.

use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, PowerLawFit};
use crate::error::{domain, Result};
use crate::kernels::newton_deriv;
use crate::model::HalfSpacePoint;
use crate::quad::{convolve_tangential, QuadSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JklReport {
    pub point: Vec<f64>,
    pub k: Vec<usize>,
    pub l: usize,
    pub samples: Vec<(f64, f64)>,
    pub fit: PowerLawFit,
    /// max |J| / t^{1/2} over the samples.
    pub c_empirical: f64,
}

/// D^k_{x′}D^l_{x_n} ∫ Γ′(x′ − z′, t) N(z′, x_n) dz′ − D^k D^l N(x).
pub fn jkl(x: &HalfSpacePoint, t: f64, k: &[usize], l: usize, spec: &QuadSpec) -> Result<f64> {
    let m = x.tangential.len();
    if k.len() != m {
        return domain("tangential multi-index length must be n − 1");
    }
    if k.iter().sum::<usize>() + l > 2 {
        return domain("J_kl is implemented for k + l ≤ 2");
    }
    if !(x.normal > 0.0) {
        return domain("J_kl needs x_n > 0");
    }
    let mut idx = k.to_vec();
    idx.push(l);
    let x_n = x.normal;
    let conv = convolve_tangential(
        &x.tangential,
        t,
        |z| {
            let mut p = z.to_vec();
            p.push(x_n);
            newton_deriv(&p, &idx).unwrap_or(f64::NAN)
        },
        spec,
    )?;
    Ok(conv.value - newton_deriv(&x.to_vec(), &idx)?)
}

/// Fits the t-exponent of |J_kl| over `t_list`.
pub fn verify_jkl(
    x: &HalfSpacePoint,
    t_list: &[f64],
    k: &[usize],
    l: usize,
    spec: &QuadSpec,
) -> Result<JklReport> {
    let r = x.tangential_norm();
    for &t in t_list {
        if r < 1f64.max(t.sqrt()) {
            return domain(format!("|x′| = {r} violates |x′| ≥ max(1, √t) at t = {t}"));
        }
    }
    let samples: Vec<(f64, f64)> = t_list
        .iter()
        .map(|&t| jkl(x, t, k, l, spec).map(|j| (t, j)))
        .collect::<Result<_>>()?;
    let fit = fit_power_law(&samples)?;
    let c_empirical = samples
        .iter()
        .map(|&(t, j)| j.abs() / t.sqrt())
        .fold(0.0, f64::max);
    Ok(JklReport {
        point: x.to_vec(),
        k: k.to_vec(),
        l,
        samples,
        fit,
        c_empirical,
    })
}

/// All (k, l) with k a tangential multi-index of length m and |k| + l ≤ 2.
pub fn multi_indices(m: usize) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for l in 0..=2usize {
        let budget = 2 - l;
        let mut stack = vec![(Vec::new(), 0usize)];
        while let Some((v, s)) = stack.pop() {
            if v.len() == m {
                out.push((v, l));
                continue;
            }
            for o in (0..=(budget - s)).rev() {
                let mut w: Vec<usize> = v.clone();
                w.push(o);
                stack.push((w, s + o));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_enumeration() {
        assert_eq!(multi_indices(2).len(), 10);
        assert!(multi_indices(2)
            .iter()
            .all(|(k, l)| k.iter().sum::<usize>() + l <= 2));
    }
}
