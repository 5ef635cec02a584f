use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_coefficient: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub exponent_stderr: f64,
    /// 95% confidence interval of the exponent.
    pub ci95: (f64, f64),
    pub window: (f64, f64),
}

pub const MIN_R_SQUARED: f64 = 0.99;

/// Least squares fit of log|v| = log C + p log s with the quality gates applied.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    let fit = fit_log_log(samples)?;
    if !(fit.r_squared >= MIN_R_SQUARED) {
        return Err(Error::Fit(format!(
            "r² = {:.6} below {MIN_R_SQUARED} (exponent {:.4})",
            fit.r_squared, fit.exponent
        )));
    }
    Ok(fit)
}

/// Log-log least squares without the r² gate; span, count and sign checks still apply.
pub fn fit_log_log(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::Fit(format!("{n} samples, need at least 4")));
    }
    if samples
        .iter()
        .any(|&(s, v)| !(s > 0.0) || !s.is_finite() || !v.is_finite() || v == 0.0)
    {
        return Err(Error::Fit("samples need s > 0 and finite nonzero v".into()));
    }
    let positive = samples[0].1 > 0.0;
    if samples.iter().any(|&(_, v)| (v > 0.0) != positive) {
        return Err(Error::Fit("sign change in the sampled values".into()));
    }
    let smin = samples.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let smax = samples.iter().map(|p| p.0).fold(0.0, f64::max);
    if smax < 10.0 * smin * (1.0 - 1e-12) {
        return Err(Error::Fit(format!(
            "samples span [{smin:e}, {smax:e}], less than one decade"
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|p| p.1.abs().ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let p = sxy / sxx;
    let c = my - p * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c - p * x).powi(2))
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(1.96);
    Ok(PowerLawFit {
        exponent: p,
        log_coefficient: c,
        r_squared: r2,
        n_points: n,
        exponent_stderr: se,
        ci95: (p - q * se, p + q * se),
        window: (smin, smax),
    })
}

/// `count` logarithmically spaced points in [lo, hi].
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Default (t − ½) window: 9 points in [1e−4, 1e−2].
pub fn default_window() -> Vec<f64> {
    log_space(1e-4, 1e-2, 9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = log_space(1e-3, 1.0, 9)
            .into_iter()
            .map(|s| (s, 3.0 * s.powf(-0.1)))
            .collect();
        let f = fit_power_law(&s).unwrap();
        assert!((f.exponent + 0.1).abs() < 1e-13);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.log_coefficient - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_power_law() {
        let s: Vec<(f64, f64)> = log_space(1e-3, 10.0, 17)
            .into_iter()
            .map(|s| (s, s * s * (1.0 + 0.001 * s.ln().sin())))
            .collect();
        let f = fit_power_law(&s).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_samples() {
        let alt: Vec<(f64, f64)> = log_space(1e-2, 1.0, 6)
            .into_iter()
            .enumerate()
            .map(|(k, s)| (s, if k % 2 == 0 { s } else { -s }))
            .collect();
        assert!(fit_power_law(&alt).is_err());
        let few = vec![(1.0, 1.0), (10.0, 2.0), (100.0, 3.0)];
        assert!(fit_power_law(&few).is_err());
        let narrow: Vec<(f64, f64)> = log_space(1.0, 5.0, 6).into_iter().map(|s| (s, s)).collect();
        assert!(fit_power_law(&narrow).is_err());
        let noisy: Vec<(f64, f64)> = log_space(1.0, 100.0, 8)
            .into_iter()
            .enumerate()
            .map(|(k, s)| (s, if k % 2 == 0 { 1.0 } else { 30.0 }))
            .collect();
        assert!(matches!(fit_power_law(&noisy), Err(Error::Fit(_))));
    }
}
