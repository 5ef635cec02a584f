//! Gaussian tangential convolutions ∫ Γ′(x′ − z′, t) F(z′) dz′.

use statrs::function::gamma::gamma_ur;

use super::rules::{composite_gauss_legendre, gauss_legendre};
use super::{accuracy_error, QuadResult, QuadSpec};
use crate::error::{Error, Result};
use crate::model::norm;

const PI: f64 = std::f64::consts::PI;

/// Radius (in units of 2√t) beyond which the Gaussian weight is treated as tail.
pub const EFFECTIVE_RADIUS: f64 = 6.5;

/// Fixed rule for ∫ π^{−m/2} e^{−|u|²} F(u) du over the ball |u| ≤ radius.
#[derive(Debug, Clone)]
pub struct GaussianRule {
    m: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    radius: f64,
}

impl GaussianRule {
    /// Polar rule with `per_panel` Gauss points on each radial panel and `angular` points per circle.
    pub fn new(m: usize, per_panel: usize, angular: usize, radius: f64) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return Err(Error::Domain(format!(
                "Gaussian rule for dimension {m} not supported"
            )));
        }
        let mut edges: Vec<f64> = [0.0, 0.75, 1.5, 2.25, 3.0, 4.0, 5.0]
            .into_iter()
            .filter(|&e| e < radius)
            .collect();
        edges.push(radius);
        let (r, wr) = composite_gauss_legendre(&edges, per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match m {
            1 => {
                for (ri, wi) in r.iter().zip(&wr) {
                    let w = wi * (-ri * ri).exp() / PI.sqrt();
                    for s in [-1.0, 1.0] {
                        nodes.push(s * ri);
                        weights.push(w);
                    }
                }
            }
            2 => {
                let k = angular.max(4);
                for (ri, wi) in r.iter().zip(&wr) {
                    let w = 2.0 * ri * wi * (-ri * ri).exp() / k as f64;
                    for j in 0..k {
                        let th = 2.0 * PI * (j as f64 + 0.5) / k as f64;
                        nodes.push(ri * th.cos());
                        nodes.push(ri * th.sin());
                        weights.push(w);
                    }
                }
            }
            _ => {
                let k = (angular / 2).max(4);
                let (c, wc) = gauss_legendre(k);
                let kp = 2 * k;
                for (ri, wi) in r.iter().zip(&wr) {
                    let w = ri * ri * wi * (-ri * ri).exp() / PI.powf(1.5);
                    for (ct, wct) in c.iter().zip(&wc) {
                        let st = (1.0 - ct * ct).sqrt();
                        for j in 0..kp {
                            let ph = 2.0 * PI * (j as f64 + 0.5) / kp as f64;
                            nodes.push(ri * st * ph.cos());
                            nodes.push(ri * st * ph.sin());
                            nodes.push(ri * ct);
                            weights.push(w * wct * 2.0 * PI / kp as f64);
                        }
                    }
                }
            }
        }
        Ok(Self {
            m,
            nodes,
            weights,
            radius,
        })
    }

    /// Rule of refinement `level` (0 is the coarsest).
    pub fn level(m: usize, level: u32) -> Result<Self> {
        let s = 1usize << level;
        Self::new(m, 6 * s, 12 * s, EFFECTIVE_RADIUS)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Scaled nodes (z′ = x′ + 2√t·u) with weights, skipping nothing.
    pub fn points<'a>(
        &'a self,
        x: &'a [f64],
        t: f64,
    ) -> impl Iterator<Item = ([f64; 3], f64)> + 'a {
        let s = 2.0 * t.sqrt();
        let m = self.m;
        self.weights.iter().enumerate().map(move |(k, &w)| {
            let mut z = [0.0; 3];
            for d in 0..m {
                z[d] = x[d] + s * self.nodes[k * m + d];
            }
            (z, w)
        })
    }

    /// Applies the rule: Σ w_k F(x′ + 2√t u_k).
    pub fn apply<F: FnMut(&[f64]) -> f64>(&self, x: &[f64], t: f64, mut density: F) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for (z, w) in self.points(x, t) {
            acc += w * density(&z[..m]);
        }
        acc
    }

    /// Σ w_k F_k together with Σ w_k |F_k|.
    pub fn apply_with_abs<F: FnMut(&[f64]) -> f64>(
        &self,
        x: &[f64],
        t: f64,
        mut density: F,
    ) -> (f64, f64) {
        let m = self.m;
        let (mut acc, mut abs) = (0.0, 0.0);
        for (z, w) in self.points(x, t) {
            let v = w * density(&z[..m]);
            acc += v;
            abs += v.abs();
        }
        (acc, abs)
    }

    /// Gaussian mass outside the rule's ball.
    pub fn tail_mass(&self) -> f64 {
        gamma_ur(self.m as f64 / 2.0, self.radius * self.radius)
    }
}

/// ∫_{R^m} Γ′(x′ − z′, t) density(z′) dz′ by refinement of polar Gaussian rules.
///
/// The domain is truncated at radius 10·max(|x′|, √t); the neglected mass is bounded by the
/// Gaussian tail times the largest |density| sampled on rays beyond the effective radius.
pub fn convolve_tangential<F: Fn(&[f64]) -> f64>(
    x: &[f64],
    t: f64,
    density: F,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time {t} must be positive")));
    }
    let m = x.len();
    let s = 2.0 * t.sqrt();
    let spec_radius = 10.0 * norm(x).max(t.sqrt()) / s;
    let radius = spec_radius.min(EFFECTIVE_RADIUS);

    let mut sup = 0.0f64;
    let rays = match m {
        1 => 2,
        2 => 32,
        _ => 64,
    };
    let mut z = vec![0.0; m];
    let mut rr = radius;
    while rr <= spec_radius * (1.0 + 1e-12) {
        for k in 0..rays {
            let dir = ray(m, k, rays);
            for d in 0..m {
                z[d] = x[d] + s * rr * dir[d];
            }
            sup = sup.max(density(&z).abs());
        }
        if rr >= spec_radius {
            break;
        }
        rr = (rr * 1.5).min(spec_radius);
    }
    let tail = gamma_ur(m as f64 / 2.0, radius * radius) * sup;

    let mut evals = 0;
    let mut prev: Option<f64> = None;
    for level in 0..6u32 {
        let sc = 1usize << level;
        let rule = GaussianRule::new(m, 6 * sc, 12 * sc, radius)?;
        let (v, abs) = rule.apply_with_abs(x, t, &density);
        evals += rule.len();
        if let Some(p) = prev {
            let err = (v - p).abs() + tail;
            if (v - p).abs() <= spec.tolerance_for(v) || (v - p).abs() <= 100.0 * f64::EPSILON * abs
            {
                return Ok(QuadResult::new(v, err, evals));
            }
            if level == 5 {
                return Err(accuracy_error(QuadResult::new(v, err, evals)));
            }
        }
        prev = Some(v);
    }
    unreachable!()
}

fn ray(m: usize, k: usize, rays: usize) -> [f64; 3] {
    match m {
        1 => [if k.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0, 0.0],
        2 => {
            let th = 2.0 * PI * k as f64 / rays as f64;
            [th.cos(), th.sin(), 0.0]
        }
        _ => {
            // Fibonacci sphere
            let g = PI * (3.0 - 5.0f64.sqrt());
            let zc = 1.0 - 2.0 * (k as f64 + 0.5) / rays as f64;
            let rxy = (1.0 - zc * zc).sqrt();
            let ph = g * k as f64;
            [rxy * ph.cos(), rxy * ph.sin(), zc]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_density_has_unit_mass() {
        for m in 1..=3 {
            let x = vec![0.3; m];
            let r = convolve_tangential(&x, 0.7, |_| 1.0, &QuadSpec::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "m={m} {}", r.value);
        }
    }

    #[test]
    fn linear_density_first_moment() {
        let r = convolve_tangential(&[1.5, -2.0], 0.4, |z| z[0], &QuadSpec::default()).unwrap();
        assert!((r.value - 1.5).abs() < 1e-6);
    }

    #[test]
    fn quadratic_density_second_moment() {
        // E|z|² = |x|² + 2 m t
        let r = convolve_tangential(
            &[1.0, 2.0],
            0.25,
            |z| z[0] * z[0] + z[1] * z[1],
            &QuadSpec::default(),
        )
        .unwrap();
        assert!((r.value - (5.0 + 1.0)).abs() < 1e-8);
    }

    #[test]
    fn rule_weights_sum_to_truncated_mass() {
        for m in 1..=3 {
            let rule = GaussianRule::level(m, 1).unwrap();
            let s: f64 = rule.weights.iter().sum();
            assert!((s + rule.tail_mass() - 1.0).abs() < 1e-13, "m={m}");
        }
    }
}
