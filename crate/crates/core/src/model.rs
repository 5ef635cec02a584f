//! Model parameters and half-space points.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 0.9,
            beta: 0.4,
            a: 1.0,
        }
    }
}

impl ModelParams {
    pub fn new(n: usize, alpha: f64, beta: f64, a: f64) -> Result<Self> {
        let p = Self { n, alpha, beta, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return domain(format!("dimension n = {} must be at least 3", self.n));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return domain(format!("beta = {} must lie in (0, 1)", self.beta));
        }
        if !(self.a > 0.0) {
            return domain(format!("amplitude a = {} must be positive", self.a));
        }
        Ok(())
    }

    /// True when the force has finite energy pairing, i.e. beta < 1/2.
    pub fn weak_solution(&self) -> bool {
        self.beta < 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub tangential: Vec<f64>,
    pub normal: f64,
}

impl HalfSpacePoint {
    pub fn new(tangential: Vec<f64>, normal: f64) -> Result<Self> {
        if !(normal >= 0.0) {
            return domain(format!("normal coordinate {normal} must be nonnegative"));
        }
        Ok(Self { tangential, normal })
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match x.split_last() {
            Some((&xn, xt)) => Self::new(xt.to_vec(), xn),
            None => domain("empty point"),
        }
    }

    pub fn dim(&self) -> usize {
        self.tangential.len() + 1
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return domain(format!("point has dimension {}, expected {n}", self.dim()));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.tangential.clone();
        v.push(self.normal);
        v
    }

    /// Full coordinates of the reflected point (x′, −x_n).
    pub fn reflected(&self) -> Vec<f64> {
        let mut v = self.tangential.clone();
        v.push(-self.normal);
        v
    }

    pub fn tangential_norm(&self) -> f64 {
        norm(&self.tangential)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub point: HalfSpacePoint,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(point: HalfSpacePoint, t: f64) -> Self {
        Self { point, t }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>()
}
