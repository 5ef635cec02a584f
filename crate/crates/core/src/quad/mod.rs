//! Adaptive and fixed quadrature used throughout the crate.

mod adaptive;
mod cubature;
mod gaussian;
pub mod rules;

use serde::{Deserialize, Serialize};

pub use adaptive::{
    integrate, integrate_breaks, integrate_singular_1d, integrate_singular_breaks, Endpoint,
};
pub use cubature::integrate_nd;
pub use gaussian::{convolve_tangential, GaussianRule, EFFECTIVE_RADIUS};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub grading_strength: f64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_subdivisions: 2000,
            grading_strength: 1.0,
            mc_samples: 1_000_000,
            seed: 20240501,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        if !(self.grading_strength >= 1.0) {
            return Err(Error::Domain("grading_strength must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn new(value: f64, error_estimate: f64, evaluations: usize) -> Self {
        Self {
            value,
            error_estimate,
            evaluations,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0)
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(
            c * self.value,
            c.abs() * self.error_estimate,
            self.evaluations,
        )
    }
}

impl std::ops::Add for QuadResult {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::new(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
        )
    }
}

pub(crate) fn accuracy_error(r: QuadResult) -> Error {
    Error::Accuracy {
        value: r.value,
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
    }
}
