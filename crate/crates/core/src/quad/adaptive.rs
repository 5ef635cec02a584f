//! Globally adaptive Gauss–Kronrod integration and endpoint desingularization.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{WG7, WGK15, XGK15};
use super::{accuracy_error, QuadResult, QuadSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK15[7];
    let mut rg = fc * WG7[3];
    let mut rabs = rk.abs();
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK15[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv[j] = (f1, f2);
        rk += WGK15[j] * (f1 + f2);
        rabs += WGK15[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG7[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut rasc = WGK15[7] * (fc - mean).abs();
    for j in 0..7 {
        rasc += WGK15[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let hh = h.abs();
    let value = rk * h;
    let abs = rabs * hh;
    let asc = rasc * hh;
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel {
        a,
        b,
        value,
        error: err,
        abs,
    }
}

/// Adaptive integration over [a, b] with an initial partition at `breaks`.
/// Returns the best estimate and whether the tolerance was met.
pub(crate) fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> (QuadResult, bool) {
    if a == b {
        return (QuadResult::zero(), true);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi && p.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for e in edges.windows(2) {
        if e[1] > e[0] {
            heap.push(gk15(f, e[0], e[1]));
            evals += 15;
        }
    }
    let total = |heap: &BinaryHeap<Panel>| {
        let mut v: Vec<&Panel> = heap.iter().collect();
        v.sort_by(|p, q| p.a.total_cmp(&q.a));
        v.iter()
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.error))
    };
    let (mut value, mut error, mut abs) = heap.iter().fold((0.0, 0.0, 0.0), |acc, p| {
        (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs)
    });
    let mut panels = heap.len();
    loop {
        let tol = spec.tolerance_for(value);
        let floor = 100.0 * f64::EPSILON * abs;
        if error <= tol.max(floor) || panels >= spec.max_subdivisions {
            let ok = error <= tol.max(floor);
            let (v, e) = total(&heap);
            return (
                QuadResult::new(sign * v, e, evals),
                ok || e <= spec.tolerance_for(v).max(floor),
            );
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(worst);
            let (v, e) = total(&heap);
            return (QuadResult::new(sign * v, e, evals), false);
        }
        let l = gk15(f, worst.a, m);
        let r = gk15(f, m, worst.b);
        evals += 30;
        panels += 1;
        value += l.value + r.value - worst.value;
        abs += l.abs + r.abs - worst.abs;
        error = heap.iter().map(|p| p.error).sum::<f64>() + l.error + r.error;
        heap.push(l);
        heap.push(r);
    }
}

/// Adaptive Gauss–Kronrod integral of `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult> {
    integrate_breaks(f, a, b, &[], spec)
}

pub fn integrate_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let (r, ok) = adapt(&f, a, b, breaks, spec);
    if ok {
        Ok(r)
    } else {
        Err(accuracy_error(r))
    }
}

/// Which endpoint carries the power singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

/// Integral of a function with an integrable power singularity |s − e|^σ at one endpoint e.
///
/// The integrand receives `(s, d)` where `d = |s − e|` is computed without cancellation, so
/// singular factors must be formed from `d`. The substitution u = d^((1+σ)/g) with
/// g = `spec.grading_strength` removes the singularity.
pub fn integrate_singular_1d<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    endpoint_exponent: f64,
    at: Endpoint,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    integrate_singular_breaks(f, a, b, endpoint_exponent, at, &[], spec)
}

/// As [`integrate_singular_1d`] with extra breakpoints given as distances from the singular endpoint.
pub fn integrate_singular_breaks<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    endpoint_exponent: f64,
    at: Endpoint,
    offset_breaks: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let (r, ok) = singular_adapt(&f, a, b, endpoint_exponent, at, offset_breaks, spec)?;
    if ok {
        Ok(r)
    } else {
        Err(accuracy_error(r))
    }
}

pub(crate) fn singular_adapt<F: Fn(f64, f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    sigma: f64,
    at: Endpoint,
    offset_breaks: &[f64],
    spec: &QuadSpec,
) -> Result<(QuadResult, bool)> {
    if !(sigma > -1.0 && sigma <= 0.0) {
        return Err(Error::Domain(format!(
            "endpoint exponent {sigma} must lie in (-1, 0]"
        )));
    }
    if !(b >= a) {
        return Err(Error::Domain(format!("interval [{a}, {b}] is reversed")));
    }
    let len = b - a;
    if len == 0.0 {
        return Ok((QuadResult::zero(), true));
    }
    let g = spec.grading_strength;
    let p = (1.0 + sigma) / g;
    let point = |d: f64| match at {
        Endpoint::Lower => a + d,
        Endpoint::Upper => b - d,
    };
    // d = u^(1/p), ds = (1/p) u^(1/p - 1) du
    let q = 1.0 / p;
    let h = move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let d = u.powf(q).max(f64::MIN_POSITIVE);
        let jac = q * d / u;
        let v = f(point(d), d);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    let umax = len.powf(p);
    let ubreaks: Vec<f64> = offset_breaks
        .iter()
        .filter(|&&d| d > 0.0 && d < len)
        .map(|&d| d.powf(p))
        .collect();
    Ok(adapt(&h, 0.0, umax, &ubreaks, spec))
}
