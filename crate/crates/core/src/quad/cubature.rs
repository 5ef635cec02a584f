//! Box cubature: adaptive tensor Gauss–Kronrod for d ≤ 3, Monte Carlo above.

use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rules::kronrod15_full;
use super::{accuracy_error, QuadResult, QuadSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    error: f64,
    split_dim: usize,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.error.total_cmp(&o.error).is_eq()
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn tensor_cell<F: Fn(&[f64]) -> f64>(f: &F, lo: Vec<f64>, hi: Vec<f64>) -> Cell {
    let (x, wk, wg) = kronrod15_full();
    let d = lo.len();
    let total = 15usize.pow(d as u32);
    let half: Vec<f64> = (0..d).map(|k| 0.5 * (hi[k] - lo[k])).collect();
    let mid: Vec<f64> = (0..d).map(|k| 0.5 * (hi[k] + lo[k])).collect();
    let vol: f64 = half.iter().product();
    let mut pt = vec![0.0; d];
    let mut idx = vec![0usize; d];
    let mut kron = 0.0;
    // per-dimension estimate with Gauss weights in that dimension only
    let mut mixed = vec![0.0; d];
    for lin in 0..total {
        let mut r = lin;
        for k in 0..d {
            idx[k] = r % 15;
            r /= 15;
            pt[k] = mid[k] + half[k] * x[idx[k]];
        }
        let v = f(&pt);
        let wprod: f64 = idx.iter().map(|&i| wk[i]).product();
        kron += wprod * v;
        for k in 0..d {
            let wk_k = wk[idx[k]];
            if wg[idx[k]] != 0.0 || wk_k != 0.0 {
                mixed[k] += wprod / wk_k * wg[idx[k]] * v;
            }
        }
    }
    let value = kron * vol;
    let mut error = 0.0;
    let mut split_dim = 0;
    let mut worst = -1.0;
    for (k, &m) in mixed.iter().enumerate().take(d) {
        let e = ((kron - m) * vol).abs();
        error += e;
        if e > worst {
            worst = e;
            split_dim = k;
        }
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    error = error.max(50.0 * f64::EPSILON * value.abs());
    Cell {
        lo,
        hi,
        value,
        error,
        split_dim,
    }
}

/// Integral of `f` over the box given by `(lo, hi)` pairs.
pub fn integrate_nd<F>(f: F, bounds: &[(f64, f64)], spec: &QuadSpec) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = bounds.len();
    if d == 0 {
        return Err(Error::Domain("empty box".into()));
    }
    if bounds.iter().any(|&(a, b)| !(b > a)) {
        return Err(Error::Domain("box edges must satisfy lo < hi".into()));
    }
    if d > 3 {
        return monte_carlo(&f, bounds, spec);
    }
    let lo: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let hi: Vec<f64> = bounds.iter().map(|b| b.1).collect();
    let per_cell = 15usize.pow(d as u32);
    let mut heap = BinaryHeap::new();
    heap.push(tensor_cell(&f, lo, hi));
    let mut evals = per_cell;
    let mut cells = 1;
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |a, c| (a.0 + c.value, a.1 + c.error));
        let done = error <= spec.tolerance_for(value);
        if done || cells >= spec.max_subdivisions {
            let mut all: Vec<&Cell> = heap.iter().collect();
            all.sort_by(|p, q| {
                p.lo.iter()
                    .zip(&q.lo)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| !o.is_eq())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let value: f64 = all.iter().map(|c| c.value).sum();
            let r = QuadResult::new(value, error, evals);
            return if done { Ok(r) } else { Err(accuracy_error(r)) };
        }
        let c = heap.pop().expect("nonempty");
        let k = c.split_dim;
        let m = 0.5 * (c.lo[k] + c.hi[k]);
        let mut hi1 = c.hi.clone();
        hi1[k] = m;
        let mut lo2 = c.lo.clone();
        lo2[k] = m;
        heap.push(tensor_cell(&f, c.lo, hi1));
        heap.push(tensor_cell(&f, lo2, c.hi));
        evals += 2 * per_cell;
        cells += 1;
    }
}

const MC_CHUNK: usize = 1 << 15;

fn monte_carlo<F>(f: &F, bounds: &[(f64, f64)], spec: &QuadSpec) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = spec.mc_samples.max(2);
    let vol: f64 = bounds.iter().map(|(a, b)| b - a).product();
    let chunks = n.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut pt = vec![0.0; bounds.len()];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for (p, &(a, b)) in pt.iter_mut().zip(bounds) {
                    *p = a + (b - a) * rng.gen::<f64>();
                }
                let v = f(&pt);
                s += v;
                s2 += v * v;
            }
            (s, s2, count)
        })
        .collect();
    let (s, s2) = partial
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok(QuadResult::new(vol * mean, vol * (var / nf).sqrt(), n))
}
