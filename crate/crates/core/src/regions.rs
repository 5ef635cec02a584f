//! Tangential boundary sets A_i1, A_i2, B_i1, B_i2 and the sign inequalities behind φ_i.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::norm2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    A1,
    A2,
    B1,
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    /// `None` when the point lies in none of the sets.
    pub kind: Option<RegionKind>,
    pub i: Option<usize>,
}

impl RegionLabel {
    pub fn none() -> Self {
        Self {
            kind: None,
            i: None,
        }
    }

    pub fn name(&self) -> String {
        match (self.kind, self.i) {
            (Some(k), Some(i)) => {
                let (s, j) = match k {
                    RegionKind::A1 => ("A", 1),
                    RegionKind::A2 => ("A", 2),
                    RegionKind::B1 => ("B", 1),
                    RegionKind::B2 => ("B", 2),
                };
                format!("{s}_{i}{j}")
            }
            _ => "none".into(),
        }
    }
}

/// Definition of B_i2 in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum B2Variant {
    /// 4√n|x′| < |x₂|, which no point satisfies.
    Printed,
    /// 4√n|x′ − x₂e₂| < |x₂| with |x₂| > 2.
    Corrected,
}

fn check_index(m: usize, i: usize) -> Result<()> {
    if i == 2 {
        return domain("index i = 2 is excluded from the boundary sets");
    }
    if i < 1 || i > m {
        return domain(format!("index {i} outside 1..={m}"));
    }
    Ok(())
}

/// Membership in (A_i1, A_i2, B_i1, B_i2) for x′ ∈ R^{n−1}, i 1-based, n = x′.len() + 1.
pub fn membership(x: &[f64], i: usize, variant: B2Variant) -> Result<[bool; 4]> {
    let m = x.len();
    if m < 2 {
        return domain("tangential dimension must be at least 2");
    }
    check_index(m, i)?;
    let n = (m + 1) as f64;
    let xi = x[i - 1];
    let x2 = x[1];
    let r2 = norm2(x);
    let in_a = 0.5 * xi.abs() <= x2.abs()
        && x2.abs() <= 2.0 * xi.abs()
        && r2 <= 2.0 * (xi * xi + x2 * x2)
        && xi.abs() > 2.0
        && x2.abs() > 2.0;
    let a1 = in_a && xi * x2 > 0.0;
    let a2 = in_a && xi * x2 < 0.0;
    let b1 = r2.sqrt() / (4.0 * n.sqrt()) > x2.abs() && xi.abs() > 2.0;
    let b2 = match variant {
        B2Variant::Printed => 4.0 * n.sqrt() * r2.sqrt() < x2.abs() && x2.abs() > 2.0,
        B2Variant::Corrected => {
            let off = (r2 - x2 * x2).max(0.0).sqrt();
            4.0 * n.sqrt() * off < x2.abs() && x2.abs() > 2.0
        }
    };
    Ok([a1, a2, b1, b2])
}

/// First matching set among A_i1, A_i2, B_i1, B_i2.
pub fn classify(x: &[f64], i: usize, variant: B2Variant) -> Result<RegionLabel> {
    let mem = membership(x, i, variant)?;
    let kinds = [
        RegionKind::A1,
        RegionKind::A2,
        RegionKind::B1,
        RegionKind::B2,
    ];
    Ok(mem
        .iter()
        .zip(kinds)
        .find(|(&b, _)| b)
        .map(|(_, k)| RegionLabel {
            kind: Some(k),
            i: Some(i),
        })
        .unwrap_or_else(RegionLabel::none))
}

/// The inequalities checked by [`verify_sign_inequalities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignInequality {
    /// (x_i−y_i)(x₂−y₂) ≥ |x′−y′|²/512 on A_i1
    ProductLowerA1,
    /// (x_i−y_i)(x₂−y₂) ≤ −|x′−y′|²/512 on A_i2
    ProductUpperA2,
    /// |x′−y′|² − n(x₂−y₂)² ≥ |x′−y′|²/64 on B_i1
    QuadraticLowerB1,
    /// |x′−y′|² − n(x₂−y₂)² ≤ −|x′−y′|²/64 on B_i2
    QuadraticUpperB2,
}

impl SignInequality {
    pub fn label(&self) -> &'static str {
        match self {
            SignInequality::ProductLowerA1 => "product lower bound on A_i1",
            SignInequality::ProductUpperA2 => "product upper bound on A_i2",
            SignInequality::QuadraticLowerB1 => "quadratic lower bound on B_i1",
            SignInequality::QuadraticUpperB2 => "quadratic upper bound on B_i2",
        }
    }

    /// Slack of the inequality; nonnegative iff it holds.
    pub fn slack(&self, x: &[f64], y: &[f64], i: usize) -> f64 {
        let n = (x.len() + 1) as f64;
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let di = x[i - 1] - y[i - 1];
        let dd2 = x[1] - y[1];
        match self {
            SignInequality::ProductLowerA1 => di * dd2 - d2 / 512.0,
            SignInequality::ProductUpperA2 => -d2 / 512.0 - di * dd2,
            SignInequality::QuadraticLowerB1 => d2 - n * dd2 * dd2 - d2 / 64.0,
            SignInequality::QuadraticUpperB2 => -d2 / 64.0 - (d2 - n * dd2 * dd2),
        }
    }

    fn region(&self) -> usize {
        match self {
            SignInequality::ProductLowerA1 => 0,
            SignInequality::ProductUpperA2 => 1,
            SignInequality::QuadraticLowerB1 => 2,
            SignInequality::QuadraticUpperB2 => 3,
        }
    }
}

/// Axis-aligned sampling box for x′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Patch {
    pub fn cube(m: usize, half_width: f64) -> Self {
        Self {
            lo: vec![-half_width; m],
            hi: vec![half_width; m],
        }
    }

    /// Default patch for an inequality: [2, 50] in x_i and ±[2, 50] in x₂ for the A sets, a
    /// centered cube of half-width 50 for the B sets.
    pub fn default_for(ineq: SignInequality, m: usize, i: usize) -> Self {
        let mut p = Self::cube(m, 50.0);
        match ineq {
            SignInequality::ProductLowerA1 => {
                p.lo[i - 1] = 2.0;
                p.lo[1] = 2.0;
            }
            SignInequality::ProductUpperA2 => {
                p.lo[i - 1] = 2.0;
                p.hi[1] = -2.0;
            }
            _ => {}
        }
        p
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality: SignInequality,
    pub name: String,
    pub region: String,
    pub variant: B2Variant,
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    /// min of slack / |x′ − y′|²
    pub min_relative_slack: f64,
    pub counterexample: Option<(Vec<f64>, Vec<f64>)>,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

const CHUNK: usize = 4096;

fn sample_box(rng: &mut ChaCha8Rng, p: &Patch, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = p.lo[k] + (p.hi[k] - p.lo[k]) * rng.gen::<f64>();
    }
}

fn sample_ball(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    loop {
        for o in out.iter_mut() {
            *o = 2.0 * rng.gen::<f64>() - 1.0;
        }
        if norm2(out) < 1.0 {
            return;
        }
    }
}

/// Draws `samples` pairs (x′, y′) with x′ uniform in `patch` restricted to the inequality's set
/// and y′ uniform in the unit ball, and evaluates the inequality at each pair.
pub fn check_inequality(
    ineq: SignInequality,
    n: usize,
    i: usize,
    variant: B2Variant,
    patch: &Patch,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let m = n - 1;
    check_index(m, i)?;
    if patch.lo.len() != m || patch.hi.len() != m {
        return domain("patch dimension must be n − 1");
    }
    let chunks = samples.div_ceil(CHUNK);
    let region = ineq.region();
    struct Part {
        violations: usize,
        min_slack: f64,
        min_rel: f64,
        first_bad: Option<(Vec<f64>, Vec<f64>)>,
    }
    let parts: Vec<Part> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Part> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut x = vec![0.0; m];
            let mut y = vec![0.0; m];
            let mut part = Part {
                violations: 0,
                min_slack: f64::INFINITY,
                min_rel: f64::INFINITY,
                first_bad: None,
            };
            let mut drawn = 0;
            let mut attempts = 0usize;
            while drawn < count {
                attempts += 1;
                if attempts > 10_000 * count.max(1) {
                    return domain("sampling patch does not meet the region");
                }
                sample_box(&mut rng, patch, &mut x);
                if !membership(&x, i, variant)?[region] {
                    continue;
                }
                sample_ball(&mut rng, &mut y);
                drawn += 1;
                let s = ineq.slack(&x, &y, i);
                let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                part.min_slack = part.min_slack.min(s);
                part.min_rel = part.min_rel.min(s / d2);
                if s < 0.0 {
                    part.violations += 1;
                    if part.first_bad.is_none() {
                        part.first_bad = Some((x.clone(), y.clone()));
                    }
                }
            }
            Ok(part)
        })
        .collect::<Result<_>>()?;
    let mut rep = InequalityReport {
        inequality: ineq,
        name: ineq.label().into(),
        region: RegionLabel {
            kind: Some(
                [
                    RegionKind::A1,
                    RegionKind::A2,
                    RegionKind::B1,
                    RegionKind::B2,
                ][region],
            ),
            i: Some(i),
        }
        .name(),
        variant,
        samples,
        violations: 0,
        min_slack: f64::INFINITY,
        min_relative_slack: f64::INFINITY,
        counterexample: None,
    };
    for p in parts {
        rep.violations += p.violations;
        rep.min_slack = rep.min_slack.min(p.min_slack);
        rep.min_relative_slack = rep.min_relative_slack.min(p.min_rel);
        if rep.counterexample.is_none() {
            rep.counterexample = p.first_bad;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignInequalityReport {
    pub n: usize,
    pub i: usize,
    pub reports: Vec<InequalityReport>,
}

impl SignInequalityReport {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds())
    }
}

/// The three inequalities on their default patches, plus the reversed one on the corrected B_i2.
pub fn verify_sign_inequalities(
    n: usize,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<SignInequalityReport> {
    if samples < 1 {
        return domain("samples must be at least 1");
    }
    let m = n - 1;
    let mut reports = Vec::new();
    for (k, ineq) in [
        SignInequality::ProductLowerA1,
        SignInequality::ProductUpperA2,
        SignInequality::QuadraticLowerB1,
        SignInequality::QuadraticUpperB2,
    ]
    .into_iter()
    .enumerate()
    {
        let patch = Patch::default_for(ineq, m, i);
        reports.push(check_inequality(
            ineq,
            n,
            i,
            B2Variant::Corrected,
            &patch,
            samples,
            seed.wrapping_add(k as u64 * 7919),
        )?);
    }
    Ok(SignInequalityReport { n, i, reports })
}

/// Number of points of a uniform sample of the cube [−half_width, half_width]^{n−1} in the printed B_i2.
pub fn count_printed_b2(
    n: usize,
    i: usize,
    samples: usize,
    half_width: f64,
    seed: u64,
) -> Result<usize> {
    let m = n - 1;
    check_index(m, i)?;
    let patch = Patch::cube(m, half_width);
    let chunks = samples.div_ceil(CHUNK);
    let counts: Vec<usize> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let mut x = vec![0.0; m];
            let mut hits = 0;
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                sample_box(&mut rng, &patch, &mut x);
                if membership(&x, i, B2Variant::Printed)
                    .map(|b| b[3])
                    .unwrap_or(false)
                {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    Ok(counts.iter().sum())
}
