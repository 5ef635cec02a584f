//! Hypothesis arithmetic for the singular-derivative, pressure and Navier-Stokes parameter choices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Less,
    LessEq,
}

/// `lhs < rhs` or `lhs ≤ rhs`; `margin = rhs − lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub margin: f64,
    pub holds: bool,
}

impl Inequality {
    pub fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            relation: Relation::Less,
            margin,
            holds: margin > 0.0,
        }
    }

    pub fn less_eq(name: &str, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            relation: Relation::LessEq,
            margin,
            holds: margin >= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionGroup {
    pub name: String,
    pub inequalities: Vec<Inequality>,
    pub holds: bool,
}

impl ConditionGroup {
    fn new(name: &str, inequalities: Vec<Inequality>) -> Self {
        let holds = inequalities.iter().all(|i| i.holds);
        Self {
            name: name.into(),
            inequalities,
            holds,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}

/// Parameter choice for the perturbative Navier-Stokes construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavierStokesChoice {
    pub s: f64,
    pub r: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub r0: f64,
}

impl NavierStokesChoice {
    /// s = 4.5 (clamped into the admissible range for n ≠ 3), r = 1.01·n·s(n+2)/(n+2−s),
    /// ε = b/(2n), δ = (1+n)ε/2 with b = (n+2)/(2r), r₀ = 6/(δ−ε).
    pub fn default_for(n: usize) -> Self {
        let nf = n as f64;
        let lo = ((nf + 2.0) / 2.0).max(4.0);
        let hi = nf + 2.0;
        let s = if lo < 4.5 && 4.5 < hi {
            4.5
        } else {
            0.5 * (lo + hi)
        };
        let r = 1.01 * nf * s * (nf + 2.0) / (nf + 2.0 - s);
        let b = (nf + 2.0) / (2.0 * r);
        let epsilon = b / (2.0 * nf);
        let delta = (1.0 + nf) * epsilon / 2.0;
        let r0 = 2.0 * 3.0 / (delta - epsilon);
        Self {
            s,
            r,
            epsilon,
            delta,
            r0,
        }
    }

    pub fn alpha(&self, n: usize) -> f64 {
        1.0 - (n as f64 + 2.0) / (4.0 * self.r) + self.delta / 2.0
    }

    pub fn beta(&self, n: usize) -> f64 {
        (n as f64 + 2.0) / (2.0 * self.r) - self.epsilon
    }
}

/// Integrability exponents entering the theorem hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionInputs {
    pub q: f64,
    pub p: f64,
    pub q1: f64,
    pub p1: f64,
    pub navier_stokes: NavierStokesChoice,
}

impl ConditionInputs {
    pub fn default_for(n: usize) -> Self {
        Self {
            q: 16.0,
            p: 4.0,
            q1: 1.05,
            p1: 2.0,
            navier_stokes: NavierStokesChoice::default_for(n),
        }
    }
}

/// Outcome of a randomized search for members of C ∩ D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub name: String,
    pub preconditions_hold: bool,
    pub samples: usize,
    pub in_c: usize,
    pub in_d: usize,
    pub in_both: usize,
}

impl DisjointnessReport {
    pub fn disjoint(&self) -> bool {
        self.in_both == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub groups: Vec<ConditionGroup>,
    pub navier_stokes_alpha: f64,
    pub navier_stokes_beta: f64,
    pub disjointness: Vec<DisjointnessReport>,
}

impl ConditionsReport {
    pub fn group(&self, name: &str) -> Option<&ConditionGroup> {
        self.groups.iter().find(|g| g.name == name)
    }
}

pub const DISJOINTNESS_SAMPLES: usize = 10_000;
pub const DISJOINTNESS_SEED: u64 = 0x005e_edcd;

/// Energy class: 0 < α < 1, 0 < β < ½, q₁ ∈ [1, 1/α), p₁ ∈ [1, 1/β).
pub fn energy_class(alpha: f64, beta: f64, q1: f64, p1: f64) -> ConditionGroup {
    ConditionGroup::new(
        "energy-class",
        vec![
            Inequality::less("0 < alpha", 0.0, alpha),
            Inequality::less("alpha < 1", alpha, 1.0),
            Inequality::less("0 < beta", 0.0, beta),
            Inequality::less("beta < 1/2", beta, 0.5),
            Inequality::less_eq("1 <= q1", 1.0, q1),
            Inequality::less("q1 < 1/alpha", q1, 1.0 / alpha),
            Inequality::less_eq("1 <= p1", 1.0, p1),
            Inequality::less("p1 < 1/beta", p1, 1.0 / beta),
        ],
    )
}

/// q > 6 and 2 + 3/q < 2α + β.
pub fn singular_normal_derivative(alpha: f64, beta: f64, q: f64) -> ConditionGroup {
    ConditionGroup::new(
        "singular-normal-derivative",
        vec![
            Inequality::less("6 < q", 6.0, q),
            Inequality::less(
                "2 + 3/q < 2 alpha + beta",
                2.0 + 3.0 / q,
                2.0 * alpha + beta,
            ),
        ],
    )
}

/// p > 2n/(n−1), q > 1, β > n/((n−1)p), 2α + nβ < 2/q + n/p + 1.
pub fn pressure_bounded(n: usize, alpha: f64, beta: f64, p: f64, q: f64) -> ConditionGroup {
    let nf = n as f64;
    ConditionGroup::new(
        "pressure-bounded",
        vec![
            Inequality::less("2n/(n-1) < p", 2.0 * nf / (nf - 1.0), p),
            Inequality::less("1 < q", 1.0, q),
            Inequality::less("0 < beta", 0.0, beta),
            Inequality::less("beta < 1/2", beta, 0.5),
            Inequality::less("n/((n-1)p) < beta", nf / ((nf - 1.0) * p), beta),
            Inequality::less(
                "2 alpha + n beta < 2/q + n/p + 1",
                2.0 * alpha + nf * beta,
                2.0 / q + nf / p + 1.0,
            ),
        ],
    )
}

/// q > 1 and 1 + 2/q < 2α + β.
pub fn pressure_unbounded(alpha: f64, beta: f64, q: f64) -> ConditionGroup {
    ConditionGroup::new(
        "pressure-unbounded",
        vec![
            Inequality::less("1 < q", 1.0, q),
            Inequality::less(
                "1 + 2/q < 2 alpha + beta",
                1.0 + 2.0 / q,
                2.0 * alpha + beta,
            ),
        ],
    )
}

/// ε₀ = 3 − 2α − β ∈ (0, 2).
pub fn holder_range(alpha: f64, beta: f64) -> ConditionGroup {
    let e0 = 3.0 - 2.0 * alpha - beta;
    ConditionGroup::new(
        "holder-exponent",
        vec![
            Inequality::less("0 < eps0", 0.0, e0),
            Inequality::less("eps0 < 2", e0, 2.0),
        ],
    )
}

/// Constraints on (s, r, ε, δ, r₀) and the derived (α, β).
pub fn navier_stokes(n: usize, c: &NavierStokesChoice) -> ConditionGroup {
    let nf = n as f64;
    let alpha = c.alpha(n);
    let beta = c.beta(n);
    let b = (nf + 2.0) / (2.0 * c.r);
    ConditionGroup::new(
        "navier-stokes",
        vec![
            Inequality::less("max((n+2)/2, 4) < s", ((nf + 2.0) / 2.0).max(4.0), c.s),
            Inequality::less("s < n+2", c.s, nf + 2.0),
            Inequality::less(
                "s(n+2)/(n+2-s) < r",
                c.s * (nf + 2.0) / (nf + 2.0 - c.s),
                c.r,
            ),
            Inequality::less("2s < r", 2.0 * c.s, c.r),
            Inequality::less(
                "2 + (n+2)/r < 1 + (n+2)/s",
                2.0 + (nf + 2.0) / c.r,
                1.0 + (nf + 2.0) / c.s,
            ),
            Inequality::less(
                "1 + (n+2)/s < 2 + n/2",
                1.0 + (nf + 2.0) / c.s,
                2.0 + nf / 2.0,
            ),
            Inequality::less("0 < epsilon", 0.0, c.epsilon),
            Inequality::less("epsilon < delta", c.epsilon, c.delta),
            Inequality::less("delta < n epsilon", c.delta, nf * c.epsilon),
            Inequality::less("n epsilon < (n+2)/(2r)", nf * c.epsilon, b),
            Inequality::less("1 < r0", 1.0, c.r0),
            Inequality::less("3/r0 < delta - epsilon", 3.0 / c.r0, c.delta - c.epsilon),
            Inequality::less("beta < 1/2", beta, 0.5),
            Inequality::less(
                "2 + 3/r0 < 2 alpha + beta",
                2.0 + 3.0 / c.r0,
                2.0 * alpha + beta,
            ),
            Inequality::less(
                "2 alpha + n beta < 2 + (n+2)/r",
                2.0 * alpha + nf * beta,
                2.0 + (nf + 2.0) / c.r,
            ),
        ],
    )
}

fn search<C, D>(
    name: &str,
    pre: bool,
    samples: usize,
    seed: u64,
    in_c: C,
    in_d: D,
) -> DisjointnessReport
where
    C: Fn(f64, f64) -> bool,
    D: Fn(f64, f64) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut nc, mut nd, mut nb) = (0, 0, 0);
    for _ in 0..samples {
        let a: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let b: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let (c, d) = (in_c(a, b), in_d(a, b));
        nc += c as usize;
        nd += d as usize;
        nb += (c && d) as usize;
    }
    DisjointnessReport {
        name: name.into(),
        preconditions_hold: pre,
        samples,
        in_c: nc,
        in_d: nd,
        in_both: nb,
    }
}

/// C = {2α + nβ < 2/q + n/p + 1}, D = {β > n/((n−1)p), 1 + 2/q < 2α + β} over (0, 1)².
pub fn search_pressure_compatibility(
    n: usize,
    p: f64,
    q: f64,
    samples: usize,
    seed: u64,
) -> DisjointnessReport {
    let nf = n as f64;
    let pre = p > 2.0 * nf / (nf - 1.0) && p.is_finite() && q > 1.0 && q.is_finite();
    search(
        "pressure-bound-vs-blowup",
        pre,
        samples,
        seed,
        |a, b| 2.0 * a + nf * b < 2.0 / q + nf / p + 1.0,
        |a, b| b > nf / ((nf - 1.0) * p) && 1.0 + 2.0 / q < 2.0 * a + b,
    )
}

/// C = {1/q₁ − 1/q + n/(2p₁) − n/(2p) ≤ ½, α < 1/q₁, β < 1/p₁}, D = {½ + 1/q < α + β/2}.
pub fn search_lebesgue_compatibility(
    n: usize,
    p: f64,
    q: f64,
    p1: f64,
    q1: f64,
    samples: usize,
    seed: u64,
) -> DisjointnessReport {
    let nf = n as f64;
    let pre = 1.0 < p1 && p1 < (nf - 1.0) / nf * p && 1.0 < q1 && q1 < q && q.is_finite();
    let scaling = 1.0 / q1 - 1.0 / q + nf / (2.0 * p1) - nf / (2.0 * p) <= 0.5;
    search(
        "lebesgue-bound-vs-pointwise",
        pre,
        samples,
        seed,
        |a, b| scaling && a < 1.0 / q1 && b < 1.0 / p1,
        |a, b| 0.5 + 1.0 / q < a + b / 2.0,
    )
}

/// Evaluates every hypothesis group at `params` and at the Navier-Stokes choice in `inputs`.
pub fn check_conditions(params: &ModelParams, inputs: &ConditionInputs) -> ConditionsReport {
    let (n, a, b) = (params.n, params.alpha, params.beta);
    let ns = &inputs.navier_stokes;
    let groups = vec![
        energy_class(a, b, inputs.q1, inputs.p1),
        singular_normal_derivative(a, b, inputs.q),
        pressure_bounded(n, a, b, inputs.p, inputs.q),
        pressure_unbounded(a, b, inputs.q),
        holder_range(a, b),
        navier_stokes(n, ns),
    ];
    let disjointness = vec![
        search_pressure_compatibility(
            n,
            inputs.p,
            inputs.q,
            DISJOINTNESS_SAMPLES,
            DISJOINTNESS_SEED,
        ),
        search_lebesgue_compatibility(
            n,
            inputs.p,
            inputs.q,
            inputs.p1,
            inputs.q1,
            DISJOINTNESS_SAMPLES,
            DISJOINTNESS_SEED + 1,
        ),
    ];
    ConditionsReport {
        n,
        alpha: a,
        beta: b,
        groups,
        navier_stokes_alpha: ns.alpha(n),
        navier_stokes_beta: ns.beta(n),
        disjointness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_hypotheses() {
        let p = ModelParams::default();
        let r = check_conditions(&p, &ConditionInputs::default_for(3));
        let snd = r.group("singular-normal-derivative").unwrap();
        assert!(snd.holds);
        let m = snd.get("2 + 3/q < 2 alpha + beta").unwrap();
        assert!((m.lhs - 2.1875).abs() < 1e-15);
        assert!((m.margin - 0.0125).abs() < 1e-12);
        assert!(r.group("energy-class").unwrap().holds);
        assert!(r.group("pressure-unbounded").unwrap().holds);
        assert!(!r.group("pressure-bounded").unwrap().holds);
        assert!(r.group("holder-exponent").unwrap().holds);
        assert!(r.group("navier-stokes").unwrap().holds);
        assert!(r
            .disjointness
            .iter()
            .all(|d| d.preconditions_hold && d.disjoint()));
    }

    #[test]
    fn navier_stokes_defaults() {
        let c = NavierStokesChoice::default_for(3);
        assert_eq!(c.s, 4.5);
        assert!((c.r - 136.35).abs() < 1e-12);
        let (a, b) = (c.alpha(3), c.beta(3));
        assert!(b < 0.5 && b > 0.0 && a < 1.0);
        assert!(2.0 + 3.0 / c.r0 < 2.0 * a + b);
        assert!(2.0 * a + 3.0 * b < 2.0 + 5.0 / c.r);
    }

    #[test]
    fn navier_stokes_upper_bound_needs_three_dims() {
        // 2α + nβ − 2 − (n+2)/r = (n−3)b + δ − nε with b = (n+2)/(2r) > nε
        for n in 4..=6 {
            let g = navier_stokes(n, &NavierStokesChoice::default_for(n));
            for i in &g.inequalities {
                let expect = i.name != "2 alpha + n beta < 2 + (n+2)/r";
                assert_eq!(i.holds, expect, "n = {n}: {}", i.name);
            }
        }
    }

    #[test]
    fn margins_flip_at_boundary() {
        // 2 + 3/15 = 2.2 = 2·0.9 + 0.4
        for (da, expect) in [(1e-9, true), (-1e-9, false)] {
            let g = singular_normal_derivative(0.9 + da, 0.4, 15.0);
            let i = g.get("2 + 3/q < 2 alpha + beta").unwrap();
            assert_eq!(i.holds, expect);
            assert_eq!(i.margin > 0.0, expect);
        }
        // 1 + 2/q = 2α + β at q = 2, α = 0.75, β = 0.5
        for (db, expect) in [(1e-9, true), (-1e-9, false)] {
            let i = pressure_unbounded(0.75, 0.5 + db, 2.0).inequalities[1].clone();
            assert_eq!(i.holds, expect);
        }
        // 2α + 3β = 2/2 + 3/4 + 1 = 2.75 at α = 0.5, β = 0.5833..
        let beta0 = (2.75 - 1.0) / 3.0;
        for (db, expect) in [(-1e-9, true), (1e-9, false)] {
            let g = pressure_bounded(3, 0.5, beta0 + db, 4.0, 2.0);
            assert_eq!(
                g.get("2 alpha + n beta < 2/q + n/p + 1").unwrap().holds,
                expect
            );
        }
        // β = n/((n−1)p) = 0.375 at p = 4
        for (db, expect) in [(1e-9, true), (-1e-9, false)] {
            let g = pressure_bounded(3, 0.5, 0.375 + db, 4.0, 2.0);
            assert_eq!(g.get("n/((n-1)p) < beta").unwrap().holds, expect);
        }
        // ε₀ = 2 at 2α + β = 1
        for (da, expect) in [(1e-9, true), (-1e-9, false)] {
            let g = holder_range(0.3 + da, 0.4);
            assert_eq!(g.get("eps0 < 2").unwrap().holds, expect);
        }
    }

    #[test]
    fn disjointness_searches() {
        let a = search_pressure_compatibility(3, 4.0, 2.0, 10_000, 1);
        assert!(a.preconditions_hold);
        assert!(a.in_c > 0 && a.in_d > 0);
        assert_eq!(a.in_both, 0);
        let b = search_lebesgue_compatibility(3, 4.0, 4.0, 2.5, 2.0, 10_000, 2);
        assert!(b.preconditions_hold);
        assert!(b.in_c > 0 && b.in_d > 0);
        assert_eq!(b.in_both, 0);
    }

    #[test]
    fn search_is_deterministic() {
        let a = search_pressure_compatibility(3, 5.0, 3.0, 5000, 9);
        let b = search_pressure_compatibility(3, 5.0, 3.0, 5000, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn total_on_degenerate_inputs() {
        let p = ModelParams {
            n: 3,
            alpha: 0.0,
            beta: 0.0,
            a: 1.0,
        };
        let mut inputs = ConditionInputs::default_for(3);
        inputs.q = 0.0;
        inputs.p = f64::INFINITY;
        let r = check_conditions(&p, &inputs);
        assert!(!r.group("energy-class").unwrap().holds);
        assert!(!r.disjointness[0].preconditions_hold);
    }
}
