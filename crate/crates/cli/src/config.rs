use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use halfstokes::analysis::{log_space, OnsetGrid};
use halfstokes::force::ForceProfiles;
use halfstokes::quad::QuadSpec;
use halfstokes::ModelParams;
use serde::{Deserialize, Serialize};

pub const ENV_OUTPUT_DIR: &str = "HALFSTOKES_OUTPUT_DIR";
pub const ENV_WORKERS: &str = "HALFSTOKES_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Kernels,
    Force,
    GreensBound,
    RatesNormalDeriv,
    RatesPressure,
    Holder,
    LemmaCalg,
    LemmaJkl,
    Shear,
    Regions,
    ParamsFeasibility,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::Kernels,
        Suite::Force,
        Suite::GreensBound,
        Suite::RatesNormalDeriv,
        Suite::RatesPressure,
        Suite::Holder,
        Suite::LemmaCalg,
        Suite::LemmaJkl,
        Suite::Shear,
        Suite::Regions,
        Suite::ParamsFeasibility,
    ];

    pub fn name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }

    /// The suites run for this selection, in order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

/// Log-spaced sample window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Window {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count }
    }

    pub fn points(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.count)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) || self.count < 4 {
            bail!("grid.{name}: need 0 < lo < hi and count ≥ 4");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub bump_radius: f64,
    pub cutoff_end: f64,
    /// Bump center in R^{n−1}; the origin when absent.
    pub center: Option<Vec<f64>>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            bump_radius: 0.9,
            cutoff_end: 1.9,
            center: None,
        }
    }
}

impl ProfileConfig {
    pub fn build(&self, n: usize) -> Result<ForceProfiles> {
        let p = ForceProfiles::new(n, self.bump_radius, self.cutoff_end)?;
        Ok(match &self.center {
            Some(c) if c.len() != n - 1 => bail!("profiles.center needs {} entries", n - 1),
            Some(c) => p.with_center(c.clone()),
            None => p,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub time_window: Window,
    pub x_tangential: Vec<f64>,
    pub sign_points: usize,
    pub pressure_point: Vec<f64>,
    pub calg_triples: Vec<[f64; 3]>,
    pub calg_branch2: [f64; 2],
    pub calg_rho: f64,
    pub calg_x_window: Window,
    pub jkl_points: Vec<Vec<f64>>,
    pub jkl_t_window: Window,
    pub holder_pairs: Vec<[f64; 2]>,
    pub holder_time_height: f64,
    pub holder_time_window: Window,
    pub onset: OnsetGrid,
    pub shear_alphas: Vec<f64>,
    pub region_samples: usize,
    pub printed_b2_samples: usize,
    pub force_floors: Vec<f64>,
    pub mixed_norm: [f64; 2],
    pub l_bound_coarse: usize,
    pub l_bound_fine: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            time_window: Window::new(1e-4, 1e-2, 9),
            x_tangential: vec![5.0, 5.0],
            sign_points: 10,
            pressure_point: vec![0.0, 5.0, 1.0],
            calg_triples: vec![[0.9, 0.4, -0.5], [0.5, 0.5, 0.0], [0.3, 0.8, -1.0]],
            calg_branch2: [-1.5, 0.4],
            calg_rho: 0.25,
            calg_x_window: Window::new(1e-2, 1e-1, 9),
            jkl_points: vec![
                vec![5.0, 0.5, 1.0],
                vec![3.0, -2.0, 1.0],
                vec![-2.0, 2.5, 0.7],
                vec![4.0, 3.0, 1.5],
                vec![2.0, -3.0, 0.5],
            ],
            jkl_t_window: Window::new(1e-3, 1e-1, 7),
            holder_pairs: vec![[0.9, 0.4], [0.7, 0.4]],
            holder_time_height: 1.0,
            holder_time_window: Window::new(1e-4, 1e-2, 9),
            onset: OnsetGrid::default(),
            shear_alphas: vec![0.1, 0.25, 0.4],
            region_samples: 100_000,
            printed_b2_samples: 1_000_000,
            force_floors: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            mixed_norm: [1.05, 2.0],
            l_bound_coarse: 3,
            l_bound_fine: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Field descriptions; ignored when reading.
    #[serde(rename = "_doc", skip_serializing_if = "BTreeMap::is_empty")]
    pub doc: BTreeMap<String, String>,
    pub params: ModelParams,
    pub profiles: ProfileConfig,
    pub quad: QuadSpec,
    pub suite: Suite,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
    pub grid: Grid,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            doc: BTreeMap::new(),
            params: ModelParams::default(),
            profiles: ProfileConfig::default(),
            quad: QuadSpec::default(),
            suite: Suite::All,
            output_dir: PathBuf::from("halfstokes-out"),
            seed: 20240501,
            workers: None,
            grid: Grid::default(),
        }
    }
}

const DOC: &[(&str, &str)] = &[
    ("params", "n: dimension (3 for the Green-tensor suites); alpha, beta: force exponents; a: force amplitude"),
    ("profiles", "bump_radius in (0, 1); cutoff_end in (1, 2); center: bump center or null for the origin"),
    ("quad", "rel_tol, abs_tol, max_subdivisions, grading_strength ≥ 1, mc_samples; seed is replaced by the run seed"),
    ("suite", "kernels, force, greens-bound, rates-normal-deriv, rates-pressure, holder, lemma-calg, lemma-jkl, shear, regions, params-feasibility or all"),
    ("output_dir", "directory for report.json, metadata.json and CSV series; overridden by HALFSTOKES_OUTPUT_DIR and --out"),
    ("seed", "seed for every random sample; overridden by --seed"),
    ("workers", "worker threads or null for all cores; overridden by HALFSTOKES_WORKERS and --workers"),
    ("grid.time_window", "t − 1/2 window of the rate fits"),
    ("grid.x_tangential", "tangential point of the normal-derivative and Hölder suites"),
    ("grid.sign_points", "random points per A set in the sign checks"),
    ("grid.pressure_point", "point of the pressure rate fits"),
    ("grid.calg_triples", "(alpha, beta, gamma) for the calG time exponents"),
    ("grid.calg_branch2", "(gamma, beta) for the calG x_n exponent"),
    ("grid.calg_rho", "(t − 1/2)/x_n² along the calG x_n fit"),
    ("grid.calg_x_window", "x_n window of the calG x_n fit"),
    ("grid.jkl_points", "base points of the J_kl fits"),
    ("grid.jkl_t_window", "t window of the J_kl fits"),
    ("grid.holder_pairs", "(alpha, beta) for the Hölder exponent fits"),
    ("grid.holder_time_height", "x_n of the temporal Hölder fit"),
    ("grid.holder_time_window", "t − 1/2 window of the temporal Hölder fit"),
    ("grid.onset", "heights, rhos = √(t − 1/2)/x_n and ratio floor of the lower-bound onset report"),
    ("grid.shear_alphas", "alpha values of the shear-flow fits"),
    ("grid.region_samples", "samples per sign inequality"),
    ("grid.printed_b2_samples", "samples of the printed B_12 emptiness check"),
    ("grid.force_floors", "time floors of the mixed-norm sweep"),
    ("grid.mixed_norm", "(q1, p1) of the mixed-norm sweep"),
    ("grid.l_bound_coarse", "points per axis of the coarse L-bound grid"),
    ("grid.l_bound_fine", "points per axis of the fine L-bound grid"),
];

impl RunConfig {
    /// Defaults with the field descriptions filled in.
    pub fn documented() -> Self {
        Self {
            doc: DOC
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut c: RunConfig = serde_json::from_str(text).context("invalid config")?;
        c.doc.clear();
        Ok(c)
    }

    /// Applies the environment overrides for output_dir and workers.
    pub fn apply_env(&mut self, vars: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(d) = vars(ENV_OUTPUT_DIR) {
            self.output_dir = PathBuf::from(d);
        }
        if let Some(w) = vars(ENV_WORKERS) {
            let w = w
                .parse()
                .with_context(|| format!("{ENV_WORKERS} = {w:?} is not a worker count"))?;
            self.workers = Some(w);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.quad.validate()?;
        self.profiles.build(self.params.n)?;
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        let g = &self.grid;
        g.time_window.validate("time_window")?;
        g.calg_x_window.validate("calg_x_window")?;
        g.jkl_t_window.validate("jkl_t_window")?;
        g.holder_time_window.validate("holder_time_window")?;
        if g.x_tangential.len() != self.params.n - 1 {
            bail!("grid.x_tangential needs {} entries", self.params.n - 1);
        }
        if g.pressure_point.len() != self.params.n {
            bail!("grid.pressure_point needs {} entries", self.params.n);
        }
        if g.jkl_points.iter().any(|p| p.len() != 3) {
            bail!("grid.jkl_points are points of R³₊");
        }
        if g.sign_points == 0 || g.region_samples == 0 || g.printed_b2_samples == 0 {
            bail!("sample counts must be positive");
        }
        if g.force_floors.len() < 2 || g.force_floors.iter().any(|&f| !(f > 0.0 && f < 0.5)) {
            bail!("grid.force_floors needs at least two floors in (0, 1/2)");
        }
        if g.l_bound_coarse < 2 || g.l_bound_fine < 2 {
            bail!("L-bound grids need at least 2 points per axis");
        }
        Ok(())
    }

    pub fn profiles(&self) -> Result<ForceProfiles> {
        self.profiles.build(self.params.n)
    }

    pub fn quad(&self) -> QuadSpec {
        QuadSpec {
            seed: self.seed,
            ..self.quad
        }
    }
}
