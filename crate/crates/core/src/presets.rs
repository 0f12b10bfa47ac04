//! Named experiment families, each expandable into concrete
//! [`ExperimentSpec`]s with individually overridable parameters.

use std::fmt;
use std::str::FromStr;

use crate::data::TargetKind;
use crate::error::{Result, RfmError};
use crate::kernel::KernelHyperparams;
use crate::report::Metadata;
use crate::rfm::TrainConfig;
use crate::sweep::{build_d_grid_with, ExperimentSpec, GridMode, GridSpec, TRAIN_FRACTION};

pub const NOISE_LEVELS: [f64; 4] = [0.0, 0.001, 0.01, 0.1];
pub const SAMPLE_SIZES: [usize; 5] = [200, 400, 600, 800, 1000];
pub const TARGETS: [TargetKind; 2] = [TargetKind::Cubic, TargetKind::RandMat];
pub const DEFAULT_N: usize = 1000;
pub const DEFAULT_REPS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// One cubic, noiseless sweep at N = 1000.
    Base,
    /// The base sweep at each level in [`NOISE_LEVELS`].
    Noise,
    /// Size-scaled grids for each N in [`SAMPLE_SIZES`].
    Size,
    /// The base sweep for each target in [`TARGETS`].
    Target,
}

impl Preset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Base => "base",
            Preset::Noise => "noise",
            Preset::Size => "size",
            Preset::Target => "target",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = RfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Preset::Base),
            "noise" => Ok(Preset::Noise),
            "size" => Ok(Preset::Size),
            "target" => Ok(Preset::Target),
            other => Err(RfmError::Parse(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Per-parameter overrides; `None` keeps the preset value. Setting `n`,
/// `sigma` or `target` on a preset that varies that parameter collapses it to
/// the single given value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub master_seed: Option<u64>,
    pub sigma: Option<f64>,
    pub target: Option<TargetKind>,
    pub bandwidth: Option<f64>,
    pub ridge: Option<f64>,
    pub iterations: Option<usize>,
    pub d_step_fine: Option<usize>,
    pub d_step_coarse: Option<usize>,
}

impl Overrides {
    fn train_config(&self) -> TrainConfig {
        let mut hp = KernelHyperparams::default();
        if let Some(b) = self.bandwidth {
            hp.bandwidth = b;
        }
        if let Some(r) = self.ridge {
            hp.ridge = r;
        }
        let mut cfg = TrainConfig {
            hyperparams: hp,
            ..TrainConfig::default()
        };
        if let Some(t) = self.iterations {
            cfg.iterations = t;
        }
        cfg
    }

    fn grid(&self, mode: GridMode) -> GridSpec {
        let mut g = GridSpec::new(mode);
        if let Some(f) = self.d_step_fine {
            g.fine_step = f;
        }
        if let Some(c) = self.d_step_coarse {
            g.coarse_step = c;
        }
        g
    }
}

/// The widths a target can use from a grid; randmat reads ten columns.
fn grid_for(n: usize, grid: &GridSpec, target: TargetKind) -> Result<Vec<usize>> {
    let mut g = build_d_grid_with(n, grid)?;
    g.retain(|&d| d >= target.min_dim());
    Ok(g)
}

impl Preset {
    pub fn specs(&self, o: &Overrides) -> Result<Vec<ExperimentSpec>> {
        let reps = o.reps.unwrap_or(DEFAULT_REPS);
        let seed = o.master_seed.unwrap_or(DEFAULT_SEED);
        let cfg = o.train_config();
        cfg.validate()?;
        let make = |name: String, n: usize, sigma: f64, target: TargetKind, mode: GridMode| -> Result<ExperimentSpec> {
            let spec = ExperimentSpec {
                name,
                n,
                d_grid: grid_for(n, &o.grid(mode), target)?,
                target,
                sigma,
                reps,
                master_seed: seed,
                train_config: cfg,
            };
            spec.validate()?;
            Ok(spec)
        };
        let n = o.n.unwrap_or(DEFAULT_N);
        let sigma = o.sigma.unwrap_or(0.0);
        let target = o.target.unwrap_or(TargetKind::Cubic);
        match self {
            Preset::Base => Ok(vec![make("base".into(), n, sigma, target, GridMode::Base)?]),
            Preset::Noise => {
                let levels: Vec<f64> = o.sigma.map_or(NOISE_LEVELS.to_vec(), |s| vec![s]);
                levels
                    .into_iter()
                    .map(|s| make(format!("noise_sigma{s}"), n, s, target, GridMode::Base))
                    .collect()
            }
            Preset::Size => {
                let sizes: Vec<usize> = o.n.map_or(SAMPLE_SIZES.to_vec(), |n| vec![n]);
                sizes
                    .into_iter()
                    .map(|n| make(format!("size_n{n}"), n, sigma, target, GridMode::SizeScaled))
                    .collect()
            }
            Preset::Target => {
                let targets: Vec<TargetKind> = o.target.map_or(TARGETS.to_vec(), |t| vec![t]);
                targets
                    .into_iter()
                    .map(|t| make(format!("target_{}", t.as_str()), n, sigma, t, GridMode::Base))
                    .collect()
            }
        }
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Every setting needed to rerun `specs`, including defaults.
pub fn run_metadata(preset: Option<Preset>, specs: &[ExperimentSpec]) -> Metadata {
    let mut m = Metadata::new();
    if let Some(p) = preset {
        m.set("preset", p);
    }
    m.set("experiments", specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(","));
    if let Some(s) = specs.first() {
        m.set("master_seed", s.master_seed);
    }
    m.set("train_fraction", TRAIN_FRACTION);
    m.set("rng", "chacha12, streams sha256(master/rep/<rep>/<label>)");
    m.set("ci", "normal approximation, mean +- 1.96 * sem");
    for s in specs {
        let p = |k: &str| format!("{}.{k}", s.name);
        let hp = &s.train_config.hyperparams;
        m.set(&p("n"), s.n);
        m.set(&p("reps"), s.reps);
        m.set(&p("master_seed"), s.master_seed);
        m.set(&p("sigma"), s.sigma);
        m.set(&p("target"), s.target.as_str());
        m.set(&p("bandwidth"), hp.bandwidth);
        m.set(&p("ridge"), hp.ridge);
        m.set(&p("dist_floor"), hp.dist_floor);
        m.set(&p("iterations"), s.train_config.iterations);
        m.set(&p("val_fraction"), s.train_config.val_fraction);
        m.set(&p("include_iteration_zero"), s.train_config.include_iteration_zero);
        m.set(&p("d_grid"), join(&s.d_grid));
    }
    m
}
